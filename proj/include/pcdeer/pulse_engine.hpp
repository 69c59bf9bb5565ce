#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcdeer/hamiltonians.hpp"
#include "pcdeer/spectrum.hpp"
#include "pcdeer/spin_core.hpp"

namespace pcdeer {

struct MwPulse {
  double carrier_mhz = 0.0;
  double omega_mhz = 0.0;  // on-resonance Rabi frequency; pi time = 1/(2 omega)
  double phase_rad = 0.0;
  double duration_ns = 0.0;
};

struct RfPulse {
  double carrier_mhz = 0.0;
  double omega_mhz = 0.0;
  double phase_rad = 0.0;
  double duration_ns = 0.0;
};

struct DelayBlock {
  double duration_ns = 0.0;
};

struct ReadoutBlock {};

using PulseBlock = std::variant<MwPulse, RfPulse, DelayBlock, ReadoutBlock>;

double block_duration_ns(const PulseBlock& block);

struct PulseSequence {
  std::vector<PulseBlock> blocks;

  // Exactly one Readout, last; durations >= 0; amplitudes >= 0.
  void validate() const;
  double total_duration_ns() const;
};

enum class BathKind { BareSpinHalf, P1, Nvh };

std::string to_string(BathKind k);
BathKind bath_kind_from_string(const std::string& s);

// NV effective two-level system coupled to one bath spin system. The secular
// coupling d shifts the NV transition frequency by d when the bath electron
// flips between its mS = +-1/2 manifolds.
struct PairSystem {
  double f_nv_mhz = 2649.715;
  BathKind bath = BathKind::P1;
  double coupling_mhz = 0.05;  // d
  FieldConfig field;
  Eigen::Vector3d bath_axis = orientation_axes().axes[1];  // non-axial default
  std::optional<SpinSpecies> bath_species_override;

  // Rotating-frame reference frequencies; run_sequence and the DEER ops set
  // these from the pulse carriers.
  double mw_frame_mhz = 2649.715;
  double rf_frame_mhz = 0.0;

  int bath_dimension() const;
  int dimension() const { return 2 * bath_dimension(); }
};

PairSystem make_pair_system(BathKind bath, double f_nv_mhz, double coupling_mhz,
                            const FieldConfig& field);

// Precomputed bath structure: lab Hamiltonian eigensystem, electron operators,
// manifold signs and the RWA drive quadratures (inter-manifold part of the
// transverse electron operator).
struct BathModel {
  int dim = 2;
  EigenSystem eig;              // of the lab-frame bath Hamiltonian
  Operator sz;                  // b_hat . S_e (full operator)
  Operator drive_x, drive_y;    // RWA drive quadratures
  Eigen::VectorXd manifold;     // +-1/2 per eigenstate (electron polarization sign)
  Operator frame_diag(double f_rf_mhz) const;  // sum_k (E_k - f_rf * s_k)|k><k|
};

BathModel build_bath_model(const PairSystem& system);

// Static RWA Hamiltonian for one block in the doubly rotating frame
// (NV frame at system.mw_frame_mhz, bath frame at system.rf_frame_mhz):
// NV detuning + bath internal terms + secular coupling + the block's drive.
Operator rotating_frame_hamiltonian(const PairSystem& system, const PulseBlock& block);
Operator rotating_frame_hamiltonian(const PairSystem& system, const PulseBlock& block,
                                    const BathModel& bath);

struct SequenceResult {
  DensityMatrix rho_final;
  double nv_population = 0.0;  // probability of the NV bright state |0>
};

// Execute a sequence by piecewise-constant propagation. rho0 defaults to
// NV |0> (x) maximally mixed bath. All MW pulses must share one carrier, and
// all RF pulses one carrier (they define the rotating frames).
SequenceResult run_sequence(const PulseSequence& seq, const PairSystem& system);
SequenceResult run_sequence(const PulseSequence& seq, const PairSystem& system,
                            const DensityMatrix& rho0);

// NV population vs MW pulse duration; on resonance equals cos^2(pi omega t).
Spectrum rabi_trace(const PairSystem& system, double omega_mhz, double f_drive_mhz,
                    double t_max_ns, int n_points);

// Hahn echo amplitude (ideal instantaneous NV pulses, free evolution tau on
// each side of the refocusing pulse); equals 2 p0 - 1.
double hahn_echo_point(const PairSystem& system, double tau_ns);

// DEER echo amplitude: Hahn echo with an RF pulse on the bath electron played
// concurrently with the free evolution, starting right after the NV pi pulse
// (a pulse longer than tau extends backward across the pi pulse; longer than
// 2 tau is rejected). NV pulses are ideal rotations; the RF pulse is finite.
double deer_point(const PairSystem& system, double f_rf_mhz, double t_rf_ns,
                  double omega_rf_mhz, double tau_ns);

// Echo amplitude vs RF pulse duration at fixed carrier (bath Rabi trace).
Spectrum deer_rabi_trace(const PairSystem& system, double f_rf_mhz, double omega_rf_mhz,
                         double t_max_ns, double tau_ns, int n_points);

// Duration of a rotation by theta at Rabi frequency omega: pi <-> 1/(2 omega).
double pulse_angle_duration_ns(double theta_rad, double omega_mhz);
inline double pi_time_ns(double omega_mhz) { return pulse_angle_duration_ns(M_PI, omega_mhz); }

// --- sequence mini-language ---------------------------------------------
//
//   seq   := stmt (';' stmt)* ';'?
//   stmt  := mw | rf | delay | read
//   mw    := 'mw' angle '@' freq        angle := 'pi' | 'pi/2' | FLOAT 'deg'
//   rf    := 'rf' dur '@' freq          dur   := FLOAT 'ns'
//   delay := 'delay' dur                freq  := FLOAT 'mhz' | NAME
//   read  := 'read'
//
// Keywords and names are case-insensitive; whitespace is insignificant.
// NAME resolves against named frequencies; angles are converted to durations
// with the configured Rabi frequency of the addressed channel.
struct SequenceContext {
  std::map<std::string, double> named_frequencies_mhz;
  double omega_mw_mhz = 10.0 / 3.0;
  double omega_rf_mhz = 25.0 / 3.0;
};

PulseSequence parse_sequence(const std::string& text, const SequenceContext& ctx);

// Canonical text form; parse_sequence(serialize_sequence(s, ctx), ctx)
// reproduces the block list (durations to floating-point round-trip accuracy).
std::string serialize_sequence(const PulseSequence& seq, const SequenceContext& ctx);

}  // namespace pcdeer
