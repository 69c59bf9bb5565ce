#include "pcdeer/pulse_engine.hpp"

#include <algorithm>
#include <cmath>

namespace pcdeer {

using std::complex;

double block_duration_ns(const PulseBlock& block) {
  return std::visit(
      [](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ReadoutBlock>) {
          return 0.0;
        } else {
          return b.duration_ns;
        }
      },
      block);
}

void PulseSequence::validate() const {
  if (blocks.empty()) throw validation_error("sequence is empty");
  int n_read = 0;
  for (size_t k = 0; k < blocks.size(); ++k) {
    const PulseBlock& b = blocks[k];
    if (std::holds_alternative<ReadoutBlock>(b)) {
      ++n_read;
      if (k + 1 != blocks.size()) {
        throw validation_error("sequence: readout must be the final block");
      }
      continue;
    }
    if (block_duration_ns(b) < 0) throw validation_error("sequence: negative block duration");
    if (const auto* mw = std::get_if<MwPulse>(&b); mw && mw->omega_mhz < 0) {
      throw validation_error("sequence: negative MW amplitude");
    }
    if (const auto* rf = std::get_if<RfPulse>(&b); rf && rf->omega_mhz < 0) {
      throw validation_error("sequence: negative RF amplitude");
    }
  }
  if (n_read != 1) throw validation_error("sequence must contain exactly one readout, last");
}

double PulseSequence::total_duration_ns() const {
  double t = 0;
  for (const auto& b : blocks) t += block_duration_ns(b);
  return t;
}

std::string to_string(BathKind k) {
  switch (k) {
    case BathKind::BareSpinHalf: return "spin-half";
    case BathKind::P1: return "p1";
    case BathKind::Nvh: return "nvh";
  }
  return "p1";
}

BathKind bath_kind_from_string(const std::string& s) {
  if (s == "p1") return BathKind::P1;
  if (s == "nvh") return BathKind::Nvh;
  if (s == "spin-half" || s == "bare" || s == "spin-1/2") return BathKind::BareSpinHalf;
  throw validation_error("unknown bath kind '" + s + "' (p1|nvh|spin-half)");
}

int PairSystem::bath_dimension() const {
  switch (bath) {
    case BathKind::BareSpinHalf: return 2;
    case BathKind::P1: return 6;
    case BathKind::Nvh: return 12;
  }
  return 2;
}

PairSystem make_pair_system(BathKind bath, double f_nv_mhz, double coupling_mhz,
                            const FieldConfig& field) {
  PairSystem sys;
  sys.bath = bath;
  sys.f_nv_mhz = f_nv_mhz;
  sys.coupling_mhz = coupling_mhz;
  sys.field = field;
  sys.mw_frame_mhz = f_nv_mhz;
  return sys;
}

namespace {

std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse_pair(const Eigen::Vector3d& v) {
  const Eigen::Vector3d b = v.normalized();
  const Eigen::Vector3d seed =
      std::abs(b.x()) < 0.9 ? Eigen::Vector3d(1, 0, 0) : Eigen::Vector3d(0, 1, 0);
  const Eigen::Vector3d a1 = b.cross(seed).normalized();
  return {a1, b.cross(a1)};
}

SpinSpecies bath_species(const PairSystem& sys) {
  if (sys.bath_species_override) return *sys.bath_species_override;
  switch (sys.bath) {
    case BathKind::P1: return SpinSpecies::p1();
    case BathKind::Nvh: return SpinSpecies::nvh();
    case BathKind::BareSpinHalf: {
      SpinSpecies s;
      s.name = "spin-half";
      s.electron_spin = 0.5;
      s.g = kGFactorElectron;
      return s;
    }
  }
  return SpinSpecies::p1();
}

}  // namespace

Operator BathModel::frame_diag(double f_rf_mhz) const {
  Eigen::VectorXcd d(dim);
  for (int k = 0; k < dim; ++k) d[k] = eig.energies[k] - f_rf_mhz * manifold[k];
  return eig.states * d.asDiagonal() * eig.states.adjoint();
}

BathModel build_bath_model(const PairSystem& system) {
  const SpinSpecies species = bath_species(system);
  const Operator h = build_species_hamiltonian(species, system.field, system.bath_axis);
  BathModel m;
  m.dim = species.dimension();
  m.eig = eigh(h);
  const Eigen::Vector3d b = system.field.unit_direction();
  m.sz = electron_vector_operator(species, b);
  const auto [a1, a2] = transverse_pair(b);
  const Operator sx = electron_vector_operator(species, a1);

  // Electron polarization sign of each eigenstate fixes its Zeeman manifold.
  m.manifold.resize(m.dim);
  const Eigen::MatrixXcd sz_eig = m.eig.states.adjoint() * m.sz * m.eig.states;
  for (int k = 0; k < m.dim; ++k) m.manifold[k] = sz_eig(k, k).real() >= 0 ? 0.5 : -0.5;

  // RWA drive: keep only the inter-manifold (electron-flip) part of the
  // transverse drive; intra-manifold elements rotate at the carrier and drop.
  const Eigen::MatrixXcd sx_eig = m.eig.states.adjoint() * sx * m.eig.states;
  Eigen::MatrixXcd raising = Eigen::MatrixXcd::Zero(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i) {
    for (int j = 0; j < m.dim; ++j) {
      if (m.manifold[i] > m.manifold[j]) raising(i, j) = sx_eig(i, j);
    }
  }
  const Eigen::MatrixXcd t_full = m.eig.states * raising * m.eig.states.adjoint();
  m.drive_x = t_full + t_full.adjoint();
  m.drive_y = complex<double>(0, 1) * (t_full.adjoint() - t_full);
  return m;
}

namespace {

Operator nv_sigma(int which) {  // 0:x 1:y 2:z
  Operator s(2, 2);
  switch (which) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, complex<double>(0, -1), complex<double>(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

// |1><1| on the NV slot (dark state mS = -1 of the effective two-level NV).
Operator nv_excited_projector() {
  Operator p = Operator::Zero(2, 2);
  p(1, 1) = 1.0;
  return p;
}

Operator base_hamiltonian(const PairSystem& sys, const BathModel& bath) {
  const int nb = bath.dim;
  const Operator id_b = identity(nb);
  Operator h = kron((sys.f_nv_mhz - sys.mw_frame_mhz) * nv_excited_projector(), id_b);
  h += kron(identity(2), bath.frame_diag(sys.rf_frame_mhz));
  h += sys.coupling_mhz * kron(0.5 * nv_sigma(2), bath.sz);
  return h;
}

}  // namespace

Operator rotating_frame_hamiltonian(const PairSystem& system, const PulseBlock& block,
                                    const BathModel& bath) {
  Operator h = base_hamiltonian(system, bath);
  if (const auto* mw = std::get_if<MwPulse>(&block)) {
    const Operator drive =
        0.5 * mw->omega_mhz *
        (std::cos(mw->phase_rad) * nv_sigma(0) + std::sin(mw->phase_rad) * nv_sigma(1));
    h += kron(drive, identity(bath.dim));
  } else if (const auto* rf = std::get_if<RfPulse>(&block)) {
    const Operator drive = rf->omega_mhz * (std::cos(rf->phase_rad) * bath.drive_x +
                                            std::sin(rf->phase_rad) * bath.drive_y);
    h += kron(identity(2), drive);
  }
  return h;
}

Operator rotating_frame_hamiltonian(const PairSystem& system, const PulseBlock& block) {
  return rotating_frame_hamiltonian(system, block, build_bath_model(system));
}

namespace {

DensityMatrix default_initial_state(int bath_dim) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2 * bath_dim, 2 * bath_dim);
  rho.topLeftCorner(bath_dim, bath_dim) =
      Eigen::MatrixXcd::Identity(bath_dim, bath_dim) / static_cast<double>(bath_dim);
  return DensityMatrix{std::move(rho)};
}

double bright_population(const DensityMatrix& rho, int bath_dim) {
  return rho.rho.topLeftCorner(bath_dim, bath_dim).trace().real();
}

// Ideal NV rotation about an equatorial axis, identity on the bath.
Operator ideal_nv_rotation(double theta, double phase, int bath_dim) {
  const Operator gen =
      0.5 * (std::cos(phase) * nv_sigma(0) + std::sin(phase) * nv_sigma(1));
  Operator u2(2, 2);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  u2 = c * identity(2) - complex<double>(0, 1) * (2.0 * s) * gen;
  return kron(u2, identity(bath_dim));
}

struct FrameChoice {
  double mw = 0.0, rf = 0.0;
};

FrameChoice derive_frames(const PulseSequence& seq, const PairSystem& sys) {
  FrameChoice f{sys.f_nv_mhz, 0.0};
  bool mw_set = false, rf_set = false;
  for (const auto& b : seq.blocks) {
    if (const auto* mw = std::get_if<MwPulse>(&b)) {
      if (mw_set && std::abs(mw->carrier_mhz - f.mw) > 1e-9) {
        throw validation_error("run_sequence: all MW pulses must share one carrier");
      }
      f.mw = mw->carrier_mhz;
      mw_set = true;
    } else if (const auto* rf = std::get_if<RfPulse>(&b)) {
      if (rf_set && std::abs(rf->carrier_mhz - f.rf) > 1e-9) {
        throw validation_error("run_sequence: all RF pulses must share one carrier");
      }
      f.rf = rf->carrier_mhz;
      rf_set = true;
    }
  }
  return f;
}

}  // namespace

SequenceResult run_sequence(const PulseSequence& seq, const PairSystem& system,
                            const DensityMatrix& rho0) {
  seq.validate();
  PairSystem sys = system;
  const FrameChoice frames = derive_frames(seq, sys);
  sys.mw_frame_mhz = frames.mw;
  sys.rf_frame_mhz = frames.rf;
  const BathModel bath = build_bath_model(sys);
  if (rho0.dim() != sys.dimension()) {
    throw validation_error("run_sequence: rho0 dimension mismatch");
  }

  DensityMatrix rho = DensityMatrix::checked(rho0.rho);
  for (const auto& block : seq.blocks) {
    if (std::holds_alternative<ReadoutBlock>(block)) break;
    const double dt = block_duration_ns(block);
    if (dt == 0.0) continue;
    const Operator h = rotating_frame_hamiltonian(sys, block, bath);
    rho = propagate(h, dt, rho);
  }
  const double p0 = bright_population(rho, bath.dim);
  return SequenceResult{std::move(rho), p0};
}

SequenceResult run_sequence(const PulseSequence& seq, const PairSystem& system) {
  return run_sequence(seq, system, default_initial_state(system.bath_dimension()));
}

Spectrum rabi_trace(const PairSystem& system, double omega_mhz, double f_drive_mhz,
                    double t_max_ns, int n_points) {
  if (omega_mhz < 0) throw validation_error("rabi_trace: omega must be >= 0");
  PairSystem sys = system;
  sys.mw_frame_mhz = f_drive_mhz;
  sys.rf_frame_mhz = 0.0;
  const BathModel bath = build_bath_model(sys);
  const MwPulse pulse{f_drive_mhz, omega_mhz, 0.0, 0.0};
  const EigenSystem drive_eig = eigh(rotating_frame_hamiltonian(sys, pulse, bath));

  const DensityMatrix rho0 = default_initial_state(bath.dim);
  Spectrum out;
  out.axis = linspace(0.0, t_max_ns, n_points);
  out.axis_label = "time_ns";
  out.channel = "population";
  out.signal.reserve(n_points);
  for (const double t : out.axis) {
    out.signal.push_back(bright_population(propagate(drive_eig, t, rho0), bath.dim));
  }
  out.validate();
  return out;
}

namespace {

// Shared DEER/Hahn executor with precomputed eigensystems. The RF pulse runs
// concurrently with the free evolution: the first min(t_rf, tau) ns of the
// second window are driven; any excess fills the tail of the first window.
double echo_with_rf(const EigenSystem& free_eig, const EigenSystem* rf_eig, double t_rf_ns,
                    double tau_ns, int bath_dim) {
  const double post = std::min(t_rf_ns, tau_ns);
  const double pre = t_rf_ns - post;

  DensityMatrix rho = default_initial_state(bath_dim);
  const Operator u90 = ideal_nv_rotation(M_PI / 2, 0.0, bath_dim);
  const Operator u180 = ideal_nv_rotation(M_PI, 0.0, bath_dim);

  auto evolve = [&](const EigenSystem& es, double t) {
    if (t > 0) rho = propagate(es, t, rho);
  };
  rho = DensityMatrix{u90 * rho.rho * u90.adjoint()};
  evolve(free_eig, tau_ns - pre);
  if (pre > 0 && rf_eig) evolve(*rf_eig, pre);
  rho = DensityMatrix{u180 * rho.rho * u180.adjoint()};
  if (post > 0 && rf_eig) evolve(*rf_eig, post);
  evolve(free_eig, tau_ns - post);
  rho = DensityMatrix{u90 * rho.rho * u90.adjoint()};
  return 2.0 * bright_population(rho, bath_dim) - 1.0;
}

}  // namespace

double hahn_echo_point(const PairSystem& system, double tau_ns) {
  if (tau_ns < 0) throw validation_error("hahn_echo_point: tau must be >= 0");
  PairSystem sys = system;
  sys.mw_frame_mhz = sys.f_nv_mhz;
  sys.rf_frame_mhz = 0.0;
  const BathModel bath = build_bath_model(sys);
  const EigenSystem free_eig = eigh(rotating_frame_hamiltonian(sys, DelayBlock{}, bath));
  return echo_with_rf(free_eig, nullptr, 0.0, tau_ns, bath.dim);
}

double deer_point(const PairSystem& system, double f_rf_mhz, double t_rf_ns,
                  double omega_rf_mhz, double tau_ns) {
  if (tau_ns < 0) throw validation_error("deer_point: tau must be >= 0");
  if (t_rf_ns < 0) throw validation_error("deer_point: t_rf must be >= 0");
  if (omega_rf_mhz < 0) throw validation_error("deer_point: omega_rf must be >= 0");
  if (t_rf_ns > 2.0 * tau_ns) {
    throw validation_error("deer_point: RF pulse longer than the echo window (t_rf > 2 tau)");
  }
  PairSystem sys = system;
  sys.mw_frame_mhz = sys.f_nv_mhz;
  sys.rf_frame_mhz = f_rf_mhz;
  const BathModel bath = build_bath_model(sys);
  const EigenSystem free_eig = eigh(rotating_frame_hamiltonian(sys, DelayBlock{}, bath));
  const RfPulse rf{f_rf_mhz, omega_rf_mhz, 0.0, t_rf_ns};
  const EigenSystem rf_eig = eigh(rotating_frame_hamiltonian(sys, rf, bath));
  return echo_with_rf(free_eig, &rf_eig, t_rf_ns, tau_ns, bath.dim);
}

Spectrum deer_rabi_trace(const PairSystem& system, double f_rf_mhz, double omega_rf_mhz,
                         double t_max_ns, double tau_ns, int n_points) {
  if (t_max_ns > 2.0 * tau_ns) {
    throw validation_error("deer_rabi_trace: t_max exceeds the echo window (2 tau)");
  }
  PairSystem sys = system;
  sys.mw_frame_mhz = sys.f_nv_mhz;
  sys.rf_frame_mhz = f_rf_mhz;
  const BathModel bath = build_bath_model(sys);
  const EigenSystem free_eig = eigh(rotating_frame_hamiltonian(sys, DelayBlock{}, bath));
  const RfPulse rf{f_rf_mhz, omega_rf_mhz, 0.0, 0.0};
  const EigenSystem rf_eig = eigh(rotating_frame_hamiltonian(sys, rf, bath));

  Spectrum out;
  out.axis = linspace(0.0, t_max_ns, n_points);
  out.axis_label = "time_ns";
  out.channel = "echo";
  out.signal.reserve(n_points);
  for (const double t : out.axis) {
    out.signal.push_back(echo_with_rf(free_eig, &rf_eig, t, tau_ns, bath.dim));
  }
  out.validate();
  return out;
}

double pulse_angle_duration_ns(double theta_rad, double omega_mhz) {
  if (omega_mhz <= 0) throw validation_error("pulse duration undefined for omega <= 0");
  if (theta_rad < 0) throw validation_error("pulse angle must be >= 0");
  // theta = 2 pi omega t, t in us.
  return theta_rad / (2.0 * M_PI * omega_mhz) * 1e3;
}

}  // namespace pcdeer
