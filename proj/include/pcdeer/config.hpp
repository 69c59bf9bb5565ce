#pragma once

#include <map>
#include <string>

#include "pcdeer/ensemble.hpp"
#include "pcdeer/hamiltonians.hpp"
#include "pcdeer/pulse_engine.hpp"

namespace pcdeer {

// Full simulation configuration. Defaults reproduce the experimental
// operating point (78.6 G along [111], 1400 ns echo window, 60 ns bath pi
// pulse); every key is documented in the README schema.
struct SimConfig {
  FieldConfig field;

  struct NvParams {
    double g = kGFactorElectron;
    double d_mhz = kNvZeroFieldSplittingMHz;
  } nv;

  struct P1Params {
    double g = kGFactorElectron;
    double a_par_mhz = kP1AParMHz;
    double a_perp_mhz = kP1APerpMHz;
    double q_perp_mhz = kP1QPerpMHz;
    double nuclear_g = kGFactor14N;
  } p1;

  struct NvhParams {
    double g = kGFactorElectron;
    double ah_par_mhz = kNvhAHParMHz;
    double ah_perp_mhz = kNvhAHPerpMHz;
    double an_par_mhz = kNvhANParMHz;
    double an_perp_mhz = kNvhANPerpMHz;
  } nvh;

  struct PulseParams {
    double omega_mw_mhz = 10.0 / 3.0;  // NV pi time 150 ns
    double omega_rf_mhz = 25.0 / 3.0;  // bath pi time 60 ns
    double tau_ns = 1400.0;
    double tpi_rf_ns = 60.0;
  } pulse;

  struct PairParams {
    double coupling_mhz = 0.05;
    BathKind bath = BathKind::P1;
    bool bath_axial = false;  // DEER-Rabi targets the non-axial group by default
  } pair;

  struct EnsembleParams {
    double delta_mhz = 0.05;
    LineshapeKind lineshape = LineshapeKind::Lorentzian;
    double fwhm_mhz = 12.5;
    double stick_threshold = 0.15;
  } ensemble;

  struct ReadoutParams {
    Channel channel = Channel::PC;
    double contrast_pc = 0.038;
    double contrast_pl = 0.10;
    double baseline = 1.0;
  } readout;

  SweepGrid sweep;

  std::map<std::string, double> frequency_overrides;

  SpinSpecies nv_species() const;
  SpinSpecies p1_species() const;
  SpinSpecies nvh_species() const;
  SpinSpecies species_by_name(const std::string& name) const;

  LineshapeConfig lineshape_config() const;
  ReadoutModel readout_model() const;
  ReadoutModel readout_model(Channel channel) const;
  EnsembleModel ensemble_model() const;
  PairSystem pair_system() const;

  // Named frequencies for the sequence language and CLI: f1, f2 (aligned NV),
  // group_i..group_v (P1 group centers), nvh_low, nvh_high (hydrogen cluster
  // centers), merged with user overrides.
  std::map<std::string, double> named_frequencies() const;
  SequenceContext sequence_context() const;

  // Canonical text form with every key explicit; parses back identically.
  std::string to_text() const;

  void validate() const;
};

// Parse the key-tree text format ([section] / key = value lines, full-line
// '#' comments). Unknown keys, type mismatches and out-of-range values raise
// validation_error naming the key and line.
SimConfig parse_config(const std::string& text);
SimConfig parse_config_file(const std::string& path);

}  // namespace pcdeer
