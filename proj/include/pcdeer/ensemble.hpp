#pragma once

#include <string>

#include "pcdeer/spectrum.hpp"
#include "pcdeer/transitions.hpp"

namespace pcdeer {

enum class LineshapeKind { Lorentzian, Gaussian };

LineshapeKind lineshape_from_string(const std::string& s);
std::string to_string(LineshapeKind k);

struct LineshapeConfig {
  LineshapeKind kind = LineshapeKind::Lorentzian;
  double fwhm_mhz = 12.5;  // inhomogeneous broadening

  void validate() const {
    if (!(fwhm_mhz > 0)) throw validation_error("lineshape fwhm must be > 0");
  }
  // Unit-area density at offset x from the line center.
  double density(double x_mhz) const;
};

// Mean-field bath model: the echo decays as exp(-2 delta (2 tau) P) with P the
// flipped bath fraction.
struct EnsembleModel {
  double mean_coupling_mhz = 0.05;  // delta, average NV-bath dipolar rate
  double tau_ns = 1400.0;
  double omega_rf_mhz = 25.0 / 3.0;
  double t_rf_ns = 60.0;
  LineshapeConfig lineshape;

  void validate() const;
};

enum class Channel { PL, PC };

Channel channel_from_string(const std::string& s);
std::string to_string(Channel c);

struct ReadoutModel {
  Channel channel = Channel::PC;
  double contrast = 0.038;  // fraction of baseline between echo +1 and -1
  double baseline = 1.0;    // arbitrary units

  void validate() const {
    if (contrast < 0 || contrast > 1) throw validation_error("contrast must lie in [0,1]");
  }
};

struct SweepGrid {
  double min_mhz = 100.0;
  double max_mhz = 400.0;
  int points = 600;

  void validate() const {
    if (points < 2) throw validation_error("sweep needs at least 2 points");
    if (!(max_mhz > min_mhz)) throw validation_error("sweep max must exceed min");
  }
};

enum class ReadoutInput { Echo, Population };

// signal = baseline (1 - C (1 - x)/2) for echo x in [-1,1]; populations are
// mapped through x = 2p - 1. Monotone increasing in x.
double readout_map(double value, const ReadoutModel& model,
                   ReadoutInput kind = ReadoutInput::Echo);

// Probability that a rectangular pulse (omega, t) inverts a spin with the
// line's center offset by f_rf, convolved with the inhomogeneous lineshape:
//   p(delta) = omega^2/(omega^2+delta^2) sin^2(pi t sqrt(omega^2+delta^2)).
// Quadrature relative error < 1e-6.
double flip_probability(double f_rf_mhz, const TransitionLine& line, double omega_rf_mhz,
                        double t_rf_ns, const LineshapeConfig& shape);

// Internal knob for convergence testing.
double flip_probability_n(double f_rf_mhz, double line_center_mhz, double omega_rf_mhz,
                          double t_rf_ns, const LineshapeConfig& shape, int quadrature_points);

// DEER spectrum over an RF frequency sweep: total flipped fraction
// P(f) = sum_k w_k p_k(f) with multiplicity-weighted normalized intensities,
// echo E(f) = exp(-2 delta (2 tau) P(f)), then the readout map.
Spectrum deer_spectrum(const EnsembleModel& model, const StickSpectrum& sticks,
                       const SweepGrid& sweep, const ReadoutModel& readout);

// Lineshape-broadened stick spectrum: sum_k w_k L(f - f_k), unit-area L.
Spectrum broaden(const StickSpectrum& sticks, const LineshapeConfig& shape,
                 const SweepGrid& sweep);

}  // namespace pcdeer
