#include "pcdeer/ensemble.hpp"

#include <cmath>
#include <vector>

namespace pcdeer {

LineshapeKind lineshape_from_string(const std::string& s) {
  if (s == "lorentzian") return LineshapeKind::Lorentzian;
  if (s == "gaussian") return LineshapeKind::Gaussian;
  throw validation_error("unknown lineshape '" + s + "' (lorentzian|gaussian)");
}

std::string to_string(LineshapeKind k) {
  return k == LineshapeKind::Lorentzian ? "lorentzian" : "gaussian";
}

Channel channel_from_string(const std::string& s) {
  if (s == "pl") return Channel::PL;
  if (s == "pc") return Channel::PC;
  throw validation_error("unknown readout channel '" + s + "' (pl|pc)");
}

std::string to_string(Channel c) { return c == Channel::PL ? "pl" : "pc"; }

double LineshapeConfig::density(double x) const {
  if (kind == LineshapeKind::Lorentzian) {
    const double g = fwhm_mhz / 2.0;
    return g / (M_PI * (x * x + g * g));
  }
  const double sigma = fwhm_mhz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
}

void EnsembleModel::validate() const {
  if (mean_coupling_mhz < 0) throw validation_error("ensemble coupling must be >= 0");
  if (tau_ns < 0) throw validation_error("tau must be >= 0");
  if (omega_rf_mhz < 0) throw validation_error("omega_rf must be >= 0");
  if (t_rf_ns < 0) throw validation_error("t_rf must be >= 0");
  lineshape.validate();
}

double readout_map(double value, const ReadoutModel& model, ReadoutInput kind) {
  model.validate();
  const double lo = kind == ReadoutInput::Echo ? -1.0 : 0.0;
  if (value < lo - 1e-9 || value > 1.0 + 1e-9) {
    throw validation_error("readout_map: input " + std::to_string(value) +
                           " outside valid range");
  }
  const double echo = kind == ReadoutInput::Echo ? value : 2.0 * value - 1.0;
  return model.baseline * (1.0 - model.contrast * (1.0 - echo) / 2.0);
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

const std::pair<std::vector<double>, std::vector<double>>& cached_gl(int n) {
  static const auto* cache = [] {
    auto* c = new std::pair<std::vector<double>, std::vector<double>>();
    gauss_legendre(2001, c->first, c->second);
    return c;
  }();
  if (n == 2001) return *cache;
  thread_local std::pair<std::vector<double>, std::vector<double>> local;
  if (static_cast<int>(local.first.size()) != n) gauss_legendre(n, local.first, local.second);
  return local;
}

inline double rabi_flip(double omega, double delta, double t_us) {
  const double w2 = omega * omega + delta * delta;
  if (w2 == 0.0) return 0.0;
  const double s = std::sin(M_PI * t_us * std::sqrt(w2));
  return (omega * omega / w2) * s * s;
}

}  // namespace

double flip_probability_n(double f_rf_mhz, double line_center_mhz, double omega_rf_mhz,
                          double t_rf_ns, const LineshapeConfig& shape, int nq) {
  shape.validate();
  if (omega_rf_mhz < 0 || t_rf_ns < 0) {
    throw validation_error("flip_probability: omega and t must be >= 0");
  }
  if (omega_rf_mhz == 0.0 || t_rf_ns == 0.0) return 0.0;
  const double t_us = t_rf_ns * 1e-3;
  const double delta0 = f_rf_mhz - line_center_mhz;

  // x = (fwhm/2) tan(u) maps the lineshape tails onto a finite interval.
  const auto& [nodes, weights] = cached_gl(nq);
  const double half = shape.fwhm_mhz / 2.0;
  double acc = 0.0;
  for (size_t k = 0; k < nodes.size(); ++k) {
    const double u = nodes[k] * (M_PI / 2.0);
    const double c = std::cos(u);
    const double x = half * std::tan(u);
    const double jac = (M_PI / 2.0) * half / (c * c);
    acc += weights[k] * jac * shape.density(x) * rabi_flip(omega_rf_mhz, delta0 - x, t_us);
  }
  return std::min(std::max(acc, 0.0), 1.0);
}

double flip_probability(double f_rf_mhz, const TransitionLine& line, double omega_rf_mhz,
                        double t_rf_ns, const LineshapeConfig& shape) {
  return flip_probability_n(f_rf_mhz, line.frequency_mhz, omega_rf_mhz, t_rf_ns, shape, 2001);
}

Spectrum deer_spectrum(const EnsembleModel& model, const StickSpectrum& sticks,
                       const SweepGrid& sweep, const ReadoutModel& readout) {
  model.validate();
  sweep.validate();
  readout.validate();
  if (sticks.lines.empty()) throw validation_error("deer_spectrum: empty stick spectrum");

  double wtot = 0.0;
  for (const auto& l : sticks.lines) wtot += l.multiplicity * l.intensity;
  if (wtot <= 0) throw validation_error("deer_spectrum: stick spectrum has zero weight");

  const double tau_us = model.tau_ns * 1e-3;
  Spectrum out;
  out.axis = linspace(sweep.min_mhz, sweep.max_mhz, sweep.points);
  out.axis_label = "frequency_mhz";
  out.channel = "signal_" + to_string(readout.channel);
  out.signal.reserve(out.axis.size());
  for (const double f : out.axis) {
    double flipped = 0.0;
    for (const auto& l : sticks.lines) {
      flipped += l.multiplicity * l.intensity *
                 flip_probability(f, l, model.omega_rf_mhz, model.t_rf_ns, model.lineshape);
    }
    const double p = flipped / wtot;
    const double echo = std::exp(-2.0 * model.mean_coupling_mhz * (2.0 * tau_us) * p);
    out.signal.push_back(readout_map(echo, readout, ReadoutInput::Echo));
  }
  out.validate();
  return out;
}

Spectrum broaden(const StickSpectrum& sticks, const LineshapeConfig& shape,
                 const SweepGrid& sweep) {
  shape.validate();
  sweep.validate();
  Spectrum out;
  out.axis = linspace(sweep.min_mhz, sweep.max_mhz, sweep.points);
  out.axis_label = "frequency_mhz";
  out.channel = "amplitude";
  out.signal.reserve(out.axis.size());
  for (const double f : out.axis) {
    double y = 0.0;
    for (const auto& l : sticks.lines) {
      y += l.multiplicity * l.intensity * shape.density(f - l.frequency_mhz);
    }
    out.signal.push_back(y);
  }
  out.validate();
  return out;
}

}  // namespace pcdeer
