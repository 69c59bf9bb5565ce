#pragma once

#include <string>
#include <vector>

#include "pcdeer/errors.hpp"

namespace pcdeer {

// Sampled (axis, signal) series; axis strictly increasing.
struct Spectrum {
  std::vector<double> axis;
  std::vector<double> signal;
  std::string axis_label;  // e.g. "frequency_mhz", "time_ns"
  std::string channel;     // e.g. "signal_pc", "population", "amplitude"

  void validate() const {
    if (axis.size() != signal.size()) {
      throw contract_error("spectrum: axis and signal lengths differ");
    }
    for (size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) {
        throw contract_error("spectrum: axis must be strictly increasing");
      }
    }
  }
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw validation_error("linspace: need at least 2 points");
  if (!(hi > lo)) throw validation_error("linspace: max must exceed min");
  std::vector<double> v(n);
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) v[i] = lo + step * i;
  v.back() = hi;
  return v;
}

}  // namespace pcdeer
