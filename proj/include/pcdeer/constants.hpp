#pragma once

namespace pcdeer {

// Energy unit is MHz throughout (Hamiltonians are H/h); field unit is Gauss,
// durations are ns at API boundaries and us internally.
inline constexpr double kMuBohrMHzPerGauss = 1.3996245;     // mu_B/h
inline constexpr double kMuNuclearMHzPerGauss = 7.6226e-4;  // mu_N/h
inline constexpr double kGFactor14N = 0.40376;
inline constexpr double kGFactorElectron = 2.0024;

// NV ground-state zero-field splitting (literature value, configurable).
inline constexpr double kNvZeroFieldSplittingMHz = 2870.0;

// P1 (substitutional nitrogen): axial 14N hyperfine + quadrupole.
inline constexpr double kP1AParMHz = 114.0;
inline constexpr double kP1APerpMHz = 81.0;
inline constexpr double kP1QPerpMHz = -3.97;

// NVH-: hydrogen and nitrogen hyperfine couplings.
inline constexpr double kNvhAHParMHz = 13.69;
inline constexpr double kNvhAHPerpMHz = -9.05;
inline constexpr double kNvhANParMHz = 2.94;
inline constexpr double kNvhANPerpMHz = 3.1;

inline double electron_gyromagnetic_mhz_per_gauss(double g) {
  return g * kMuBohrMHzPerGauss;
}

}  // namespace pcdeer
