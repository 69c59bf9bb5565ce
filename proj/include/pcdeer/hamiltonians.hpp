#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pcdeer/constants.hpp"
#include "pcdeer/spin_core.hpp"

namespace pcdeer {

struct FieldConfig {
  double magnitude_gauss = 78.6;
  Eigen::Vector3d direction = Eigen::Vector3d(1, 1, 1).normalized();  // lab frame

  void validate() const;
  Eigen::Vector3d unit_direction() const;
};

// One coupled nucleus: spin, axial hyperfine tensor about the defect axis,
// nuclear g-factor (Zeeman term) and optional quadrupole Q_perp about the axis.
struct NucleusCoupling {
  double spin = 1.0;
  double a_par_mhz = 0.0;
  double a_perp_mhz = 0.0;
  double g_n = 0.0;
  double q_perp_mhz = 0.0;
};

struct SpinSpecies {
  std::string name;
  double electron_spin = 0.5;
  double g = kGFactorElectron;
  double zero_field_d_mhz = 0.0;  // S=1 zero-field splitting (NV only)
  std::vector<NucleusCoupling> nuclei;  // tensor order: electron (x) nuclei in list order

  static SpinSpecies nv();
  static SpinSpecies p1();
  static SpinSpecies nvh();

  int dimension() const;
  std::vector<int> level_dims() const;   // multiplicities, electron first
  std::vector<double> level_spins() const;
};

// The four <111> axes; index 0 is (1,1,1)/sqrt(3).
struct OrientationSet {
  std::array<Eigen::Vector3d, 4> axes;
  // true where |axis . b| is maximal within 1e-9 of 1 (field-aligned).
  std::array<bool, 4> axial_for(const FieldConfig& field) const;
};

OrientationSet orientation_axes();

// Generic spin Hamiltonian for a species at the given field and symmetry axis:
// electron Zeeman + zero-field D (S=1) + per-nucleus axial hyperfine,
// nuclear Zeeman and traceless quadrupole. Units MHz (H/h).
Operator build_species_hamiltonian(const SpinSpecies& species, const FieldConfig& field,
                                   const Eigen::Vector3d& axis);

// NV ground-state triplet: D Sz'^2 + g mu_B/h B.S (3x3).
Operator build_nv_gs(const FieldConfig& field, const Eigen::Vector3d& axis,
                     double d_mhz = kNvZeroFieldSplittingMHz);

// P1: S=1/2 electron with I=1 14N (6x6), default tensor values.
Operator build_p1(const FieldConfig& field, const Eigen::Vector3d& axis);
Operator build_p1(const FieldConfig& field, const Eigen::Vector3d& axis,
                  const SpinSpecies& species);

// NVH-: S=1/2 with I(H)=1/2 and I(N)=1 (12x12).
Operator build_nvh(const FieldConfig& field, const Eigen::Vector3d& axis);
Operator build_nvh(const FieldConfig& field, const Eigen::Vector3d& axis,
                   const SpinSpecies& species);

// Field magnitude from the two aligned-NV transition frequencies:
// B = (f_plus - f_minus) / (2 g mu_B/h). Requires f_plus > f_minus > 0.
double calibrate_field(double f_plus_mhz, double f_minus_mhz, double g = kGFactorElectron);

// Electron spin operator along v, embedded in the full species space.
Operator electron_vector_operator(const SpinSpecies& species, const Eigen::Vector3d& v);

}  // namespace pcdeer
