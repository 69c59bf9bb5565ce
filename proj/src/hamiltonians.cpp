#include "pcdeer/hamiltonians.hpp"

#include <cmath>

namespace pcdeer {

void FieldConfig::validate() const {
  if (magnitude_gauss < 0) throw validation_error("field magnitude must be >= 0 G");
  if (std::abs(direction.norm() - 1.0) > 1e-12 && direction.norm() < 1e-12) {
    throw validation_error("field direction must be a nonzero vector");
  }
}

Eigen::Vector3d FieldConfig::unit_direction() const {
  const double n = direction.norm();
  if (n < 1e-12) throw validation_error("field direction must be a nonzero vector");
  return direction / n;
}

SpinSpecies SpinSpecies::nv() {
  SpinSpecies s;
  s.name = "nv";
  s.electron_spin = 1.0;
  s.g = kGFactorElectron;
  s.zero_field_d_mhz = kNvZeroFieldSplittingMHz;
  return s;
}

SpinSpecies SpinSpecies::p1() {
  SpinSpecies s;
  s.name = "p1";
  s.electron_spin = 0.5;
  s.g = kGFactorElectron;
  s.nuclei = {NucleusCoupling{1.0, kP1AParMHz, kP1APerpMHz, kGFactor14N, kP1QPerpMHz}};
  return s;
}

SpinSpecies SpinSpecies::nvh() {
  SpinSpecies s;
  s.name = "nvh";
  s.electron_spin = 0.5;
  s.g = kGFactorElectron;
  // Order: hydrogen first, then nitrogen. No nuclear Zeeman or quadrupole terms.
  s.nuclei = {NucleusCoupling{0.5, kNvhAHParMHz, kNvhAHPerpMHz, 0.0, 0.0},
              NucleusCoupling{1.0, kNvhANParMHz, kNvhANPerpMHz, 0.0, 0.0}};
  return s;
}

std::vector<int> SpinSpecies::level_dims() const {
  std::vector<int> dims;
  dims.push_back(static_cast<int>(std::round(2 * electron_spin)) + 1);
  for (const auto& n : nuclei) dims.push_back(static_cast<int>(std::round(2 * n.spin)) + 1);
  return dims;
}

std::vector<double> SpinSpecies::level_spins() const {
  std::vector<double> spins{electron_spin};
  for (const auto& n : nuclei) spins.push_back(n.spin);
  return spins;
}

int SpinSpecies::dimension() const {
  int d = 1;
  for (int m : level_dims()) d *= m;
  return d;
}

OrientationSet orientation_axes() {
  const double r = 1.0 / std::sqrt(3.0);
  OrientationSet set;
  set.axes = {Eigen::Vector3d(r, r, r), Eigen::Vector3d(r, -r, -r),
              Eigen::Vector3d(-r, r, -r), Eigen::Vector3d(-r, -r, r)};
  return set;
}

std::array<bool, 4> OrientationSet::axial_for(const FieldConfig& field) const {
  const Eigen::Vector3d b = field.unit_direction();
  std::array<bool, 4> out{};
  for (int k = 0; k < 4; ++k) out[k] = std::abs(std::abs(axes[k].dot(b)) - 1.0) < 1e-9;
  return out;
}

namespace {

// Spin vector operators for level `which` embedded in the full product space.
std::array<Operator, 3> embedded_spin(const std::vector<int>& dims,
                                      const std::vector<double>& spins, int which) {
  const SpinOperators ops = spin_operators(spins[which]);
  std::array<Operator, 3> full = {Operator::Ones(1, 1), Operator::Ones(1, 1),
                                  Operator::Ones(1, 1)};
  for (size_t k = 0; k < dims.size(); ++k) {
    const Operator id = identity(dims[k]);
    full[0] = kron(full[0], static_cast<int>(k) == which ? ops.sx : id);
    full[1] = kron(full[1], static_cast<int>(k) == which ? ops.sy : id);
    full[2] = kron(full[2], static_cast<int>(k) == which ? ops.sz : id);
  }
  return full;
}

Operator dot(const Eigen::Vector3d& v, const std::array<Operator, 3>& s) {
  return v.x() * s[0] + v.y() * s[1] + v.z() * s[2];
}

}  // namespace

Operator electron_vector_operator(const SpinSpecies& species, const Eigen::Vector3d& v) {
  return dot(v, embedded_spin(species.level_dims(), species.level_spins(), 0));
}

Operator build_species_hamiltonian(const SpinSpecies& species, const FieldConfig& field,
                                   const Eigen::Vector3d& axis) {
  field.validate();
  if (axis.norm() < 1e-12) throw validation_error("symmetry axis must be a nonzero vector");
  const Eigen::Vector3d n = axis.normalized();
  const Eigen::Vector3d b = field.unit_direction();
  const double bmag = field.magnitude_gauss;

  const auto dims = species.level_dims();
  const auto spins = species.level_spins();
  const int dim = species.dimension();

  const auto s_e = embedded_spin(dims, spins, 0);
  Operator h = Operator::Zero(dim, dim);

  // Electron Zeeman.
  h += electron_gyromagnetic_mhz_per_gauss(species.g) * bmag * dot(b, s_e);

  // Zero-field splitting D (S z')^2 for triplet species.
  if (species.zero_field_d_mhz != 0.0) {
    const Operator n_s = dot(n, s_e);
    h += species.zero_field_d_mhz * n_s * n_s;
  }

  for (size_t j = 0; j < species.nuclei.size(); ++j) {
    const NucleusCoupling& nuc = species.nuclei[j];
    const auto s_i = embedded_spin(dims, spins, static_cast<int>(j) + 1);

    // Nuclear Zeeman.
    if (nuc.g_n != 0.0) {
      h += nuc.g_n * kMuNuclearMHzPerGauss * bmag * dot(b, s_i);
    }

    // Axial hyperfine about n: A_perp S.I + (A_par - A_perp)(n.S)(n.I).
    if (nuc.a_par_mhz != 0.0 || nuc.a_perp_mhz != 0.0) {
      h += nuc.a_perp_mhz * (s_e[0] * s_i[0] + s_e[1] * s_i[1] + s_e[2] * s_i[2]);
      h += (nuc.a_par_mhz - nuc.a_perp_mhz) * dot(n, s_e) * dot(n, s_i);
    }

    // Traceless quadrupole Q_perp ((n.I)^2 - I(I+1)/3).
    if (nuc.q_perp_mhz != 0.0) {
      const Operator n_i = dot(n, s_i);
      const double casimir = nuc.spin * (nuc.spin + 1.0) / 3.0;
      h += nuc.q_perp_mhz * (n_i * n_i - casimir * identity(dim));
    }
  }

  if (!is_hermitian(h, 1e-12) && h.cwiseAbs().maxCoeff() > 0) {
    throw contract_error("build_species_hamiltonian: result not Hermitian");
  }
  return h;
}

Operator build_nv_gs(const FieldConfig& field, const Eigen::Vector3d& axis, double d_mhz) {
  SpinSpecies s = SpinSpecies::nv();
  s.zero_field_d_mhz = d_mhz;
  return build_species_hamiltonian(s, field, axis);
}

Operator build_p1(const FieldConfig& field, const Eigen::Vector3d& axis) {
  return build_species_hamiltonian(SpinSpecies::p1(), field, axis);
}

Operator build_p1(const FieldConfig& field, const Eigen::Vector3d& axis,
                  const SpinSpecies& species) {
  return build_species_hamiltonian(species, field, axis);
}

Operator build_nvh(const FieldConfig& field, const Eigen::Vector3d& axis) {
  return build_species_hamiltonian(SpinSpecies::nvh(), field, axis);
}

Operator build_nvh(const FieldConfig& field, const Eigen::Vector3d& axis,
                   const SpinSpecies& species) {
  return build_species_hamiltonian(species, field, axis);
}

double calibrate_field(double f_plus_mhz, double f_minus_mhz, double g) {
  if (f_minus_mhz <= 0 || f_plus_mhz <= 0) {
    throw validation_error("calibrate_field: frequencies must be positive");
  }
  if (f_plus_mhz < f_minus_mhz) {
    throw validation_error("calibrate_field: f_plus must be >= f_minus");
  }
  return (f_plus_mhz - f_minus_mhz) / (2.0 * electron_gyromagnetic_mhz_per_gauss(g));
}

}  // namespace pcdeer
