#include "pcdeer/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pcdeer {

std::string to_string(LineGroup g) {
  switch (g) {
    case LineGroup::I: return "I";
    case LineGroup::II: return "II";
    case LineGroup::III: return "III";
    case LineGroup::IV: return "IV";
    case LineGroup::V: return "V";
    case LineGroup::NvhLow: return "NVH-low";
    case LineGroup::NvhHigh: return "NVH-high";
    case LineGroup::Ungrouped: return "ungrouped";
  }
  return "ungrouped";
}

namespace {

// Two orthonormal directions spanning the plane perpendicular to v.
std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse_pair(const Eigen::Vector3d& v) {
  const Eigen::Vector3d b = v.normalized();
  const Eigen::Vector3d seed =
      std::abs(b.x()) < 0.9 ? Eigen::Vector3d(1, 0, 0) : Eigen::Vector3d(0, 1, 0);
  const Eigen::Vector3d a1 = b.cross(seed).normalized();
  return {a1, b.cross(a1)};
}

// Eigenbasis of v.S for one spin, columns ordered m = s..-s descending.
Eigen::MatrixXcd quantization_columns(double s, const Eigen::Vector3d& v) {
  const SpinOperators ops = spin_operators(s);
  const Operator proj = v.x() * ops.sx + v.y() * ops.sy + v.z() * ops.sz;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(proj);
  // SelfAdjointEigenSolver sorts ascending; we want m descending.
  const Eigen::Index n = solver.eigenvalues().size();
  Eigen::MatrixXcd cols(n, n);
  for (Eigen::Index k = 0; k < n; ++k) cols.col(k) = solver.eigenvectors().col(n - 1 - k);
  return cols;
}

std::vector<double> label_values(double s) {
  const int dim = static_cast<int>(std::round(2 * s)) + 1;
  std::vector<double> v(dim);
  for (int k = 0; k < dim; ++k) v[k] = s - k;
  return v;
}

LevelLabel make_label(int basis_index, const std::vector<int>& dims,
                      const std::vector<double>& spins, bool ambiguous) {
  LevelLabel lab;
  lab.basis_index = basis_index;
  lab.ambiguous = ambiguous;
  std::vector<double> qs(dims.size());
  int k = basis_index;
  for (int lev = static_cast<int>(dims.size()) - 1; lev >= 0; --lev) {
    qs[lev] = spins[lev] - (k % dims[lev]);
    k /= dims[lev];
  }
  lab.m_s = qs[0];
  lab.m_nuc.assign(qs.begin() + 1, qs.end());
  return lab;
}

struct LineTable {
  std::vector<TransitionLine> lines;
};

// Core line extraction shared by transition_lines and stick_spectrum: the
// intensity of pair (i,f) is the mean of |<f|D|i>|^2 over the given drives.
std::vector<TransitionLine> extract_lines(const EigenSystem& eig,
                                          const std::vector<Operator>& drives,
                                          double threshold, const Eigen::MatrixXcd& basis,
                                          const std::vector<int>& dims,
                                          const std::vector<double>& spins) {
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw validation_error("transition threshold must lie in (0,1)");
  }
  const Eigen::Index n = eig.energies.size();
  Eigen::MatrixXd inten = Eigen::MatrixXd::Zero(n, n);
  for (const Operator& d : drives) {
    const Eigen::MatrixXcd m = eig.states.adjoint() * d * eig.states;
    inten += m.cwiseAbs2();
  }
  inten /= static_cast<double>(drives.size());

  // Dominant label per eigenvector in the labeling frame.
  const Eigen::MatrixXd overlap = (basis.adjoint() * eig.states).cwiseAbs2();
  std::vector<LevelLabel> labels(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index best = 0;
    overlap.col(j).maxCoeff(&best);
    bool ambiguous = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != best && std::abs(overlap(k, j) - overlap(best, j)) < 1e-9) ambiguous = true;
    }
    labels[j] = make_label(static_cast<int>(best), dims, spins, ambiguous);
  }

  double max_inten = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index f = 0; f < n; ++f)
      if (eig.energies[f] - eig.energies[i] > 1e-9) max_inten = std::max(max_inten, inten(f, i));

  std::vector<TransitionLine> out;
  if (max_inten <= 0.0) return out;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index f = 0; f < n; ++f) {
      const double freq = eig.energies[f] - eig.energies[i];
      if (freq <= 1e-9) continue;
      const double rel = inten(f, i) / max_inten;
      if (rel < threshold) continue;
      TransitionLine line;
      line.frequency_mhz = freq;
      line.intensity = rel;
      line.lower = labels[i];
      line.upper = labels[f];
      out.push_back(std::move(line));
    }
  }
  std::sort(out.begin(), out.end(), [](const TransitionLine& a, const TransitionLine& b) {
    if (a.frequency_mhz != b.frequency_mhz) return a.frequency_mhz < b.frequency_mhz;
    return a.intensity > b.intensity;
  });
  return out;
}

std::vector<int> trivial_dims(Eigen::Index n) { return {static_cast<int>(n)}; }

std::vector<double> trivial_spins(Eigen::Index n) {
  return {(static_cast<double>(n) - 1.0) / 2.0};
}

// Hyperfine field direction seen by the nucleus for m_s = +1/2: A . b.
Eigen::Vector3d nuclear_label_axis(const NucleusCoupling& nuc, const Eigen::Vector3d& b,
                                   const Eigen::Vector3d& axis) {
  const Eigen::Vector3d u =
      nuc.a_perp_mhz * b + (nuc.a_par_mhz - nuc.a_perp_mhz) * axis.dot(b) * axis;
  if (u.norm() > 1e-9) return u.normalized();
  return b;
}

}  // namespace

Eigen::MatrixXcd label_basis(const SpinSpecies& species, const FieldConfig& field,
                             const Eigen::Vector3d& axis) {
  const Eigen::Vector3d b = field.unit_direction();
  const Eigen::Vector3d n = axis.normalized();
  const double zeeman = electron_gyromagnetic_mhz_per_gauss(species.g) * field.magnitude_gauss;
  // Electron labels follow the dominant quantization: defect axis when the
  // zero-field splitting wins, field direction otherwise.
  const Eigen::Vector3d e_axis = std::abs(species.zero_field_d_mhz) > zeeman ? n : b;

  Eigen::MatrixXcd w = quantization_columns(species.electron_spin, e_axis);
  for (const auto& nuc : species.nuclei) {
    w = kron(w, quantization_columns(nuc.spin, nuclear_label_axis(nuc, b, n)));
  }
  return w;
}

std::vector<TransitionLine> transition_lines(const EigenSystem& eig, const Operator& drive,
                                             double threshold) {
  const Eigen::Index n = eig.energies.size();
  return extract_lines(eig, {drive}, threshold,
                       Eigen::MatrixXcd::Identity(n, n), trivial_dims(n), trivial_spins(n));
}

std::vector<TransitionLine> transition_lines(const EigenSystem& eig, const Operator& drive,
                                             double threshold, const Eigen::MatrixXcd& basis) {
  const Eigen::Index n = eig.energies.size();
  return extract_lines(eig, {drive}, threshold, basis, trivial_dims(n), trivial_spins(n));
}

namespace {

bool is_esr_line(const TransitionLine& l) {
  if (l.lower.m_nuc.size() != l.upper.m_nuc.size()) return false;
  if (std::abs(std::abs(l.upper.m_s - l.lower.m_s) - 1.0) > 0.25) return false;
  for (size_t k = 0; k < l.lower.m_nuc.size(); ++k) {
    if (std::abs(l.upper.m_nuc[k] - l.lower.m_nuc[k]) > 0.25) return false;
  }
  return true;
}

// The unique ESR line with nuclear label mi, or nullptr.
const TransitionLine* find_p1_line(const std::vector<TransitionLine>& lines, double mi) {
  const TransitionLine* found = nullptr;
  for (const auto& l : lines) {
    if (!is_esr_line(l)) continue;
    if (std::abs(l.lower.m_i() - mi) > 0.25) continue;
    if (!found || l.intensity > found->intensity) found = &l;
  }
  return found;
}

}  // namespace

StickSpectrum p1_groups(const std::vector<TransitionLine>& lines_axial,
                        const std::vector<TransitionLine>& lines_nonaxial) {
  struct Slot {
    const std::vector<TransitionLine>* src;
    double mi;
    LineGroup group;
    int multiplicity;
    const char* desc;
  };
  const std::array<Slot, 6> slots = {{
      {&lines_axial, -1.0, LineGroup::I, 1, "axial mI=-1 (group I)"},
      {&lines_nonaxial, -1.0, LineGroup::II, 3, "non-axial mI=-1 (group II)"},
      {&lines_axial, 0.0, LineGroup::III, 1, "axial mI=0 (group III)"},
      {&lines_nonaxial, 0.0, LineGroup::III, 3, "non-axial mI=0 (group III)"},
      {&lines_nonaxial, 1.0, LineGroup::IV, 3, "non-axial mI=+1 (group IV)"},
      {&lines_axial, 1.0, LineGroup::V, 1, "axial mI=+1 (group V)"},
  }};

  StickSpectrum spec;
  spec.species = "p1";
  std::vector<std::string> missing;
  double f3_axial = 0.0, f3_nonaxial = 0.0;
  for (const auto& slot : slots) {
    const TransitionLine* l = find_p1_line(*slot.src, slot.mi);
    if (!l) {
      missing.emplace_back(slot.desc);
      continue;
    }
    TransitionLine tagged = *l;
    tagged.group = slot.group;
    tagged.multiplicity = slot.multiplicity;
    if (slot.group == LineGroup::III) {
      (slot.multiplicity == 1 ? f3_axial : f3_nonaxial) = l->frequency_mhz;
    }
    spec.lines.push_back(std::move(tagged));
  }
  if (!missing.empty()) {
    std::ostringstream oss;
    oss << "p1_groups: incomplete groups, expected lines missing (below threshold?):";
    for (const auto& m : missing) oss << " [" << m << "]";
    throw validation_error(oss.str());
  }
  spec.group3_offset_mhz = std::abs(f3_axial - f3_nonaxial);
  std::sort(spec.lines.begin(), spec.lines.end(),
            [](const TransitionLine& a, const TransitionLine& b) {
              return a.frequency_mhz < b.frequency_mhz;
            });
  return spec;
}

namespace {

std::vector<TransitionLine> species_lines(const SpinSpecies& species, const FieldConfig& field,
                                          const Eigen::Vector3d& axis, double threshold) {
  const Operator h = build_species_hamiltonian(species, field, axis);
  const EigenSystem eig = eigh(h);
  const auto [a1, a2] = transverse_pair(field.unit_direction());
  const std::vector<Operator> drives = {electron_vector_operator(species, a1),
                                        electron_vector_operator(species, a2)};
  return extract_lines(eig, drives, threshold, label_basis(species, field, axis),
                       species.level_dims(), species.level_spins());
}

// Tag each orientation class's lines as NVH-low/high by the hydrogen label
// whose lines sit lower in frequency within that class.
void tag_nvh_clusters(std::vector<TransitionLine>& lines) {
  double sum_up = 0, sum_dn = 0;
  int n_up = 0, n_dn = 0;
  for (const auto& l : lines) {
    if (l.lower.m_i() > 0) {
      sum_up += l.frequency_mhz;
      ++n_up;
    } else {
      sum_dn += l.frequency_mhz;
      ++n_dn;
    }
  }
  if (n_up == 0 || n_dn == 0) {
    for (auto& l : lines) l.group = LineGroup::Ungrouped;
    return;
  }
  const bool up_is_low = sum_up / n_up < sum_dn / n_dn;
  for (auto& l : lines) {
    const bool up = l.lower.m_i() > 0;
    l.group = (up == up_is_low) ? LineGroup::NvhLow : LineGroup::NvhHigh;
  }
}

}  // namespace

StickSpectrum stick_spectrum(const SpinSpecies& species, const FieldConfig& field,
                             double threshold) {
  field.validate();
  const OrientationSet orient = orientation_axes();
  const auto axial = orient.axial_for(field);
  const int n_axial = static_cast<int>(std::count(axial.begin(), axial.end(), true));

  StickSpectrum spec;
  spec.species = species.name;
  spec.field = field;

  if (n_axial == 1) {
    int ax_idx = 0, na_idx = 0;
    for (int k = 0; k < 4; ++k) {
      if (axial[k]) ax_idx = k;
    }
    for (int k = 0; k < 4; ++k) {
      if (!axial[k]) {
        na_idx = k;
        break;
      }
    }
    // The three non-axial orientations share the field projection, hence one
    // representative with multiplicity 3.
    auto ax_lines = species_lines(species, field, orient.axes[ax_idx], threshold);
    auto na_lines = species_lines(species, field, orient.axes[na_idx], threshold);

    if (species.name == "p1") {
      StickSpectrum grouped = p1_groups(ax_lines, na_lines);
      grouped.field = field;
      // Keep any further above-threshold lines (forbidden character) as
      // ungrouped entries rather than dropping them.
      auto add_leftovers = [&grouped](const std::vector<TransitionLine>& src, int mult) {
        for (const auto& l : src) {
          const bool taken = std::any_of(
              grouped.lines.begin(), grouped.lines.end(), [&](const TransitionLine& g) {
                return g.multiplicity == mult &&
                       std::abs(g.frequency_mhz - l.frequency_mhz) < 1e-12 &&
                       g.lower.basis_index == l.lower.basis_index &&
                       g.upper.basis_index == l.upper.basis_index;
              });
          if (!taken) {
            TransitionLine extra = l;
            extra.multiplicity = mult;
            extra.group = LineGroup::Ungrouped;
            grouped.lines.push_back(std::move(extra));
          }
        }
      };
      add_leftovers(ax_lines, 1);
      add_leftovers(na_lines, 3);
      std::sort(grouped.lines.begin(), grouped.lines.end(),
                [](const TransitionLine& a, const TransitionLine& b) {
                  if (a.frequency_mhz != b.frequency_mhz)
                    return a.frequency_mhz < b.frequency_mhz;
                  return a.multiplicity < b.multiplicity;
                });
      return grouped;
    }
    for (auto& l : ax_lines) l.multiplicity = 1;
    for (auto& l : na_lines) l.multiplicity = 3;
    if (species.name == "nvh") {
      tag_nvh_clusters(ax_lines);
      tag_nvh_clusters(na_lines);
    }
    spec.lines = std::move(ax_lines);
    spec.lines.insert(spec.lines.end(), na_lines.begin(), na_lines.end());
  } else {
    for (int k = 0; k < 4; ++k) {
      auto lines = species_lines(species, field, orient.axes[k], threshold);
      for (auto& l : lines) l.multiplicity = 1;
      spec.lines.insert(spec.lines.end(), lines.begin(), lines.end());
    }
  }

  std::sort(spec.lines.begin(), spec.lines.end(),
            [](const TransitionLine& a, const TransitionLine& b) {
              if (a.frequency_mhz != b.frequency_mhz) return a.frequency_mhz < b.frequency_mhz;
              return a.multiplicity < b.multiplicity;
            });
  return spec;
}

}  // namespace pcdeer
