#pragma once

#include <string>
#include <vector>

#include "pcdeer/hamiltonians.hpp"
#include "pcdeer/spin_core.hpp"

namespace pcdeer {

enum class LineGroup { I, II, III, IV, V, NvhLow, NvhHigh, Ungrouped };

std::string to_string(LineGroup g);

// Dominant-character label of an energy eigenstate. Quantum numbers are
// descriptive only: the electron is labeled along the field (or the defect
// axis when the zero-field splitting dominates), each nucleus along its
// hyperfine field direction.
struct LevelLabel {
  double m_s = 0.0;
  std::vector<double> m_nuc;  // order matches SpinSpecies::nuclei
  bool ambiguous = false;     // two basis overlaps tie within 1e-9
  int basis_index = 0;

  double m_i() const { return m_nuc.empty() ? 0.0 : m_nuc[0]; }
};

struct TransitionLine {
  double frequency_mhz = 0.0;
  double intensity = 0.0;  // |<f|drive|i>|^2, strongest line of the species = 1
  LevelLabel lower, upper;
  int multiplicity = 1;  // 1 axial, 3 non-axial
  LineGroup group = LineGroup::Ungrouped;
};

struct StickSpectrum {
  std::vector<TransitionLine> lines;  // sorted ascending by frequency
  std::string species;
  FieldConfig field;
  // Residual frequency offset between the merged group-III members (metadata).
  double group3_offset_mhz = 0.0;
};

// Unitary mapping label-basis states to the computational basis; column k is
// the product state with basis_index k (m descending per level).
Eigen::MatrixXcd label_basis(const SpinSpecies& species, const FieldConfig& field,
                             const Eigen::Vector3d& axis);

// All eigenstate pairs with positive frequency and relative drive intensity
// above `threshold` (fraction of the strongest matrix element squared).
// `basis` defines the labeling frame; identity = computational basis.
std::vector<TransitionLine> transition_lines(const EigenSystem& eig, const Operator& drive,
                                             double threshold = 0.05);
std::vector<TransitionLine> transition_lines(const EigenSystem& eig, const Operator& drive,
                                             double threshold,
                                             const Eigen::MatrixXcd& basis);

// Classify P1 lines into groups I-V from one axial and one non-axial
// orientation at the same field. Throws validation_error with an explicit
// report if an expected (orientation, mI) line is missing.
StickSpectrum p1_groups(const std::vector<TransitionLine>& lines_axial,
                        const std::vector<TransitionLine>& lines_nonaxial);

// Full orientation-resolved stick spectrum with multiplicity weights and
// group tags (P1 groups I-V, NVH hydrogen clusters). Intensities are averaged
// over the two transverse drive polarizations. The default threshold is
// raised above the transition_lines default so that nominally forbidden
// intermediate-field lines stay out of species-level spectra.
StickSpectrum stick_spectrum(const SpinSpecies& species, const FieldConfig& field,
                             double threshold = 0.15);

}  // namespace pcdeer
