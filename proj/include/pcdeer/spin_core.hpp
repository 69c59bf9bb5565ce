#pragma once

#include <Eigen/Dense>

#include "pcdeer/errors.hpp"

namespace pcdeer {

// Dense complex operator on a finite spin space. Hamiltonian-role operators
// are Hermitian and carry units of MHz (H/h convention).
using Operator = Eigen::MatrixXcd;

struct SpinOperators {
  Operator sx, sy, sz;
};

// Standard angular-momentum matrices in the |s,m> basis, m = s..-s descending.
// Throws validation_error unless 2s is a non-negative integer.
SpinOperators spin_operators(double s);

Operator kron(const Operator& a, const Operator& b);

inline Operator identity(int dim) { return Operator::Identity(dim, dim); }

// max |H - H^dagger| relative to max |H|.
double hermiticity_defect(const Operator& h);
bool is_hermitian(const Operator& h, double rel_tol = 1e-12);

struct EigenSystem {
  Eigen::VectorXd energies;  // ascending, MHz
  Eigen::MatrixXcd states;   // orthonormal columns
};

// Hermitian eigendecomposition. Input checked Hermitian to 1e-10 relative;
// violation raises contract_error.
EigenSystem eigh(const Operator& h);

struct DensityMatrix {
  Eigen::MatrixXcd rho;

  int dim() const { return static_cast<int>(rho.rows()); }

  // Validates Hermiticity, unit trace (1e-12) and positivity (>= -1e-12).
  static DensityMatrix checked(Eigen::MatrixXcd m);
  static DensityMatrix pure_state(int dim, int basis_index);
  static DensityMatrix maximally_mixed(int dim);

  double trace_real() const { return rho.trace().real(); }
  double purity() const { return (rho * rho).trace().real(); }
};

// U = exp(-i 2 pi H t) with H in MHz and t in us.
Operator evolution_operator(const Operator& h_mhz, double t_ns);
Operator evolution_operator(const EigenSystem& es, double t_ns);

// rho' = U rho U^dagger. Negative duration raises validation_error.
DensityMatrix propagate(const Operator& h_mhz, double t_ns, const DensityMatrix& rho);
DensityMatrix propagate(const EigenSystem& es, double t_ns, const DensityMatrix& rho);

}  // namespace pcdeer
