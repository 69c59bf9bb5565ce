#include "pcdeer/spin_core.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace pcdeer {

using std::complex;

SpinOperators spin_operators(double s) {
  const double two_s = 2.0 * s;
  const double rounded = std::round(two_s);
  if (s < 0 || std::abs(two_s - rounded) > 1e-9) {
    throw validation_error("spin_operators: s must be a non-negative half-integer, got " +
                           std::to_string(s));
  }
  const int dim = static_cast<int>(rounded) + 1;
  Operator sp = Operator::Zero(dim, dim);
  Operator sz = Operator::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = s - k;
    sz(k, k) = m;
    if (k > 0) {
      // <s,m+1| S+ |s,m>
      sp(k - 1, k) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
  }
  const Operator sm = sp.adjoint();
  SpinOperators ops;
  ops.sx = 0.5 * (sp + sm);
  ops.sy = complex<double>(0, -0.5) * (sp - sm);
  ops.sz = sz;
  return ops;
}

Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  Operator out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j)
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

double hermiticity_defect(const Operator& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const Operator& h, double rel_tol) {
  return hermiticity_defect(h) < rel_tol;
}

EigenSystem eigh(const Operator& h) {
  if (h.rows() != h.cols()) throw contract_error("eigh: operator is not square");
  if (!is_hermitian(h, 1e-10)) {
    throw contract_error("eigh: operator is not Hermitian (defect " +
                         std::to_string(hermiticity_defect(h)) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (h + h.adjoint()));
  if (solver.info() != Eigen::Success) throw contract_error("eigh: eigensolver failed");
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

DensityMatrix DensityMatrix::checked(Eigen::MatrixXcd m) {
  if (m.rows() != m.cols()) throw validation_error("density matrix must be square");
  if (!is_hermitian(m, 1e-10)) throw validation_error("density matrix must be Hermitian");
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-12) {
    throw validation_error("density matrix trace must be 1, got " + std::to_string(tr));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (m + m.adjoint()));
  if (solver.eigenvalues().minCoeff() < -1e-12) {
    throw validation_error("density matrix has negative eigenvalue " +
                           std::to_string(solver.eigenvalues().minCoeff()));
  }
  return DensityMatrix{std::move(m)};
}

DensityMatrix DensityMatrix::pure_state(int dim, int basis_index) {
  if (basis_index < 0 || basis_index >= dim) {
    throw validation_error("pure_state: basis index out of range");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  m(basis_index, basis_index) = 1.0;
  return DensityMatrix{std::move(m)};
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix{Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim)};
}

Operator evolution_operator(const EigenSystem& es, double t_ns) {
  if (t_ns < 0) throw validation_error("propagate: negative duration");
  const double t_us = t_ns * 1e-3;
  const Eigen::Index n = es.energies.size();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double phi = -2.0 * M_PI * es.energies[k] * t_us;
    phases[k] = complex<double>(std::cos(phi), std::sin(phi));
  }
  return es.states * phases.asDiagonal() * es.states.adjoint();
}

Operator evolution_operator(const Operator& h_mhz, double t_ns) {
  return evolution_operator(eigh(h_mhz), t_ns);
}

DensityMatrix propagate(const EigenSystem& es, double t_ns, const DensityMatrix& rho) {
  const Operator u = evolution_operator(es, t_ns);
  return DensityMatrix{u * rho.rho * u.adjoint()};
}

DensityMatrix propagate(const Operator& h_mhz, double t_ns, const DensityMatrix& rho) {
  if (h_mhz.rows() != rho.rho.rows()) {
    throw validation_error("propagate: dimension mismatch between H and rho");
  }
  return propagate(eigh(h_mhz), t_ns, rho);
}

}  // namespace pcdeer
