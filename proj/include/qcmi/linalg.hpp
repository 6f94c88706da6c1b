#pragma once

// Dense complex Hermitian linear algebra on top of Eigen.
//
// Everything here is a free function over Eigen expressions, templated on
// the scalar type. Downstream modules use the double-precision aliases.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace qcmi {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealVector = RVector<double>;
using Complex = std::complex<double>;

/// Largest tolerated max-abs entry of H - H^dagger before eigh refuses.
inline constexpr double kHermitianTolerance = 1e-9;
/// Support cutoff relative to the largest eigenvalue magnitude.
inline constexpr double kRelativeCutoff = 1e-10;

/// Raised for inputs that violate a numerical precondition (shape,
/// Hermiticity, positivity, normalization).
class NumericError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Real>
struct Spectrum {
  RVector<Real> eigenvalues;   // ascending
  CMatrix<Real> eigenvectors;  // unitary, eigenvectors in columns

  Eigen::Index size() const { return eigenvalues.size(); }

  CMatrix<Real> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<std::complex<Real>>().asDiagonal() *
           eigenvectors.adjoint();
  }

  Real max_abs() const {
    return size() == 0 ? Real(0) : eigenvalues.cwiseAbs().maxCoeff();
  }

  /// Scale-invariant support cutoff: kRelativeCutoff times the spectral radius.
  Real default_cutoff() const { return Real(kRelativeCutoff) * max_abs(); }
};

namespace detail {

template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw NumericError(os.str());
  }
}

}  // namespace detail

template <typename Derived>
detail::RealOf<Derived> hermitian_asymmetry(const Eigen::MatrixBase<Derived>& m) {
  using Real = detail::RealOf<Derived>;
  detail::require_square(m, "hermitian_asymmetry");
  if (m.size() == 0) return Real(0);
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// (H + H^dagger) / 2, after checking the asymmetry is below `tolerance`.
template <typename Derived>
CMatrix<detail::RealOf<Derived>> symmetrized(const Eigen::MatrixBase<Derived>& h,
                                            double tolerance = kHermitianTolerance) {
  using Real = detail::RealOf<Derived>;
  const Real asym = hermitian_asymmetry(h);
  if (!(asym <= Real(tolerance))) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |H - H^dagger| = " << asym << " exceeds "
       << tolerance;
    throw NumericError(os.str());
  }
  CMatrix<Real> c = h.template cast<std::complex<Real>>();
  return (c + c.adjoint()) / Real(2);
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending.
template <typename Derived>
Spectrum<detail::RealOf<Derived>> eigh(const Eigen::MatrixBase<Derived>& h) {
  using Real = detail::RealOf<Derived>;
  CMatrix<Real> sym = symmetrized(h);
  Spectrum<Real> out;
  if (sym.size() == 0) {
    out.eigenvalues.resize(0);
    out.eigenvectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(sym, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigh: eigensolver failed to converge");
  }
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  return out;
}

/// Applies `f` to the eigenvalues strictly above `cutoff`; the rest map to 0.
template <typename Real, typename F>
CMatrix<Real> matrix_function(const Spectrum<Real>& spec, F&& f, Real cutoff) {
  const Eigen::Index n = spec.size();
  RVector<Real> mapped(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real x = spec.eigenvalues(i);
    mapped(i) = x > cutoff ? Real(f(x)) : Real(0);
  }
  return spec.eigenvectors * mapped.template cast<std::complex<Real>>().asDiagonal() *
         spec.eigenvectors.adjoint();
}

template <typename Derived, typename F>
CMatrix<detail::RealOf<Derived>> matrix_function(const Eigen::MatrixBase<Derived>& h, F&& f,
                                                 detail::RealOf<Derived> cutoff) {
  if (cutoff < 0) throw NumericError("matrix_function: cutoff must be >= 0");
  return matrix_function(eigh(h), std::forward<F>(f), cutoff);
}

/// Same, with the default relative support cutoff.
template <typename Derived, typename F>
CMatrix<detail::RealOf<Derived>> matrix_function(const Eigen::MatrixBase<Derived>& h, F&& f) {
  const auto spec = eigh(h);
  return matrix_function(spec, std::forward<F>(f), spec.default_cutoff());
}

template <typename Real>
CMatrix<Real> sqrtm_psd(const Spectrum<Real>& spec) {
  return matrix_function(spec, [](Real x) { return std::sqrt(x); }, spec.default_cutoff());
}

template <typename Derived>
CMatrix<detail::RealOf<Derived>> sqrtm_psd(const Eigen::MatrixBase<Derived>& h) {
  return sqrtm_psd(eigh(h));
}

/// Pseudo-inverse square root on the support.
template <typename Derived>
CMatrix<detail::RealOf<Derived>> inv_sqrtm_psd(const Eigen::MatrixBase<Derived>& h) {
  using Real = detail::RealOf<Derived>;
  return matrix_function(h, [](Real x) { return Real(1) / std::sqrt(x); });
}

/// Orthogonal projector onto the eigenvectors above the cutoff.
template <typename Real>
CMatrix<Real> support_projector(const Spectrum<Real>& spec, Real cutoff) {
  return matrix_function(spec, [](Real) { return Real(1); }, cutoff);
}

template <typename Real>
Eigen::Index support_rank(const Spectrum<Real>& spec, Real cutoff) {
  return (spec.eigenvalues.array() > cutoff).count();
}

/// Sum of singular values.
template <typename Derived>
detail::RealOf<Derived> trace_norm(const Eigen::MatrixBase<Derived>& a) {
  using Real = detail::RealOf<Derived>;
  detail::require_square(a, "trace_norm");
  if (a.size() == 0) return Real(0);
  CMatrix<Real> c = a.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMatrix<Real>> svd(c);
  return svd.singularValues().sum();
}

template <typename Derived>
detail::RealOf<Derived> min_eigenvalue(const Eigen::MatrixBase<Derived>& h) {
  return eigh(h).eigenvalues(0);
}

template <typename A, typename B>
CMatrix<detail::RealOf<A>> kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Real = detail::RealOf<A>;
  CMatrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          std::complex<Real>(a(i, j)) * b.template cast<std::complex<Real>>();
    }
  }
  return out;
}

/// Relative Frobenius distance ||a - b||_F / max(||b||_F, tiny).
template <typename A, typename B>
detail::RealOf<A> relative_frobenius(const Eigen::MatrixBase<A>& a,
                                     const Eigen::MatrixBase<B>& b) {
  using Real = detail::RealOf<A>;
  const Real denom = std::max<Real>(b.norm(), std::numeric_limits<Real>::min());
  return (a - b).norm() / denom;
}

}  // namespace qcmi
