#pragma once

// Reference computations written without the library's own routines: naive
// index loops, general (non-Hermitian) eigensolvers and closed-form scalars.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline double log2_safe(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

inline double h2(double p) { return -p * log2_safe(p) - (1.0 - p) * log2_safe(1.0 - p); }

/// Partial trace by contracting with basis vectors: sum_k (I (x) <k| (x) I) m (...).
inline Mat trace_middle(const Mat& m, std::size_t left, std::size_t mid, std::size_t right) {
  Mat out = Mat::Zero(left * right, left * right);
  for (std::size_t k = 0; k < mid; ++k) {
    Mat proj = Mat::Zero(left * right, left * mid * right);
    for (std::size_t a = 0; a < left; ++a) {
      for (std::size_t c = 0; c < right; ++c) {
        proj(a * right + c, (a * mid + k) * right + c) = 1.0;
      }
    }
    out += proj * m * proj.adjoint();
  }
  return out;
}

/// Entropy in bits from a general complex eigensolver.
inline double entropy_bits(const Mat& rho) {
  Eigen::ComplexEigenSolver<Mat> es(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i).real();
    if (l > 1e-14) s -= l * std::log2(l);
  }
  return s;
}

/// Matrix logarithm (base 2) of a full-rank Hermitian matrix via ComplexEigenSolver.
inline Mat log2m(const Mat& a) {
  Eigen::ComplexEigenSolver<Mat> es(a);
  Mat v = es.eigenvectors();
  Eigen::VectorXcd l = es.eigenvalues();
  for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = std::log2(l(i).real());
  return v * l.asDiagonal() * v.inverse();
}

/// S(rho||sigma) in bits for full-rank rho and sigma.
inline double relative_entropy_bits(const Mat& rho, const Mat& sigma) {
  return (rho * (log2m(rho) - log2m(sigma))).trace().real();
}

inline double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log2(p[i] / q[i]);
  }
  return s;
}

/// Conditional mutual information of a classical table p[x][y][z], in bits,
/// from the Shannon-entropy decomposition H(XY)+H(YZ)-H(XYZ)-H(Y).
inline double classical_cmi_bits(const std::vector<double>& p, std::size_t dx, std::size_t dy,
                                 std::size_t dz) {
  std::vector<double> pxy(dx * dy, 0.0), pyz(dy * dz, 0.0), py(dy, 0.0);
  double hxyz = 0.0;
  for (std::size_t x = 0; x < dx; ++x)
    for (std::size_t y = 0; y < dy; ++y)
      for (std::size_t z = 0; z < dz; ++z) {
        const double v = p[(x * dy + y) * dz + z];
        pxy[x * dy + y] += v;
        pyz[y * dz + z] += v;
        py[y] += v;
        hxyz -= v * log2_safe(v);
      }
  auto h = [](const std::vector<double>& q) {
    double s = 0.0;
    for (double v : q) s -= v * log2_safe(v);
    return s;
  };
  return h(pxy) + h(pyz) - hxyz - h(py);
}

/// Best classical relative entropy over the 720-point grid of projective
/// qubit measurements {|n><n|, |-n><-n|}: 24 polar x 30 azimuthal angles.
inline double qubit_measurement_grid_bits(const Mat& rho, const Mat& sigma) {
  double best = 0.0;
  constexpr int kPolar = 24, kAzimuth = 30;
  for (int a = 0; a < kPolar; ++a) {
    const double theta = std::numbers::pi * (a + 0.5) / kPolar;
    for (int b = 0; b < kAzimuth; ++b) {
      const double phi = 2.0 * std::numbers::pi * b / kAzimuth;
      Eigen::Vector2cd up(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi));
      Eigen::Vector2cd dn(-std::sin(theta / 2), std::polar(std::cos(theta / 2), phi));
      std::vector<double> p{(up.adjoint() * rho * up)(0).real(), (dn.adjoint() * rho * dn)(0).real()};
      std::vector<double> q{(up.adjoint() * sigma * up)(0).real(),
                            (dn.adjoint() * sigma * dn)(0).real()};
      best = std::max(best, kl_bits(p, q));
    }
  }
  return best;
}

/// E tr(rho_A^2) for the reduced state of a Haar-random pure state on A (x) B.
inline double haar_purity_mean(std::size_t da, std::size_t db) {
  return double(da + db) / double(da * db + 1);
}

/// I(C:R) of the classical example state, bits.
inline double classical_example_mi_bits(std::size_t d, double eps) {
  return h2(eps) + eps * std::log2(double(d - 1));
}

}  // namespace oracle
