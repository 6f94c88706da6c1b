#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qcmi/linalg.hpp"
#include "qcmi/rng.hpp"
#include "qcmi/states.hpp"

using namespace qcmi;

namespace {

ComplexMatrix random_psd(std::size_t d, std::size_t rank, SeededRng& rng) {
  ComplexMatrix g(d, rank);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
  return g * g.adjoint();
}

}  // namespace

TEST_CASE("eigh reconstructs a Hermitian matrix") {
  SeededRng rng(11);
  const ComplexMatrix h = random_psd(5, 5, rng) - ComplexMatrix::Identity(5, 5);
  const auto spec = eigh(h);
  CHECK(relative_frobenius(spec.reconstruct(), h) < 1e-12);
  for (Eigen::Index i = 1; i < spec.eigenvalues.size(); ++i) {
    CHECK(spec.eigenvalues(i - 1) <= spec.eigenvalues(i));
  }
  // Same spectrum as the general eigensolver.
  Eigen::ComplexEigenSolver<ComplexMatrix> es(h);
  std::vector<double> ref;
  for (Eigen::Index i = 0; i < 5; ++i) ref.push_back(es.eigenvalues()(i).real());
  std::sort(ref.begin(), ref.end());
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(spec.eigenvalues(i) == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("asymmetry handling") {
  ComplexMatrix h(2, 2);
  h << 1.0, Complex(0.0, 1e-11), 0.0, 2.0;
  CHECK_NOTHROW(eigh(h));
  h(0, 1) = 0.5;
  CHECK_THROWS_AS(eigh(h), NumericError);
  ComplexMatrix nonsquare(2, 3);
  CHECK_THROWS_AS(eigh(nonsquare), NumericError);
}

TEST_CASE("square root squares back") {
  SeededRng rng(3);
  for (std::size_t rank : {1u, 2u, 4u}) {
    const ComplexMatrix a = random_psd(4, rank, rng);
    const ComplexMatrix r = sqrtm_psd(a);
    CHECK(relative_frobenius(r * r, a) < 1e-10);
    CHECK(hermitian_asymmetry(r) < 1e-12);
  }
}

TEST_CASE("inverse square root acts on the support only") {
  SeededRng rng(4);
  const ComplexMatrix a = random_psd(4, 2, rng);
  const ComplexMatrix r = inv_sqrtm_psd(a);
  const auto spec = eigh(a);
  const ComplexMatrix p = support_projector(spec, spec.default_cutoff());
  CHECK(relative_frobenius(r * a * r, p) < 1e-9);
  CHECK(support_rank(spec, spec.default_cutoff()) == 2);
  CHECK(std::abs(p.trace().real() - 2.0) < 1e-12);
}

TEST_CASE("matrix_function matches closed forms on a diagonal matrix") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 0.5;
  d(1, 1) = 0.25;
  d(2, 2) = 0.25;
  const ComplexMatrix l = matrix_function(d, [](double x) { return std::log(x); });
  CHECK(l(0, 0).real() == doctest::Approx(std::log(0.5)));
  CHECK(l(2, 2).real() == doctest::Approx(std::log(0.25)));
  CHECK(std::abs(l(0, 1)) < 1e-15);
}

TEST_CASE("support cutoff is relative to the spectral radius") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1e-3;
  d(1, 1) = 1e-14;  // below 1e-10 * 1e-3
  auto rank = [](const ComplexMatrix& m) {
    const auto spec = eigh(m);
    return support_rank(spec, spec.default_cutoff());
  };
  CHECK(rank(d) == 1);
  d(1, 1) = 1e-12;  // above
  CHECK(rank(d) == 2);
}

TEST_CASE("trace norm and kron") {
  ComplexMatrix a(2, 2);
  a << 1.0, 0.0, 0.0, -2.0;
  CHECK(trace_norm(a) == doctest::Approx(3.0));
  ComplexMatrix b = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix k = kron(a, b);
  CHECK(k.rows() == 6);
  CHECK(k(3, 3).real() == doctest::Approx(-2.0));
  CHECK(k(0, 3).real() == doctest::Approx(0.0));
  CHECK(min_eigenvalue(k) == doctest::Approx(-2.0));
}

TEST_CASE("float scalar instantiation") {
  CMatrix<float> m = CMatrix<float>::Identity(2, 2);
  m(0, 0) = 4.0f;
  const auto r = sqrtm_psd(m);
  CHECK(r(0, 0).real() == doctest::Approx(2.0f));
}
