#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qcmi/entropy.hpp"
#include "qcmi/states.hpp"

using namespace qcmi;

TEST_CASE("constructor validation") {
  const SubsystemList ab{{"A", 2}, {"B", 2}};
  ComplexMatrix m = ComplexMatrix::Identity(4, 4) / 4.0;
  CHECK_NOTHROW(MultipartiteState(m, ab));
  CHECK_THROWS_AS(MultipartiteState(m * 2.0, ab), NumericError);  // trace
  CHECK_THROWS_AS(MultipartiteState(m, {{"A", 2}, {"B", 3}}), NumericError);  // dims
  CHECK_THROWS_AS(MultipartiteState(m, {{"A", 2}, {"A", 2}}), NumericError);  // labels
  ComplexMatrix neg = m;
  neg(0, 0) = -0.25;
  neg(1, 1) = 0.75;
  CHECK_THROWS_AS(MultipartiteState(neg, ab), NumericError);  // not PSD
  ComplexMatrix nan = m;
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(MultipartiteState(nan, ab), NumericError);
  ComplexMatrix asym = m;
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(MultipartiteState(asym, ab), NumericError);
}

TEST_CASE("partial trace agrees with the projector oracle") {
  SeededRng rng(5);
  const SubsystemList subs{{"A", 2}, {"B", 3}, {"C", 2}};
  const auto s = random_mixed(subs, 4, rng);
  const auto ac = partial_trace(s, {"A", "C"});
  CHECK(ac.labels() == std::vector<std::string>{"A", "C"});
  CHECK(relative_frobenius(ac.matrix(), oracle::trace_middle(s.matrix(), 2, 3, 2)) < 1e-13);
  const auto a = partial_trace(s, {"A"});
  CHECK(relative_frobenius(a.matrix(), oracle::trace_middle(s.matrix(), 2, 6, 1)) < 1e-13);
  const auto c = trace_out(s, {"A", "B"});
  CHECK(relative_frobenius(c.matrix(), oracle::trace_middle(s.matrix(), 1, 6, 2)) < 1e-13);
  CHECK_THROWS_AS(partial_trace(s, {"Z"}), NumericError);
}

TEST_CASE("permutation matches tensor reconstruction") {
  SeededRng rng(6);
  const auto a = random_mixed({{"A", 2}}, 2, rng);
  const auto b = random_mixed({{"B", 3}}, 3, rng);
  const auto c = random_mixed({{"C", 2}}, 1, rng);
  const auto abc = tensor(tensor(a, b), c);
  const auto cab = permute(abc, {"C", "A", "B"});
  const auto direct = tensor(tensor(c, a), b);
  CHECK(cab.labels() == direct.labels());
  CHECK(relative_frobenius(cab.matrix(), direct.matrix()) < 1e-14);
  // Inverse permutation round-trips.
  CHECK(relative_frobenius(permute(cab, {"A", "B", "C"}).matrix(), abc.matrix()) < 1e-14);
}

TEST_CASE("purification reproduces the state with ancilla of rank size") {
  SeededRng rng(7);
  const SubsystemList subs{{"A", 2}, {"B", 2}};
  for (std::size_t rank : {1u, 3u, 4u}) {
    const auto s = random_mixed(subs, rank, rng);
    const auto p = purify(s, "P");
    CHECK(p.dim_of("P") == rank);
    CHECK(p.purity() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(relative_frobenius(partial_trace(p, {"A", "B"}).matrix(), s.matrix()) < 1e-10);
    // Complementary entropies of a pure state agree.
    CHECK(von_neumann(partial_trace(p, {"P"})) ==
          doctest::Approx(von_neumann(s)).epsilon(1e-9));
  }
}

TEST_CASE("Haar pure states have the expected marginal purity") {
  // E tr(rho_A^2) = (dA + dB) / (dA dB + 1) for Haar-random pure states.
  SeededRng rng(8);
  const SubsystemList subs{{"A", 2}, {"B", 4}};
  const int n = 4000;
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = partial_trace(random_pure(subs, rng), {"A"}).purity();
    mean += p;
    sq += p * p;
  }
  mean /= n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean - oracle::haar_purity_mean(2, 4)) < 4.0 * sd / std::sqrt(double(n)));
}

TEST_CASE("Haar isometries are isometries") {
  SeededRng rng(9);
  const ComplexMatrix v = haar_isometry(6, 3, rng);
  CHECK(relative_frobenius(v.adjoint() * v, ComplexMatrix::Identity(3, 3)) < 1e-13);
  const ComplexMatrix u = haar_unitary(4, rng);
  CHECK(relative_frobenius(u * u.adjoint(), ComplexMatrix::Identity(4, 4)) < 1e-13);
}

TEST_CASE("classical and example states") {
  const std::vector<double> p{0.5, 0.25, 0.25, 0.0};
  const auto s = classical_state(p, {{"X", 2}, {"Y", 2}});
  CHECK(s.matrix()(1, 1).real() == doctest::Approx(0.25));
  const std::vector<double> bad{0.5, 0.6};
  CHECK_THROWS_AS(classical_state(bad, {{"X", 2}}), NumericError);

  const auto ex = classical_example_state(16, 0.1);
  CHECK(ex.labels() == std::vector<std::string>{"C", "B", "R"});
  CHECK(ex.dims() == std::vector<std::size_t>{16, 2, 16});
  const auto cr = partial_trace(ex, {"C", "R"});
  CHECK(cr.matrix()(0, 0).real() == doctest::Approx(0.9));
  CHECK(cr.matrix()(17, 17).real() == doctest::Approx(0.1 / 15));
  CHECK_THROWS_AS(classical_example_state(1, 0.1), NumericError);
  CHECK_THROWS_AS(classical_example_state(4, 1.5), NumericError);
}

TEST_CASE("rng streams are reproducible and distinct") {
  SeededRng a(42, 3), b(42, 3), c(42, 4);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  SeededRng parent(42);
  CHECK(parent.derive(1).next_u64() == SeededRng(42).derive(1).next_u64());
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i) seen.insert(parent.derive(i).next_u64());
  CHECK(seen.size() == 100);

  SeededRng u(1);
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = u.normal();
    mean += z;
    var += z * z;
  }
  CHECK(std::abs(mean / n) < 0.05);
  CHECK(std::abs(var / n - 1.0) < 0.05);
  for (int i = 0; i < 1000; ++i) {
    const auto k = u.uniform_int(2, 4);
    CHECK((k >= 2 && k <= 4));
  }
}
