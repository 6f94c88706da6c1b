#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qcmi/channels.hpp"
#include "qcmi/entropy.hpp"
#include "qcmi/states.hpp"

using namespace qcmi;

namespace {

// Kraus-form reference: sum_e K_e X K_e^dagger with K_e read from the isometry.
ComplexMatrix kraus_apply(const Isometry& v, const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(v.output_dim(), v.output_dim());
  for (std::size_t e = 0; e < v.env_dim(); ++e) out += v.kraus(e) * x * v.kraus(e).adjoint();
  return out;
}

}  // namespace

TEST_CASE("Choi validation") {
  const SubsystemList a{{"A", 2}};
  CHECK_NOTHROW(identity_channel(a));
  ComplexMatrix bad = identity_channel(a).choi() * 2.0;
  CHECK_THROWS_AS(Channel(bad, a, a), NumericError);  // not trace preserving
  ComplexMatrix neg = depolarizing(a).choi();
  neg(0, 0) -= 0.6;
  neg(1, 1) += 0.6;
  CHECK_THROWS_AS(Channel(neg, a, a), NumericError);  // not CP
  CHECK(cptp_diagnostics(identity_channel(a).choi(), 2, 2).ok());
}

TEST_CASE("identity and depolarizing act as expected") {
  SeededRng rng(1);
  const SubsystemList a{{"A", 3}};
  const auto rho = random_mixed(a, 2, rng);
  CHECK(relative_frobenius(identity_channel(a)(rho.matrix()), rho.matrix()) < 1e-14);
  CHECK(relative_frobenius(depolarizing(a)(rho.matrix()), ComplexMatrix::Identity(3, 3) / 3.0) <
        1e-14);
}

TEST_CASE("Stinespring round trip and Kraus consistency") {
  SeededRng rng(2);
  const SubsystemList in{{"A", 2}}, out{{"X", 3}};
  const auto v = Isometry(haar_isometry(3 * 4, 2, rng), 3, 4);
  const auto ch = stinespring_to_channel(v, in, out);
  const auto rho = random_mixed(in, 2, rng);
  CHECK(relative_frobenius(ch(rho.matrix()), kraus_apply(v, rho.matrix())) < 1e-12);
  CHECK(kraus_rank(ch) <= 4);
  const auto w = stinespring_of(ch, 6);
  CHECK(relative_frobenius(stinespring_to_channel(w, in, out).choi(), ch.choi()) < 1e-10);
  CHECK_THROWS_AS(stinespring_of(ch, kraus_rank(ch) - 1), NumericError);
}

TEST_CASE("isometry validation") {
  SeededRng rng(3);
  ComplexMatrix v = haar_isometry(4, 2, rng);
  CHECK_NOTHROW(Isometry(v + 1e-9 * ComplexMatrix::Ones(4, 2), 2, 2));
  CHECK_THROWS_AS(Isometry(v * 1.1, 2, 2), NumericError);
  CHECK_THROWS_AS(Isometry(v, 3, 2), NumericError);
  const Isometry fixed(v + 1e-9 * ComplexMatrix::Ones(4, 2), 2, 2);
  CHECK(relative_frobenius(fixed.matrix().adjoint() * fixed.matrix(), ComplexMatrix::Identity(2, 2)) <
        1e-14);
}

TEST_CASE("composition and application on a subsystem") {
  SeededRng rng(4);
  const SubsystemList a{{"A", 2}};
  const auto c1 = random_channel(a, a, 0, rng);
  const auto c2 = random_channel(a, a, 0, rng);
  const auto rho = random_mixed(a, 2, rng);
  CHECK(relative_frobenius(compose(c2, c1)(rho.matrix()), c2(c1(rho.matrix()))) < 1e-12);

  // Acting on B of (A, B) with a product input only changes the B factor.
  const auto ra = random_mixed({{"A", 2}}, 2, rng);
  const auto rb = random_mixed({{"B", 2}}, 2, rng);
  const auto ch = random_channel({{"B", 2}}, {{"B", 2}}, 0, rng);
  const auto out = apply(ch, tensor(ra, rb), {"B"});
  CHECK(out.labels() == std::vector<std::string>{"A", "B"});
  CHECK(relative_frobenius(out.matrix(), kron(ra.matrix(), ch(rb.matrix()))) < 1e-12);
  CHECK_THROWS_AS(apply(ch, tensor(ra, rb), {"Q"}), NumericError);
}

TEST_CASE("data processing on random channels") {
  SeededRng rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto rho = random_mixed({{"A", 3}}, 3, rng);
    const auto sigma = random_mixed({{"A", 3}}, 3, rng);
    const auto ch = random_channel({{"A", 3}}, {{"Y", 2}}, 0, rng);
    CHECK(relative_entropy(ch(rho.matrix()), ch(sigma.matrix())) <=
          relative_entropy(rho, sigma) + 1e-9);
    CHECK(fidelity(ch(rho.matrix()), ch(sigma.matrix())) >= fidelity(rho, sigma) - 1e-9);
  }
}

TEST_CASE("transpose channel recovers rho_BC from rho_B") {
  SeededRng rng(6);
  const auto bc = random_mixed({{"B", 2}, {"C", 3}}, 4, rng);
  const auto t = transpose_channel(bc);
  const auto rho_b = partial_trace(bc, {"B"});
  CHECK(relative_frobenius(t(rho_b.matrix()), bc.matrix()) < 1e-10);
  CHECK(cptp_diagnostics(t.choi(), 2, 6).ok());
}

TEST_CASE("transpose channel off the support of rho_B") {
  // rho_B of rank 1 on a qubit: |1><1| is off support.
  SeededRng rng(7);
  const auto c = random_mixed({{"C", 2}}, 2, rng);
  ComplexMatrix b0 = ComplexMatrix::Zero(2, 2);
  b0(0, 0) = 1.0;
  const auto bc = tensor(MultipartiteState(b0, {{"B", 2}}), c);
  ComplexMatrix off = ComplexMatrix::Zero(2, 2);
  off(1, 1) = 1.0;
  CHECK(off_support_weight(partial_trace(bc, {"B"}), off) == doctest::Approx(1.0));
  const auto attach = transpose_channel(bc);
  CHECK(relative_frobenius(attach(off), bc.matrix()) < 1e-12);
  const auto mixed = transpose_channel(bc, "B", "C", TransposeCompletion::kMaximallyMixed);
  CHECK(relative_frobenius(mixed(off), ComplexMatrix::Identity(4, 4) / 4.0) < 1e-12);
  // On the support both completions agree.
  CHECK(relative_frobenius(attach(b0), mixed(b0)) < 1e-12);
}

TEST_CASE("transpose channel is insensitive to a small off-support perturbation") {
  SeededRng rng(8);
  const auto bc = random_mixed({{"B", 2}, {"C", 2}}, 4, rng);
  const auto t_full = transpose_channel(bc);
  const auto t_alt = transpose_channel(bc, "B", "C", TransposeCompletion::kMaximallyMixed);
  CHECK(relative_frobenius(t_full.choi(), t_alt.choi()) < 1e-12);
}

TEST_CASE("attach and mix") {
  SeededRng rng(9);
  const auto tau = random_mixed({{"C", 2}}, 2, rng);
  const auto att = attach_channel({{"B", 2}}, tau);
  const auto rb = random_mixed({{"B", 2}}, 2, rng);
  CHECK(relative_frobenius(att(rb.matrix()), kron(rb.matrix(), tau.matrix())) < 1e-13);
  const auto m = mix(identity_channel({{"A", 2}}), depolarizing({{"A", 2}}), 0.25);
  const ComplexMatrix x = random_mixed({{"A", 2}}, 2, rng).matrix();
  CHECK(relative_frobenius(m(x), 0.25 * x + 0.75 * ComplexMatrix::Identity(2, 2) / 2.0) < 1e-13);
  CHECK_THROWS_AS(mix(identity_channel({{"A", 2}}), depolarizing({{"A", 2}}), 1.5), NumericError);
}
