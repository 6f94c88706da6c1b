#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qcmi/linalg.hpp"
#include "qcmi/states.hpp"

namespace qcmi {

// All reported information quantities are in bits. Internals use nats.
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double bits_to_nats(double bits) { return bits * kLn2; }

/// Binary entropy in bits.
double binary_entropy(double p);

/// -sum lambda log2 lambda over eigenvalues above the support cutoff.
double von_neumann(const ComplexMatrix& rho);
double von_neumann(const MultipartiteState& s);

/// Shannon entropy (bits) of a probability vector; zeros contribute nothing.
double shannon(const std::vector<double>& p);

/// I(C:R|B) = S(BC) + S(BR) - S(BCR) - S(B) in bits; other subsystems are
/// traced out first. The raw (unclamped) value is returned.
double cmi(const MultipartiteState& s, const std::string& c = "C", const std::string& r = "R",
           const std::string& b = "B");

/// I(X:Y) = S(X) + S(Y) - S(XY) in bits.
double mutual_information(const MultipartiteState& s, const std::string& x,
                          const std::string& y);

/// True when supp(rho) is contained in the cutoff support of sigma, judged by
/// ||(I - P_sigma) rho (I - P_sigma)||_1 < 1e-9.
bool support_contained(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// S(rho || sigma) = tr rho (log rho - log sigma) in bits, or +infinity when
/// the support condition fails.
double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma);
double relative_entropy(const MultipartiteState& rho, const MultipartiteState& sigma);

/// F(rho, sigma) = tr[(sigma^1/2 rho sigma^1/2)^1/2], evaluated as the trace
/// norm of rho^1/2 sigma^1/2 (the same number, without the square root of
/// round-off in the inner eigenvalues).
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);
double fidelity(const MultipartiteState& rho, const MultipartiteState& sigma);

/// Order-1/2 Renyi relative entropy, -2 log2 F.
double renyi_half(const ComplexMatrix& rho, const ComplexMatrix& sigma);
double renyi_half(const MultipartiteState& rho, const MultipartiteState& sigma);

/// Configuration of the measured relative entropy ascent.
struct MeasuredReConfig {
  std::size_t random_restarts = 5;  // in addition to the H = 0 start
  std::size_t max_iterations = 3000;
  double relative_tolerance = 1e-9;
  std::size_t window = 5;
  double regularization = 1e-12;
  std::uint64_t seed = 0x6d65617375726564ULL;
};

/// Result of maximizing tr(rho ln w) + 1 - tr(sigma w) over positive definite w.
struct MeasuredReSolution {
  double value_bits = 0.0;
  ComplexMatrix witness;  // w = exp(H)
  std::vector<double> trace;  // objective (bits) per accepted step, best start
  bool converged = false;
  std::size_t starts = 0;
};

/// Variational objective tr(rho ln w) + 1 - tr(sigma w), in bits.
double measured_re_objective(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                             const ComplexMatrix& witness);

/// Measured relative entropy: supremum over POVMs of the classical relative
/// entropy of the outcome distributions. Maximizes the concave
/// tr(rho H) + 1 - tr(sigma e^H) over Hermitian H by L-BFGS, then measures in
/// the eigenbasis of H.
MeasuredReSolution measured_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                                             const MeasuredReConfig& config = {});

/// Continuity ceiling on S(rho||sigma) in bits, for T = ||rho - sigma||_1 and
/// beta = lambda_min(sigma):
///   T log2 d + min(-T log2 T, 1/(e ln 2)) - T log2(beta) / 2.
double ae_continuity_bound(std::size_t d, double trace_distance, double beta);

/// Named panel of quantities for a state and a candidate reconstruction.
struct EntropyReport {
  double cmi_bits = 0.0;
  double rel_ent_bits = 0.0;  // may be +infinity
  double fidelity = 0.0;
  double renyi_half_bits = 0.0;
  double measured_re_bits = 0.0;
  bool has_measured_re = false;

  /// CMI with round-off negatives clamped to 0, for display only.
  double cmi_display() const { return cmi_bits < 0.0 ? 0.0 : cmi_bits; }
};

/// Fills the panel for rho_BCR against `reconstruction` (same subsystems).
EntropyReport entropy_report(const MultipartiteState& rho_bcr,
                             const MultipartiteState& reconstruction, bool with_measured_re,
                             const MeasuredReConfig& config = {});

}  // namespace qcmi
