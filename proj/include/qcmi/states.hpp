#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qcmi/linalg.hpp"
#include "qcmi/rng.hpp"

namespace qcmi {

struct Subsystem {
  std::string label;
  std::size_t dim = 1;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

using SubsystemList = std::vector<Subsystem>;

std::size_t total_dim(std::span<const Subsystem> subsystems);
std::vector<std::size_t> dims_of(std::span<const Subsystem> subsystems);
std::vector<std::string> labels_of(std::span<const Subsystem> subsystems);
/// Index of `label` in `subsystems`, or throws NumericError.
std::size_t index_of(std::span<const Subsystem> subsystems, const std::string& label);

/// Tolerances for the density-matrix invariants.
inline constexpr double kStateTolerance = 1e-9;

/// Density matrix on an ordered list of labelled subsystems.
///
/// Construction validates Hermiticity, unit trace and positivity (all within
/// kStateTolerance) and stores the symmetrized matrix. Subsystem order is the
/// Kronecker order: the first subsystem is the most significant index.
class MultipartiteState {
 public:
  MultipartiteState(ComplexMatrix matrix, SubsystemList subsystems);

  const ComplexMatrix& matrix() const { return matrix_; }
  const SubsystemList& subsystems() const { return subsystems_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::vector<std::string> labels() const { return labels_of(subsystems_); }
  std::vector<std::size_t> dims() const { return dims_of(subsystems_); }
  bool has(const std::string& label) const;
  std::size_t dim_of(const std::string& label) const;

  double purity() const;

 private:
  ComplexMatrix matrix_;
  SubsystemList subsystems_;
};

// Matrix-level kernels. These skip state validation and are used in hot
// loops; `dims` is the Kronecker factorization of the matrix.
namespace ops {

/// Partial trace keeping the subsystems at `keep` (ascending indices).
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// Reorders tensor factors: output factor k is input factor `order[k]`.
ComplexMatrix permute(const ComplexMatrix& m, std::span<const std::size_t> dims,
                      std::span<const std::size_t> order);

/// Partial trace of an operator X: (A (x) R) -> (A' (x) R) over the trailing
/// factor R of dimension `r_dim`.
ComplexMatrix trace_trailing(const ComplexMatrix& x, std::size_t r_dim);

}  // namespace ops

/// Reduced state on the labels in `keep`; original label order is preserved.
MultipartiteState partial_trace(const MultipartiteState& s, const std::vector<std::string>& keep);

/// Traces out the listed labels.
MultipartiteState trace_out(const MultipartiteState& s, const std::vector<std::string>& drop);

MultipartiteState tensor(const MultipartiteState& a, const MultipartiteState& b);

/// Reorders subsystems into `order` (a permutation of the state's labels).
MultipartiteState permute(const MultipartiteState& s, const std::vector<std::string>& order);

MultipartiteState relabel(const MultipartiteState& s, const std::vector<std::string>& labels);

/// Pure state on s (x) ancilla with ancilla dimension rank(s).
MultipartiteState purify(const MultipartiteState& s, const std::string& ancilla_label);

MultipartiteState pure_state(const ComplexVector& psi, SubsystemList subsystems);

/// I/d on the given subsystems.
MultipartiteState maximally_mixed(SubsystemList subsystems);

/// Diagonal state from a probability table indexed in Kronecker order.
MultipartiteState classical_state(std::span<const double> probabilities, SubsystemList subsystems);

/// rho_CR (x) I_B / 2 on (C, B, R) with
/// rho_CR = (1 - eps)|00><00| + eps/(d-1) sum_{k>=1} |kk><kk|.
MultipartiteState classical_example_state(std::size_t d, double eps);

/// Haar-random unit vector of dimension d.
ComplexVector random_unit_vector(std::size_t d, SeededRng& rng);

/// Haar-random pure state on the given subsystems.
MultipartiteState random_pure(const SubsystemList& subsystems, SeededRng& rng);

/// Random mixed state: marginal of a Haar-random pure state on
/// subsystems (x) ancilla, with ancilla dimension `rank` (>= 1).
MultipartiteState random_mixed(const SubsystemList& subsystems, std::size_t rank, SeededRng& rng);

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix haar_unitary(std::size_t d, SeededRng& rng);

/// Haar-random isometry with the given shape (rows >= cols).
ComplexMatrix haar_isometry(std::size_t rows, std::size_t cols, SeededRng& rng);

/// Subsystem list from parallel label / dim lists.
SubsystemList make_subsystems(const std::vector<std::string>& labels,
                              const std::vector<std::size_t>& dims);

}  // namespace qcmi
