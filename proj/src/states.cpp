#include "qcmi/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace qcmi {

std::size_t total_dim(std::span<const Subsystem> subsystems) {
  std::size_t d = 1;
  for (const auto& s : subsystems) d *= s.dim;
  return d;
}

std::vector<std::size_t> dims_of(std::span<const Subsystem> subsystems) {
  std::vector<std::size_t> out;
  out.reserve(subsystems.size());
  for (const auto& s : subsystems) out.push_back(s.dim);
  return out;
}

std::vector<std::string> labels_of(std::span<const Subsystem> subsystems) {
  std::vector<std::string> out;
  out.reserve(subsystems.size());
  for (const auto& s : subsystems) out.push_back(s.label);
  return out;
}

std::size_t index_of(std::span<const Subsystem> subsystems, const std::string& label) {
  for (std::size_t i = 0; i < subsystems.size(); ++i) {
    if (subsystems[i].label == label) return i;
  }
  throw NumericError("unknown subsystem label '" + label + "'");
}

SubsystemList make_subsystems(const std::vector<std::string>& labels,
                              const std::vector<std::size_t>& dims) {
  if (labels.size() != dims.size()) {
    throw NumericError("make_subsystems: label and dimension lists differ in length");
  }
  SubsystemList out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({labels[i], dims[i]});
  return out;
}

namespace {

void validate_subsystems(const SubsystemList& subsystems, Eigen::Index matrix_dim) {
  std::set<std::string> seen;
  for (const auto& s : subsystems) {
    if (s.dim == 0) throw NumericError("subsystem '" + s.label + "' has dimension 0");
    if (s.label.empty()) throw NumericError("subsystem labels must be non-empty");
    if (!seen.insert(s.label).second) {
      throw NumericError("duplicate subsystem label '" + s.label + "'");
    }
  }
  if (total_dim(subsystems) != static_cast<std::size_t>(matrix_dim)) {
    std::ostringstream os;
    os << "subsystem dimensions multiply to " << total_dim(subsystems)
       << " but the matrix is " << matrix_dim << "x" << matrix_dim;
    throw NumericError(os.str());
  }
}

std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> strides(dims.size());
  std::size_t s = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    strides[k] = s;
    s *= dims[k];
  }
  return strides;
}

// Linear offsets of every multi-index over the factors in `subset`, enumerated
// with subset[0] most significant.
std::vector<std::size_t> offsets(std::span<const std::size_t> dims,
                                 std::span<const std::size_t> strides,
                                 std::span<const std::size_t> subset) {
  std::vector<std::size_t> out{0};
  for (std::size_t k : subset) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * dims[k]);
    for (std::size_t base : out) {
      for (std::size_t i = 0; i < dims[k]; ++i) next.push_back(base + i * strides[k]);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

MultipartiteState::MultipartiteState(ComplexMatrix matrix, SubsystemList subsystems)
    : subsystems_(std::move(subsystems)) {
  if (matrix.rows() != matrix.cols()) throw NumericError("density matrix must be square");
  if (!matrix.allFinite()) throw NumericError("density matrix has non-finite entries");
  validate_subsystems(subsystems_, matrix.rows());
  matrix_ = symmetrized(matrix, kStateTolerance);
  const Complex tr = matrix_.trace();
  if (std::abs(tr - Complex(1.0)) > kStateTolerance) {
    std::ostringstream os;
    os << "density matrix trace is " << tr.real() << ", expected 1";
    throw NumericError(os.str());
  }
  const double lmin = matrix_.rows() == 0 ? 0.0 : eigh(matrix_).eigenvalues(0);
  if (lmin < -kStateTolerance) {
    std::ostringstream os;
    os << "density matrix is not positive semidefinite: min eigenvalue " << lmin;
    throw NumericError(os.str());
  }
}

bool MultipartiteState::has(const std::string& label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

std::size_t MultipartiteState::dim_of(const std::string& label) const {
  return subsystems_[index_of(subsystems_, label)].dim;
}

double MultipartiteState::purity() const { return (matrix_ * matrix_).trace().real(); }

namespace ops {

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  const auto strides = strides_of(dims);
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (std::find(keep.begin(), keep.end(), k) == keep.end()) traced.push_back(k);
  }
  const auto ok = offsets(dims, strides, keep);
  const auto ot = offsets(dims, strides, traced);
  const auto n = static_cast<Eigen::Index>(ok.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      Complex acc{0.0, 0.0};
      for (std::size_t t : ot) acc += m(ok[a] + t, ok[b] + t);
      out(a, b) = acc;
    }
  }
  return out;
}

ComplexMatrix permute(const ComplexMatrix& m, std::span<const std::size_t> dims,
                      std::span<const std::size_t> order) {
  const auto off = offsets(dims, strides_of(dims), order);
  const auto n = static_cast<Eigen::Index>(off.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = m(off[a], off[b]);
  }
  return out;
}

ComplexMatrix trace_trailing(const ComplexMatrix& x, std::size_t r_dim) {
  const auto r = static_cast<Eigen::Index>(r_dim);
  const Eigen::Index p = x.rows() / r;
  const Eigen::Index q = x.cols() / r;
  ComplexMatrix out = ComplexMatrix::Zero(p, q);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index k = 0; k < r; ++k) acc += x(i * r + k, j * r + k);
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace ops

MultipartiteState partial_trace(const MultipartiteState& s, const std::vector<std::string>& keep) {
  if (keep.empty()) throw NumericError("partial_trace: keep set must be non-empty");
  std::vector<std::size_t> idx;
  for (const auto& label : keep) idx.push_back(index_of(s.subsystems(), label));
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw NumericError("partial_trace: repeated label in keep set");
  }
  SubsystemList kept;
  for (std::size_t k : idx) kept.push_back(s.subsystems()[k]);
  const auto dims = s.dims();
  return MultipartiteState(ops::partial_trace(s.matrix(), dims, idx), std::move(kept));
}

MultipartiteState trace_out(const MultipartiteState& s, const std::vector<std::string>& drop) {
  for (const auto& label : drop) index_of(s.subsystems(), label);
  std::vector<std::string> keep;
  for (const auto& sub : s.subsystems()) {
    if (std::find(drop.begin(), drop.end(), sub.label) == drop.end()) keep.push_back(sub.label);
  }
  return partial_trace(s, keep);
}

MultipartiteState tensor(const MultipartiteState& a, const MultipartiteState& b) {
  SubsystemList subs = a.subsystems();
  for (const auto& sb : b.subsystems()) {
    if (a.has(sb.label)) throw NumericError("tensor: label collision on '" + sb.label + "'");
    subs.push_back(sb);
  }
  return MultipartiteState(kron(a.matrix(), b.matrix()), std::move(subs));
}

MultipartiteState permute(const MultipartiteState& s, const std::vector<std::string>& order) {
  if (order.size() != s.subsystems().size()) {
    throw NumericError("permute: order must list every subsystem exactly once");
  }
  std::vector<std::size_t> idx;
  SubsystemList subs;
  for (const auto& label : order) {
    const std::size_t k = index_of(s.subsystems(), label);
    if (std::find(idx.begin(), idx.end(), k) != idx.end()) {
      throw NumericError("permute: repeated label '" + label + "'");
    }
    idx.push_back(k);
    subs.push_back(s.subsystems()[k]);
  }
  const auto dims = s.dims();
  return MultipartiteState(ops::permute(s.matrix(), dims, idx), std::move(subs));
}

MultipartiteState relabel(const MultipartiteState& s, const std::vector<std::string>& labels) {
  return MultipartiteState(s.matrix(), make_subsystems(labels, s.dims()));
}

MultipartiteState purify(const MultipartiteState& s, const std::string& ancilla_label) {
  const auto spec = eigh(s.matrix());
  const double cutoff = spec.default_cutoff();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = spec.size(); i-- > 0;) {
    if (spec.eigenvalues(i) > cutoff) support.push_back(i);
  }
  const auto rank = static_cast<Eigen::Index>(std::max<std::size_t>(support.size(), 1));
  const auto d = static_cast<Eigen::Index>(s.dim());
  ComplexVector psi = ComplexVector::Zero(d * rank);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(support.size()); ++k) {
    const Eigen::Index i = support[k];
    const double w = std::sqrt(spec.eigenvalues(i));
    for (Eigen::Index x = 0; x < d; ++x) psi(x * rank + k) += w * spec.eigenvectors(x, i);
  }
  psi.normalize();
  SubsystemList subs = s.subsystems();
  if (s.has(ancilla_label)) {
    throw NumericError("purify: ancilla label '" + ancilla_label + "' already in use");
  }
  subs.push_back({ancilla_label, static_cast<std::size_t>(rank)});
  return pure_state(psi, std::move(subs));
}

MultipartiteState pure_state(const ComplexVector& psi, SubsystemList subsystems) {
  const double n = psi.norm();
  if (!(std::abs(n - 1.0) <= kStateTolerance)) {
    throw NumericError("pure_state: vector is not normalized");
  }
  return MultipartiteState(psi * psi.adjoint(), std::move(subsystems));
}

MultipartiteState maximally_mixed(SubsystemList subsystems) {
  const auto d = static_cast<Eigen::Index>(total_dim(subsystems));
  return MultipartiteState(ComplexMatrix::Identity(d, d) / static_cast<double>(d),
                           std::move(subsystems));
}

MultipartiteState classical_state(std::span<const double> probabilities,
                                  SubsystemList subsystems) {
  if (probabilities.size() != total_dim(subsystems)) {
    throw NumericError("classical_state: table size does not match the subsystem dimensions");
  }
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw NumericError("classical_state: probabilities must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "classical_state: probabilities sum to " << sum << ", expected 1";
    throw NumericError(os.str());
  }
  const auto d = static_cast<Eigen::Index>(probabilities.size());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = probabilities[i];
  return MultipartiteState(std::move(m), std::move(subsystems));
}

MultipartiteState classical_example_state(std::size_t d, double eps) {
  if (d < 2) throw NumericError("classical_example_state: d must be at least 2");
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw NumericError("classical_example_state: eps must lie in [0, 1]");
  }
  constexpr std::size_t kBDim = 2;
  std::vector<double> p(d * kBDim * d, 0.0);
  // Index order (C, B, R).
  auto at = [&](std::size_t c, std::size_t b, std::size_t r) -> double& {
    return p[(c * kBDim + b) * d + r];
  };
  for (std::size_t b = 0; b < kBDim; ++b) {
    at(0, b, 0) = (1.0 - eps) / kBDim;
    for (std::size_t k = 1; k < d; ++k) {
      at(k, b, k) = eps / static_cast<double>(d - 1) / kBDim;
    }
  }
  return classical_state(p, {{"C", d}, {"B", kBDim}, {"R", d}});
}

ComplexVector random_unit_vector(std::size_t d, SeededRng& rng) {
  ComplexVector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  v.normalize();
  return v;
}

MultipartiteState random_pure(const SubsystemList& subsystems, SeededRng& rng) {
  return pure_state(random_unit_vector(total_dim(subsystems), rng), subsystems);
}

MultipartiteState random_mixed(const SubsystemList& subsystems, std::size_t rank,
                               SeededRng& rng) {
  if (rank == 0) throw NumericError("random_mixed: rank must be >= 1");
  const std::size_t d = total_dim(subsystems);
  const ComplexVector psi = random_unit_vector(d * rank, rng);
  std::vector<std::size_t> dims{d, rank};
  std::vector<std::size_t> keep{0};
  ComplexMatrix full = psi * psi.adjoint();
  return MultipartiteState(ops::partial_trace(full, dims, keep), subsystems);
}

ComplexMatrix haar_isometry(std::size_t rows, std::size_t cols, SeededRng& rng) {
  if (rows < cols) throw NumericError("haar_isometry: rows must be >= cols");
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  ComplexMatrix g(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(r, c);
  const ComplexMatrix& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < c; ++j) {
    const Complex diag = packed(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

ComplexMatrix haar_unitary(std::size_t d, SeededRng& rng) { return haar_isometry(d, d, rng); }

}  // namespace qcmi
