#include "qcmi/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

namespace qcmi {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows()
       << "x" << b.cols() << ")";
    throw NumericError(os.str());
  }
}

double entropy_nats(const Spectrum<double>& spec) {
  const double cutoff = spec.default_cutoff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const double x = spec.eigenvalues(i);
    if (x > cutoff) s -= x * std::log(x);
  }
  return s;
}

// Matrix on `rho` in the basis of `u`, diagonal only.
RealVector diagonal_in_basis(const ComplexMatrix& rho, const ComplexMatrix& u) {
  RealVector d(u.cols());
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    d(i) = u.col(i).dot(rho * u.col(i)).real();
  }
  return d;
}

}  // namespace

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double shannon(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) {
    if (x > 0.0) s -= x * std::log2(x);
  }
  return s;
}

double von_neumann(const ComplexMatrix& rho) { return nats_to_bits(entropy_nats(eigh(rho))); }

double von_neumann(const MultipartiteState& s) { return von_neumann(s.matrix()); }

double cmi(const MultipartiteState& s, const std::string& c, const std::string& r,
           const std::string& b) {
  if (c == r || c == b || r == b) throw NumericError("cmi: labels must be distinct");
  const std::size_t ic = index_of(s.subsystems(), c);
  const std::size_t ir = index_of(s.subsystems(), r);
  const std::size_t ib = index_of(s.subsystems(), b);
  const auto dims = s.dims();

  // Reduce to the three named systems, kept in their original order.
  std::vector<std::size_t> keep{ib, ic, ir};
  std::sort(keep.begin(), keep.end());
  ComplexMatrix bcr = keep.size() == dims.size()
                          ? s.matrix()
                          : ops::partial_trace(s.matrix(), dims, keep);
  std::vector<std::size_t> sub_dims;
  for (std::size_t k : keep) sub_dims.push_back(dims[k]);
  auto pos = [&](std::size_t original) {
    return static_cast<std::size_t>(std::find(keep.begin(), keep.end(), original) - keep.begin());
  };
  const std::size_t pb = pos(ib), pc = pos(ic), pr = pos(ir);
  auto marginal_entropy = [&](std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    return entropy_nats(eigh(ops::partial_trace(bcr, sub_dims, idx)));
  };
  const double s_bc = marginal_entropy({pb, pc});
  const double s_br = marginal_entropy({pb, pr});
  const double s_b = marginal_entropy({pb});
  const double s_bcr = entropy_nats(eigh(bcr));
  return nats_to_bits(s_bc + s_br - s_bcr - s_b);
}

double mutual_information(const MultipartiteState& s, const std::string& x,
                          const std::string& y) {
  const auto xy = partial_trace(s, {x, y});
  return von_neumann(partial_trace(xy, {x})) + von_neumann(partial_trace(xy, {y})) -
         von_neumann(xy);
}

namespace {

bool support_contained(const ComplexMatrix& rho, const Spectrum<double>& sigma_spec) {
  const double cutoff = sigma_spec.default_cutoff();
  const ComplexMatrix off = ComplexMatrix::Identity(rho.rows(), rho.cols()) -
                            support_projector(sigma_spec, cutoff);
  return trace_norm(off * rho * off) < 1e-9;
}

}  // namespace

bool support_contained(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_same_shape(rho, sigma, "support_contained");
  return support_contained(rho, eigh(sigma));
}

double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_same_shape(rho, sigma, "relative_entropy");
  const auto sigma_spec = eigh(sigma);
  if (!support_contained(rho, sigma_spec)) return kInfinity;
  const double cutoff = sigma_spec.default_cutoff();
  const RealVector weights = diagonal_in_basis(rho, sigma_spec.eigenvectors);
  double cross = 0.0;  // tr rho log sigma
  for (Eigen::Index j = 0; j < sigma_spec.size(); ++j) {
    const double s = sigma_spec.eigenvalues(j);
    if (s > cutoff) cross += weights(j) * std::log(s);
  }
  const double neg_entropy = -entropy_nats(eigh(rho));
  return nats_to_bits(neg_entropy - cross);
}

double relative_entropy(const MultipartiteState& rho, const MultipartiteState& sigma) {
  if (rho.subsystems() != sigma.subsystems()) {
    throw NumericError("relative_entropy: states live on different subsystems");
  }
  return relative_entropy(rho.matrix(), sigma.matrix());
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_same_shape(rho, sigma, "fidelity");
  const ComplexMatrix product = sqrtm_psd(rho) * sqrtm_psd(sigma);
  return std::min(trace_norm(product), 1.0);
}

double fidelity(const MultipartiteState& rho, const MultipartiteState& sigma) {
  if (rho.subsystems() != sigma.subsystems()) {
    throw NumericError("fidelity: states live on different subsystems");
  }
  return fidelity(rho.matrix(), sigma.matrix());
}

double renyi_half(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const double f = fidelity(rho, sigma);
  return f > 0.0 ? -2.0 * std::log2(f) : kInfinity;
}

double renyi_half(const MultipartiteState& rho, const MultipartiteState& sigma) {
  const double f = fidelity(rho, sigma);
  return f > 0.0 ? -2.0 * std::log2(f) : kInfinity;
}

double measured_re_objective(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                             const ComplexMatrix& witness) {
  require_same_shape(rho, sigma, "measured_re_objective");
  require_same_shape(rho, witness, "measured_re_objective");
  const auto w = eigh(witness);
  if (w.size() > 0 && w.eigenvalues(0) <= 0.0) {
    throw NumericError("measured_re_objective: witness must be positive definite");
  }
  const RealVector p = diagonal_in_basis(rho, w.eigenvectors);
  double value = 1.0 - (sigma * witness).trace().real();
  for (Eigen::Index i = 0; i < w.size(); ++i) value += p(i) * std::log(w.eigenvalues(i));
  return nats_to_bits(value);
}

namespace {

// Floor on outcome probabilities so the witness stays positive definite.
constexpr double kProbabilityFloor = 1e-15;

struct BasisEval {
  double value;  // nats
  RealVector p;
  RealVector q;
};

// For a fixed measurement basis U the best eigenvalues of w are p_i / q_i,
// which turns the objective into the classical relative entropy of the
// outcome distributions.
BasisEval evaluate_basis(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                         const ComplexMatrix& u) {
  BasisEval e{0.0, diagonal_in_basis(rho, u), diagonal_in_basis(sigma, u)};
  double v = 1.0;
  for (Eigen::Index i = 0; i < e.p.size(); ++i) {
    const double p = std::max(e.p(i), kProbabilityFloor);
    const double q = std::max(e.q(i), std::numeric_limits<double>::min());
    v += std::max(e.p(i), 0.0) * std::log(p / q) - p;
  }
  e.value = v;
  return e;
}

double inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

// f(H) = tr(rho H) + 1 - tr(sigma e^H) in nats, concave in the Hermitian H,
// with gradient rho - Dexp_H[sigma] (Daleckii-Krein divided differences).
struct LogWitnessEval {
  double value = 0.0;
  ComplexMatrix grad;
  ComplexMatrix basis;
};

LogWitnessEval evaluate_log_witness(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                                    const ComplexMatrix& h) {
  if (!h.allFinite()) return {-kInfinity, ComplexMatrix(), ComplexMatrix()};
  const auto spec = eigh(h);
  const Eigen::Index d = spec.size();
  const ComplexMatrix& v = spec.eigenvectors;
  const ComplexMatrix sigma_h = v.adjoint() * sigma * v;
  const RealVector& l = spec.eigenvalues;
  ComplexMatrix dexp(d, d);
  double tr_sigma_exp = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    tr_sigma_exp += sigma_h(j, j).real() * std::exp(l(j));
    for (Eigen::Index k = 0; k < d; ++k) {
      const double delta = l(j) - l(k);
      double gamma;
      if (std::abs(delta) < 1e-12) {
        gamma = std::exp(l(k));
      } else if (std::abs(delta) < 1.0) {
        gamma = std::exp(l(k)) * std::expm1(delta) / delta;
      } else {
        gamma = (std::exp(l(j)) - std::exp(l(k))) / delta;
      }
      dexp(j, k) = gamma * sigma_h(j, k);
    }
  }
  LogWitnessEval e;
  e.value = inner(rho, h) + 1.0 - tr_sigma_exp;
  e.grad = rho - v * dexp * v.adjoint();
  e.grad = ((e.grad + e.grad.adjoint()) / 2.0).eval();
  e.basis = v;
  return e;
}

struct AscentRun {
  ComplexMatrix h;
  LogWitnessEval eval;
  std::vector<double> trace;
  bool converged = false;
};

// Limited-memory BFGS on -f over Hermitian matrices with Armijo backtracking.
AscentRun ascend(const ComplexMatrix& rho, const ComplexMatrix& sigma, ComplexMatrix h,
                 const MeasuredReConfig& config) {
  constexpr std::size_t kHistory = 8;
  AscentRun run{h, evaluate_log_witness(rho, sigma, h), {}, false};
  run.trace.push_back(nats_to_bits(run.eval.value));
  std::deque<std::pair<ComplexMatrix, ComplexMatrix>> history;  // (s, y) for the minimized -f
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const ComplexMatrix g = -run.eval.grad;
    if (g.norm() < 1e-13) {
      run.converged = true;
      break;
    }
    // Two-loop recursion.
    ComplexMatrix q = g;
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto& [s, y] = history[k];
      alpha[k] = inner(s, q) / inner(y, s);
      q -= alpha[k] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      q *= inner(s, y) / inner(y, y);
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto& [s, y] = history[k];
      q += (alpha[k] - inner(y, q) / inner(y, s)) * s;
    }
    ComplexMatrix dir = -q;
    double slope = inner(g, dir);
    if (!(slope < 0.0) || !dir.allFinite()) {
      history.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      ComplexMatrix candidate = run.h + step * dir;
      candidate = ((candidate + candidate.adjoint()) / 2.0).eval();
      LogWitnessEval e = evaluate_log_witness(rho, sigma, candidate);
      if (std::isfinite(e.value) && e.grad.allFinite() && -e.value <= -run.eval.value + 1e-4 * step * slope) {
        ComplexMatrix s_k = candidate - run.h;
        ComplexMatrix y_k = run.eval.grad - e.grad;  // gradient change of -f
        if (inner(s_k, y_k) > 1e-18) {
          history.emplace_back(std::move(s_k), std::move(y_k));
          if (history.size() > kHistory) history.pop_front();
        }
        run.h = candidate;
        run.eval = std::move(e);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      run.converged = true;
      break;
    }
    run.trace.push_back(nats_to_bits(run.eval.value));
    const std::size_t n = run.trace.size();
    if (n > config.window) {
      const double change = run.trace[n - 1] - run.trace[n - 1 - config.window];
      const double scale = std::max(1.0, std::abs(run.trace[n - 1]));
      if (change < config.relative_tolerance * scale) {
        run.converged = true;
        break;
      }
    }
  }
  return run;
}

ComplexMatrix witness_from(const ComplexMatrix& basis, const BasisEval& e) {
  const Eigen::Index d = e.p.size();
  RealVector w(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double p = std::max(e.p(i), kProbabilityFloor);
    const double q = std::max(e.q(i), std::numeric_limits<double>::min());
    w(i) = p / q;
  }
  return basis * w.cast<Complex>().asDiagonal() * basis.adjoint();
}

}  // namespace

MeasuredReSolution measured_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                                             const MeasuredReConfig& config) {
  require_same_shape(rho, sigma, "measured_relative_entropy");
  const Eigen::Index d = rho.rows();
  const ComplexMatrix rho_h = symmetrized(rho);
  ComplexMatrix sigma_h = symmetrized(sigma);
  const auto sigma_spec = eigh(sigma_h);
  if (d > 0 && sigma_spec.eigenvalues(0) <= sigma_spec.default_cutoff()) {
    const double delta = config.regularization;
    sigma_h = (1.0 - delta) * sigma_h +
              delta * ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  }

  SeededRng rng(config.seed);
  MeasuredReSolution best;
  best.value_bits = -kInfinity;
  const std::size_t starts = config.random_restarts + 1;
  for (std::size_t k = 0; k < starts; ++k) {
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    if (k > 0) {
      SeededRng child = rng.derive(k);
      const ComplexMatrix g = haar_unitary(static_cast<std::size_t>(d), child);
      RealVector l(d);
      for (Eigen::Index i = 0; i < d; ++i) l(i) = child.normal();
      h = g * l.cast<Complex>().asDiagonal() * g.adjoint();
    }
    AscentRun run = ascend(rho_h, sigma_h, std::move(h), config);
    // Measuring in the eigenbasis of H and re-optimizing the eigenvalues can
    // only raise the value: it becomes the classical relative entropy there.
    const BasisEval basis = evaluate_basis(rho_h, sigma_h, run.eval.basis);
    const bool use_basis = basis.value >= run.eval.value;
    const double value = nats_to_bits(use_basis ? basis.value : run.eval.value);
    if (value > best.value_bits) {
      best.value_bits = value;
      best.witness = use_basis ? witness_from(run.eval.basis, basis)
                               : matrix_function(eigh(run.h), [](double x) { return std::exp(x); },
                                                 -kInfinity);
      best.trace = std::move(run.trace);
      best.converged = run.converged;
    }
  }
  best.starts = starts;
  return best;
}

double ae_continuity_bound(std::size_t d, double trace_distance, double beta) {
  if (!(beta > 0.0)) throw NumericError("ae_continuity_bound: beta must be positive");
  if (beta > 1.0 + 1e-12) throw NumericError("ae_continuity_bound: beta must be <= 1");
  if (d == 0) throw NumericError("ae_continuity_bound: dimension must be >= 1");
  if (!(trace_distance >= -1e-12 && trace_distance <= 2.0 + 1e-12)) {
    throw NumericError("ae_continuity_bound: trace distance must lie in [0, 2]");
  }
  const double t = std::clamp(trace_distance, 0.0, 2.0);
  if (t == 0.0) return 0.0;
  const double entropy_term =
      std::min(-t * std::log2(t), 1.0 / (std::numbers::e * std::numbers::ln2));
  return t * std::log2(static_cast<double>(d)) + entropy_term - t * std::log2(beta) / 2.0;
}

EntropyReport entropy_report(const MultipartiteState& rho_bcr,
                             const MultipartiteState& reconstruction, bool with_measured_re,
                             const MeasuredReConfig& config) {
  const MultipartiteState sigma = rho_bcr.subsystems() == reconstruction.subsystems()
                                      ? reconstruction
                                      : permute(reconstruction, rho_bcr.labels());
  EntropyReport r;
  r.cmi_bits = cmi(rho_bcr);
  r.rel_ent_bits = relative_entropy(rho_bcr, sigma);
  r.fidelity = fidelity(rho_bcr, sigma);
  r.renyi_half_bits = r.fidelity > 0.0 ? -2.0 * std::log2(r.fidelity) : kInfinity;
  if (with_measured_re) {
    r.measured_re_bits =
        measured_relative_entropy(rho_bcr.matrix(), sigma.matrix(), config).value_bits;
    r.has_measured_re = true;
  }
  return r;
}

}  // namespace qcmi
