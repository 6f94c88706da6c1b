#include "qcmi/markov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace qcmi {

void validate(const MarkovSpec& spec) {
  if (spec.blocks.empty()) throw NumericError("MarkovSpec: at least one block is required");
  double total = 0.0;
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    if (!(blk.weight >= 0.0)) throw NumericError("MarkovSpec: block weights must be >= 0");
    total += blk.weight;
    if (blk.left.subsystems().size() != 2 || blk.right.subsystems().size() != 2) {
      throw NumericError("MarkovSpec: block states must be bipartite");
    }
    if (blk.left.subsystems()[0].dim != spec.c_dim || blk.right.subsystems()[1].dim != spec.r_dim) {
      std::ostringstream os;
      os << "MarkovSpec: block " << k << " has C/R dimensions (" << blk.left.subsystems()[0].dim
         << ", " << blk.right.subsystems()[1].dim << "), expected (" << spec.c_dim << ", "
         << spec.r_dim << ")";
      throw NumericError(os.str());
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw NumericError("MarkovSpec: weights must sum to 1");
}

std::vector<MarkovBlockLayout> markov_layout(const MarkovSpec& spec) {
  std::vector<MarkovBlockLayout> out;
  std::size_t offset = 0;
  for (const auto& blk : spec.blocks) {
    const std::size_t dl = blk.left.subsystems()[1].dim;
    const std::size_t dr = blk.right.subsystems()[0].dim;
    out.push_back({offset, dl, dr});
    offset += dl * dr;
  }
  return out;
}

MultipartiteState markov_state(const MarkovSpec& spec) {
  validate(spec);
  const auto layout = markov_layout(spec);
  const std::size_t db = layout.back().offset + layout.back().left_dim * layout.back().right_dim;
  const std::size_t dc = spec.c_dim;
  const std::size_t dr = spec.r_dim;
  const auto n = static_cast<Eigen::Index>(db * dc * dr);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);

  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    const auto& lay = layout[k];
    // Block matrix on (C, B_L, B_R, R).
    const ComplexMatrix block = blk.weight * kron(blk.left.matrix(), blk.right.matrix());
    const std::size_t dl = lay.left_dim, dbr = lay.right_dim;
    auto target = [&](std::size_t idx) {
      const std::size_t r = idx % dr;
      const std::size_t br = (idx / dr) % dbr;
      const std::size_t bl = (idx / (dr * dbr)) % dl;
      const std::size_t c = idx / (dr * dbr * dl);
      const std::size_t b = lay.offset + bl * dbr + br;
      return static_cast<Eigen::Index>((b * dc + c) * dr + r);
    };
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      const Eigen::Index ti = target(static_cast<std::size_t>(i));
      for (Eigen::Index j = 0; j < block.cols(); ++j) {
        m(ti, target(static_cast<std::size_t>(j))) += block(i, j);
      }
    }
  }
  return MultipartiteState(std::move(m), {{"B", db}, {"C", dc}, {"R", dr}});
}

MarkovSpec random_markov_spec(std::size_t c_dim, std::size_t r_dim, std::size_t b_dim,
                              SeededRng& rng) {
  if (b_dim == 0) throw NumericError("random_markov_spec: b_dim must be >= 1");
  MarkovSpec spec{c_dim, r_dim, {}};
  std::size_t remaining = b_dim;
  std::vector<double> weights;
  while (remaining > 0) {
    const auto dl = static_cast<std::size_t>(rng.uniform_int(1, std::min<std::size_t>(2, remaining)));
    const auto dr =
        static_cast<std::size_t>(rng.uniform_int(1, std::min<std::size_t>(2, remaining / dl)));
    remaining -= dl * dr;
    MultipartiteState left = random_mixed({{"C", c_dim}, {"BL", dl}}, c_dim * dl, rng);
    MultipartiteState right = random_mixed({{"BR", dr}, {"R", r_dim}}, dr * r_dim, rng);
    weights.push_back(-std::log(rng.uniform_open_zero()));
    spec.blocks.push_back({0.0, std::move(left), std::move(right)});
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double assigned = 0.0;
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    spec.blocks[k].weight = weights[k] / total;
    assigned += spec.blocks[k].weight;
  }
  spec.blocks.back().weight += 1.0 - assigned;
  return spec;
}

MarkovSpec classical_b_markov_spec(const std::vector<double>& weights,
                                   const std::vector<MultipartiteState>& c_states,
                                   const std::vector<MultipartiteState>& r_states) {
  if (weights.empty() || weights.size() != c_states.size() || weights.size() != r_states.size()) {
    throw NumericError("classical_b_markov_spec: mismatched block lists");
  }
  const MultipartiteState trivial_l(ComplexMatrix::Ones(1, 1), {{"BL", 1}});
  const MultipartiteState trivial_r(ComplexMatrix::Ones(1, 1), {{"BR", 1}});
  MarkovSpec spec{c_states.front().dim(), r_states.front().dim(), {}};
  for (std::size_t k = 0; k < weights.size(); ++k) {
    spec.blocks.push_back({weights[k], tensor(relabel(c_states[k], {"C"}), trivial_l),
                           tensor(trivial_r, relabel(r_states[k], {"R"}))});
  }
  validate(spec);
  return spec;
}

double markov_gap(const MultipartiteState& rho, const MultipartiteState& sigma_markov) {
  const MultipartiteState sigma = rho.subsystems() == sigma_markov.subsystems()
                                      ? sigma_markov
                                      : permute(sigma_markov, rho.labels());
  const double s = relative_entropy(rho, sigma);
  if (std::isinf(s)) return kInfinity;
  return s - cmi(rho);
}

MultipartiteState reconstruct(const Channel& ch, const MultipartiteState& rho_bcr) {
  const MultipartiteState rho_br = partial_trace(rho_bcr, {"B", "R"});
  const MultipartiteState out = apply(ch, rho_br, {"B"});
  return out.labels() == rho_bcr.labels() ? out : permute(out, rho_bcr.labels());
}

MultipartiteState transpose_reconstruction(const MultipartiteState& rho_bcr) {
  return reconstruct(transpose_channel(partial_trace(rho_bcr, {"B", "C"})), rho_bcr);
}

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kFidelity:
      return "fidelity";
    case ObjectiveKind::kRenyiHalf:
      return "renyi_half";
    case ObjectiveKind::kMeasuredRe:
      return "measured_re";
  }
  return "unknown";
}

ObjectiveKind objective_from_string(const std::string& name) {
  if (name == "fidelity") return ObjectiveKind::kFidelity;
  if (name == "renyi_half") return ObjectiveKind::kRenyiHalf;
  if (name == "measured_re") return ObjectiveKind::kMeasuredRe;
  throw NumericError("unknown objective '" + name + "' (fidelity, renyi_half, measured_re)");
}

double measured_re_of_recovery(const MultipartiteState& rho_bcr, const Channel& ch,
                               const MeasuredReConfig& config) {
  const MultipartiteState sigma = reconstruct(ch, rho_bcr);
  return measured_relative_entropy(rho_bcr.matrix(), sigma.matrix(), config).value_bits;
}

double recovery_objective(const MultipartiteState& rho_bcr, const Channel& ch, ObjectiveKind kind,
                          const MeasuredReConfig& measured) {
  switch (kind) {
    case ObjectiveKind::kFidelity:
      return fidelity(rho_bcr, reconstruct(ch, rho_bcr));
    case ObjectiveKind::kRenyiHalf:
      return renyi_half(rho_bcr, reconstruct(ch, rho_bcr));
    case ObjectiveKind::kMeasuredRe:
      return measured_re_of_recovery(rho_bcr, ch, measured);
  }
  throw NumericError("recovery_objective: unknown objective");
}

namespace {

// Matrix-level view of the recovery problem with rho on (B, C, R).
class RecoveryProblem {
 public:
  RecoveryProblem(const MultipartiteState& rho_bcr, ObjectiveKind kind,
                  const MeasuredReConfig& measured)
      : kind_(kind), measured_(measured) {
    const MultipartiteState ordered = permute(rho_bcr, {"B", "C", "R"});
    db_ = ordered.dim_of("B");
    dc_ = ordered.dim_of("C");
    dr_ = ordered.dim_of("R");
    rho_ = ordered.matrix();
    rho_br_ = partial_trace(ordered, {"B", "R"}).matrix();
    sqrt_rho_ = sqrtm_psd(rho_);
  }

  std::size_t db() const { return db_; }
  std::size_t dout() const { return db_ * dc_; }

  ComplexMatrix reconstructed(const ComplexMatrix& v) const {
    const auto dout = static_cast<Eigen::Index>(this->dout());
    const auto r = static_cast<Eigen::Index>(dr_);
    const Eigen::Index env = v.rows() / dout;
    const ComplexMatrix id_r = ComplexMatrix::Identity(r, r);
    ComplexMatrix sigma = ComplexMatrix::Zero(dout * r, dout * r);
    for (Eigen::Index e = 0; e < env; ++e) {
      const ComplexMatrix ke = kron(v.block(e * dout, 0, dout, v.cols()), id_r);
      sigma.noalias() += ke * rho_br_ * ke.adjoint();
    }
    return (sigma + sigma.adjoint()) / 2.0;
  }

  // Objective oriented for ascent: fidelity, or the negated divergence.
  double ascent_value(const ComplexMatrix& v) const {
    const ComplexMatrix sigma = reconstructed(v);
    if (kind_ == ObjectiveKind::kMeasuredRe) {
      return -measured_relative_entropy(rho_, sigma, measured_).value_bits;
    }
    return fidelity_of(sigma);
  }

  double report_value(double ascent) const {
    switch (kind_) {
      case ObjectiveKind::kFidelity:
        return ascent;
      case ObjectiveKind::kRenyiHalf:
        return ascent > 0.0 ? -2.0 * std::log2(ascent) : kInfinity;
      case ObjectiveKind::kMeasuredRe:
        return -ascent;
    }
    return ascent;
  }

  // Euclidean gradient of the ascent objective with respect to V.
  ComplexMatrix gradient(const ComplexMatrix& v, double fd_step) const {
    if (kind_ == ObjectiveKind::kMeasuredRe) return fd_gradient(v, fd_step);
    const ComplexMatrix sigma = reconstructed(v);
    const ComplexMatrix product = sqrt_rho_ * sqrtm_psd(sigma);
    Eigen::JacobiSVD<ComplexMatrix> svd(product, Eigen::ComputeFullU);
    const RealVector s = svd.singularValues();
    const double cut = s.size() > 0 ? 1e-8 * s(0) : 0.0;
    RealVector inv(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > cut ? 1.0 / s(i) : 0.0;
    const ComplexMatrix& u = svd.matrixU();
    const ComplexMatrix q =
        sqrt_rho_ * u * inv.cast<Complex>().asDiagonal() * u.adjoint() * sqrt_rho_;

    const auto dout = static_cast<Eigen::Index>(this->dout());
    const auto r = static_cast<Eigen::Index>(dr_);
    const Eigen::Index env = v.rows() / dout;
    const ComplexMatrix id_r = ComplexMatrix::Identity(r, r);
    ComplexMatrix grad(v.rows(), v.cols());
    for (Eigen::Index e = 0; e < env; ++e) {
      const ComplexMatrix ke = kron(v.block(e * dout, 0, dout, v.cols()), id_r);
      grad.block(e * dout, 0, dout, v.cols()) = ops::trace_trailing(q * ke * rho_br_, dr_);
    }
    return grad;
  }

 private:
  double fidelity_of(const ComplexMatrix& sigma) const {
    const ComplexMatrix product = sqrt_rho_ * sqrtm_psd(sigma);
    return std::min(trace_norm(product), 1.0);
  }

  // Central differences of -MS with the optimal witness w at V held fixed
  // (envelope theorem): -MS(V') ~ -tr(rho ln w) + ln tr(sigma(V') w), so each
  // probe costs one reconstruction instead of an inner optimization.
  ComplexMatrix fd_gradient(const ComplexMatrix& v, double h) const {
    const auto sol = measured_relative_entropy(rho_, reconstructed(v), measured_);
    const ComplexMatrix& w = sol.witness;
    auto surrogate = [&](const ComplexMatrix& vp) {
      return std::log((reconstructed(vp) * w).trace().real()) / kLn2;
    };
    ComplexMatrix grad = ComplexMatrix::Zero(v.rows(), v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (const Complex unit : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
          ComplexMatrix plus = v, minus = v;
          plus(i, j) += h * unit;
          minus(i, j) -= h * unit;
          const double d =
              (surrogate(orthonormalize(plus)) - surrogate(orthonormalize(minus))) / (2.0 * h);
          grad(i, j) += d * unit;
        }
      }
    }
    return grad;
  }

  ObjectiveKind kind_;
  MeasuredReConfig measured_;
  std::size_t db_ = 0, dc_ = 0, dr_ = 0;
  ComplexMatrix rho_, rho_br_, sqrt_rho_;
};

ComplexMatrix tangent_projection(const ComplexMatrix& v, const ComplexMatrix& g) {
  const ComplexMatrix vg = v.adjoint() * g;
  return g - v * ((vg + vg.adjoint()) / 2.0);
}

struct StartResult {
  ComplexMatrix v;
  double value;  // ascent orientation
  std::vector<double> trace;
  bool converged = false;
};

StartResult ascend(const RecoveryProblem& problem, ComplexMatrix v, const RecoveryConfig& config) {
  constexpr std::size_t kWindow = 5;
  StartResult res{std::move(v), 0.0, {}, false};
  res.value = problem.ascent_value(res.v);
  res.trace.push_back(problem.report_value(res.value));
  double step = 1.0;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const ComplexMatrix dir = tangent_projection(res.v, problem.gradient(res.v, config.fd_step));
    const double slope = dir.squaredNorm();
    if (slope < 1e-24) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    for (int tries = 0; tries < 50; ++tries) {
      ComplexMatrix candidate = orthonormalize(res.v + step * dir);
      const double value = problem.ascent_value(candidate);
      if (value >= res.value + 1e-4 * step * slope) {
        res.v = std::move(candidate);
        res.value = value;
        accepted = true;
        step = std::min(step * 2.0, 1e6);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    res.trace.push_back(problem.report_value(res.value));
    const std::size_t n = res.trace.size();
    if (n > kWindow) {
      const double change = std::abs(res.trace[n - 1] - res.trace[n - 1 - kWindow]);
      if (change < config.step_tolerance * std::max(1.0, std::abs(res.trace[n - 1]))) {
        res.converged = true;
        break;
      }
    }
  }
  return res;
}

}  // namespace

OptimizerResult optimize_recovery(const MultipartiteState& rho_bcr, ObjectiveKind kind,
                                  const RecoveryConfig& config) {
  for (const char* label : {"B", "C", "R"}) {
    if (!rho_bcr.has(label)) {
      throw NumericError(std::string("optimize_recovery: state lacks subsystem '") + label + "'");
    }
  }
  if (rho_bcr.subsystems().size() != 3) {
    throw NumericError("optimize_recovery: expected a tripartite state on B, C, R");
  }
  if (config.restarts == 0) throw NumericError("optimize_recovery: restart budget must be >= 1");
  const RecoveryProblem problem(rho_bcr, kind, config.measured);
  const SubsystemList input{{"B", rho_bcr.dim_of("B")}};
  const SubsystemList output{{"B", rho_bcr.dim_of("B")}, {"C", rho_bcr.dim_of("C")}};

  const Channel warm = transpose_channel(partial_trace(rho_bcr, {"B", "C"}));
  std::size_t env = config.env_dim == 0 ? problem.dout() : config.env_dim;
  env = std::max(env, kraus_rank(warm));

  SeededRng rng(config.seed);
  StartResult best{};
  bool have_best = false;
  double warm_value = 0.0;
  for (std::size_t k = 0; k < config.restarts; ++k) {
    ComplexMatrix v0;
    if (k == 0) {
      v0 = stinespring_of(warm, env).matrix();
    } else {
      SeededRng child = rng.derive(k);
      v0 = haar_isometry(env * problem.dout(), problem.db(), child);
    }
    StartResult res = ascend(problem, std::move(v0), config);
    if (k == 0) warm_value = res.trace.front();
    if (!have_best || res.value > best.value) {
      best = std::move(res);
      have_best = true;
    }
  }

  Channel channel = stinespring_to_channel(Isometry(best.v, problem.dout(), env), input, output);
  const double value = recovery_objective(rho_bcr, channel, kind, config.measured);
  return OptimizerResult{std::move(channel), value,         kind, std::move(best.trace),
                         config.restarts,    best.converged, warm_value};
}

}  // namespace qcmi
