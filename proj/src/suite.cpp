#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "qcmi/experiments.hpp"

namespace qcmi {

bool SuiteReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const std::vector<std::string>& suite_check_names() {
  static const std::vector<std::string> names{
      "ssa",           "pure_cmi_identity", "classical_equality",
      "ordering_panel", "data_processing",  "relative_entropy_shift",
      "continuity_ceiling", "markov_gap",   "theorem1_certificate"};
  return names;
}

namespace {

std::string describe(std::initializer_list<std::pair<const char*, double>> values) {
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [k, v] : values) {
    if (!first) os << ", ";
    os << k << "=" << v;
    first = false;
  }
  return os.str();
}

// Per-check sample streams: (seed, check) -> sample.
class CheckContext {
 public:
  CheckContext(const RunConfig& cfg, std::size_t check_index, std::string name)
      : seed_(cfg.seed), base_(SeededRng(cfg.seed).derive(check_index + 1)) {
    result_.name = std::move(name);
  }

  SeededRng sample_rng(std::size_t i) const { return base_.derive(i); }

  // Records a sample whose violation margin (<= 0 means satisfied) is `margin`.
  void record(std::size_t i, double margin, const std::string& detail) {
    ++result_.evaluated;
    if (result_.evaluated == 1 || margin > result_.worst) result_.worst = margin;
    if (margin > 0.0) {
      result_.failures.push_back({i, seed_, sample_rng(i).stream(), detail});
    }
  }

  CheckResult finish(std::size_t allowed = 0) {
    result_.failures_allowed = allowed;
    result_.passed = result_.failures.size() <= allowed;
    return std::move(result_);
  }

 private:
  std::uint64_t seed_;
  SeededRng base_;
  CheckResult result_;
};

MultipartiteState suite_tripartite(const RunConfig& cfg, SampleSource source, SeededRng& rng) {
  if (source == SampleSource::kMarkov) {
    return markov_state(random_markov_spec(cfg.dims[1], cfg.dims[2], cfg.dims[0], rng));
  }
  return random_pure(bcr_subsystems(cfg.dims), rng);
}

std::size_t random_dim(SeededRng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(rng.uniform_int(lo, hi));
}

// Random classical table over (X, Y, Z); roughly one table in three has
// zero entries.
std::vector<double> random_table(std::size_t n, SeededRng& rng) {
  std::vector<double> p(n);
  const bool sparse = rng.uniform() < 1.0 / 3.0;
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(rng.uniform_open_zero());
    if (sparse && rng.uniform() < 0.3) x = 0.0;
    total += x;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : p) x /= total;
  return p;
}

CheckResult check_ssa(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "ssa");
  for (std::size_t i = 0; i < 2 * opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    MultipartiteState rho = i < opt.samples || opt.source == SampleSource::kMarkov
                                ? suite_tripartite(cfg, opt.source, rng)
                                : random_mixed(bcr_subsystems(cfg.dims), random_dim(rng, 1, 8), rng);
    const double value = cmi(rho);
    ctx.record(i, -1e-9 - value, describe({{"cmi_bits", value}}));
  }
  return ctx.finish();
}

CheckResult check_pure_identity(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "pure_cmi_identity");
  for (std::size_t i = 0; i < opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const MultipartiteState rho = random_pure(bcr_subsystems(cfg.dims), rng);
    const double s_b = von_neumann(partial_trace(rho, {"B"}));
    const double s_c = von_neumann(partial_trace(rho, {"C"}));
    const double s_r = von_neumann(partial_trace(rho, {"R"}));
    const double identity_gap = std::abs(cmi(rho) - (s_c + s_r - s_b));
    const double dual_gap = std::max(
        {std::abs(von_neumann(partial_trace(rho, {"B", "C"})) - s_r),
         std::abs(von_neumann(partial_trace(rho, {"B", "R"})) - s_c),
         std::abs(von_neumann(partial_trace(rho, {"C", "R"})) - s_b)});
    ctx.record(i, std::max(identity_gap, dual_gap) - 1e-8,
               describe({{"identity_gap", identity_gap}, {"duality_gap", dual_gap}}));
  }
  return ctx.finish();
}

CheckResult check_classical(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "classical_equality");
  for (std::size_t i = 0; i < opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const std::size_t dx = random_dim(rng, 2, 4), dy = random_dim(rng, 2, 4),
                      dz = random_dim(rng, 2, 4);
    const auto p = random_table(dx * dy * dz, rng);
    // q*(x, y, z) = p(x, y) p(y, z) / p(y)
    std::vector<double> pxy(dx * dy, 0.0), pyz(dy * dz, 0.0), py(dy, 0.0);
    for (std::size_t x = 0; x < dx; ++x)
      for (std::size_t y = 0; y < dy; ++y)
        for (std::size_t z = 0; z < dz; ++z) {
          const double v = p[(x * dy + y) * dz + z];
          pxy[x * dy + y] += v;
          pyz[y * dz + z] += v;
          py[y] += v;
        }
    std::vector<double> q(p.size(), 0.0);
    double qsum = 0.0;
    for (std::size_t x = 0; x < dx; ++x)
      for (std::size_t y = 0; y < dy; ++y)
        for (std::size_t z = 0; z < dz; ++z) {
          if (py[y] > 0.0) q[(x * dy + y) * dz + z] = pxy[x * dy + y] * pyz[y * dz + z] / py[y];
          qsum += q[(x * dy + y) * dz + z];
        }
    for (auto& v : q) v /= qsum;
    const SubsystemList subs{{"C", dx}, {"B", dy}, {"R", dz}};
    const MultipartiteState rho = classical_state(p, subs);
    const MultipartiteState markov = classical_state(q, subs);
    const double info = cmi(rho);
    double divergence = relative_entropy(rho, markov);
    if (opt.mutation == SuiteMutation::kMixedLogBase) divergence = bits_to_nats(divergence);
    const double gap = std::abs(info - divergence);
    ctx.record(i, gap - 1e-9, describe({{"cmi_bits", info}, {"divergence", divergence}}));
  }
  return ctx.finish();
}

CheckResult check_ordering(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "ordering_panel");
  for (std::size_t i = 0; i < opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const std::size_t d = random_dim(rng, 2, 8);
    const SubsystemList subs{{"X", d}};
    const MultipartiteState rho = random_mixed(subs, random_dim(rng, 1, d), rng);
    const MultipartiteState sigma = random_mixed(subs, random_dim(rng, 1, d), rng);
    const double s = relative_entropy(rho, sigma);
    const double shalf = renyi_half(rho, sigma);
    const double ms = measured_relative_entropy(rho.matrix(), sigma.matrix()).value_bits;
    const double upper = std::isinf(s) ? -1.0 : ms - s - 1e-7;
    const double lower = std::isinf(shalf) ? 1.0 : shalf - ms - 1e-6;
    ctx.record(i, std::max(upper, lower),
               describe({{"ms", ms}, {"s", s}, {"shalf", shalf}, {"d", double(d)}}));
  }
  return ctx.finish();
}

CheckResult check_dpi(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "data_processing");
  for (std::size_t i = 0; i < opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const std::size_t din = random_dim(rng, 2, 4), dout = random_dim(rng, 2, 4);
    const SubsystemList in{{"X", din}}, out{{"Y", dout}};
    const MultipartiteState rho = random_mixed(in, random_dim(rng, 1, din), rng);
    const MultipartiteState sigma = random_mixed(in, random_dim(rng, 1, din), rng);
    const Channel ch = random_channel(in, out, random_dim(rng, (din + dout - 1) / dout, din * dout), rng);
    const auto lr = apply(ch, rho, {"X"});
    const auto ls = apply(ch, sigma, {"X"});
    const double s_before = relative_entropy(rho, sigma);
    const double s_after = relative_entropy(lr, ls);
    const double f_before = fidelity(rho, sigma);
    const double f_after = fidelity(lr, ls);
    const double s_margin = std::isinf(s_before) ? -1.0 : s_after - s_before - 1e-7;
    ctx.record(i, std::max(s_margin, f_before - f_after - 1e-9),
               describe({{"s_before", s_before}, {"s_after", s_after}, {"f_before", f_before},
                         {"f_after", f_after}}));
  }
  return ctx.finish();
}

CheckResult check_shift(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "relative_entropy_shift");
  for (std::size_t i = 0; i < opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const std::size_t d = random_dim(rng, 2, 6);
    const SubsystemList subs{{"X", d}};
    const MultipartiteState sigma = random_mixed(subs, d, rng);
    const MultipartiteState pi = random_mixed(subs, random_dim(rng, 1, d), rng);
    const MultipartiteState rho = random_mixed(subs, random_dim(rng, 1, d), rng);
    // Smallest lambda with pi <= 2^lambda sigma.
    const ComplexMatrix w = inv_sqrtm_psd(sigma.matrix());
    const double ratio = eigh(ComplexMatrix(w * pi.matrix() * w)).eigenvalues.maxCoeff();
    const double lambda = std::log2(ratio);
    const double s_pi = relative_entropy(rho, pi);
    const double s_sigma = relative_entropy(rho, sigma);
    const double margin = std::isinf(s_pi) ? -1.0 : s_sigma - lambda - s_pi - 1e-7;
    ctx.record(i, margin,
               describe({{"s_rho_pi", s_pi}, {"s_rho_sigma", s_sigma}, {"lambda", lambda}}));
  }
  return ctx.finish();
}

CheckResult check_continuity(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "continuity_ceiling");
  for (std::size_t i = 0; i < opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const std::size_t d = random_dim(rng, 2, 8);
    const SubsystemList subs{{"X", d}};
    const MultipartiteState rho = random_mixed(subs, random_dim(rng, 1, d), rng);
    const MultipartiteState sigma = random_mixed(subs, d, rng);
    const double t = trace_norm(ComplexMatrix(rho.matrix() - sigma.matrix()));
    const double beta = min_eigenvalue(sigma.matrix());
    const double s = relative_entropy(rho, sigma);
    const double bound = ae_continuity_bound(d, t, beta);
    ctx.record(i, s - bound, describe({{"s", s}, {"bound", bound}, {"T", t}, {"beta", beta}}));
  }
  return ctx.finish();
}

CheckResult check_markov_gap(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "markov_gap");
  for (std::size_t i = 0; i < opt.samples; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const MultipartiteState rho = i % 2 == 0 ? suite_tripartite(cfg, opt.source, rng)
                                             : random_mixed(bcr_subsystems(cfg.dims),
                                                            random_dim(rng, 1, 8), rng);
    const MultipartiteState sigma =
        markov_state(random_markov_spec(cfg.dims[1], cfg.dims[2], cfg.dims[0], rng));
    const double gap = markov_gap(rho, sigma);
    ctx.record(i, std::isinf(gap) ? -1.0 : -gap - 1e-7, describe({{"gap", gap}}));
  }
  return ctx.finish();
}

CheckResult check_certificate(const RunConfig& cfg, const SuiteOptions& opt, std::size_t idx) {
  CheckContext ctx(cfg, idx, "theorem1_certificate");
  const std::size_t n = opt.certificate_samples;
  for (std::size_t i = 0; i < n; ++i) {
    SeededRng rng = ctx.sample_rng(i);
    const MultipartiteState rho = suite_tripartite(cfg, opt.source, rng);
    const double info = cmi(rho);
    const OptimizerResult res = optimize_recovery(rho, ObjectiveKind::kFidelity, opt.recovery);
    const double shalf = -2.0 * std::log2(res.best_value);
    ctx.record(i, shalf - info - 1e-4,
               describe({{"shalf_bits", shalf}, {"cmi_bits", info}, {"fidelity", res.best_value}}));
  }
  return ctx.finish(n / 100);
}

}  // namespace

SuiteReport inequality_suite(const RunConfig& cfg, const SuiteOptions& options) {
  for (std::size_t d : cfg.dims) {
    if (d < 2) throw NumericError("inequality_suite: every dimension must be >= 2");
  }
  using Check = CheckResult (*)(const RunConfig&, const SuiteOptions&, std::size_t);
  static constexpr Check kChecks[] = {check_ssa,      check_pure_identity, check_classical,
                                      check_ordering, check_dpi,           check_shift,
                                      check_continuity, check_markov_gap,  check_certificate};
  const auto& names = suite_check_names();
  for (const auto& name : options.only) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw NumericError("inequality_suite: unknown check '" + name + "'");
    }
  }
  SuiteReport report;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), names[k]) == options.only.end()) {
      continue;
    }
    report.checks.push_back(kChecks[k](cfg, options, k));
  }
  return report;
}

}  // namespace qcmi
