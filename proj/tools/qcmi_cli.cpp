// qcmi: conditional mutual information and recovery-channel experiments.
//
// Exit status: 0 success, 1 invariant violation, 2 usage or input error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcmi/experiments.hpp"
#include "qcmi/io.hpp"
#include "qcmi/markov.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  std::vector<std::size_t> dims{2, 2, 2};
  std::size_t workers = 1;
  std::string out_csv, out_json, out_svg;
};

qcmi::RunConfig run_config(const CommonOptions& o) {
  qcmi::RunConfig cfg;
  cfg.seed = o.seed;
  cfg.n_samples = o.samples;
  if (o.dims.size() != 3) throw qcmi::NumericError("--dims expects three values a,b,c");
  cfg.dims = {o.dims[0], o.dims[1], o.dims[2]};
  cfg.workers = o.workers;
  if (!o.out_csv.empty()) cfg.out_csv = o.out_csv;
  if (!o.out_json.empty()) cfg.out_json = o.out_json;
  if (!o.out_svg.empty()) cfg.out_svg = o.out_svg;
  cfg.validate();
  return cfg;
}

void emit_json(const nlohmann::json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    qcmi::write_text(path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional mutual information, recovery channels and the transpose-channel "
               "Monte Carlo experiment"};
  app.require_subcommand(1);

  // figure1
  CommonOptions fig;
  bool fig_measured = false;
  auto* figure1 = app.add_subcommand("figure1", "Transpose-channel reconstruction of random pure states");
  figure1->add_option("--seed", fig.seed, "RNG seed");
  figure1->add_option("--samples", fig.samples, "Number of states (default 10000)");
  figure1->add_option("--dims", fig.dims, "Dimensions d_B,d_C,d_R")->delimiter(',')->expected(3);
  figure1->add_option("--workers", fig.workers, "Worker threads");
  figure1->add_option("--out-csv", fig.out_csv, "Per-sample CSV");
  figure1->add_option("--out-json", fig.out_json, "Summary JSON (stdout when omitted)");
  figure1->add_option("--out-svg", fig.out_svg, "Scatter plot");
  figure1->add_flag("--measured-re", fig_measured, "Add the measured relative entropy column");

  // classical-example
  std::size_t ce_d = 16;
  double ce_eps = 0.1;
  std::string ce_out;
  auto* classical = app.add_subcommand("classical-example", "Classically correlated example state");
  classical->add_option("--d", ce_d, "d_C = d_R");
  classical->add_option("--eps", ce_eps, "Error weight in [0, 1)");
  classical->add_option("--out-json", ce_out, "Report path (stdout when omitted)");

  // verify
  CommonOptions ver;
  ver.samples = 200;
  std::size_t ver_cert = 0;
  std::string ver_source = "haar";
  std::vector<std::string> ver_checks;
  std::size_t ver_restarts = 8;
  auto* verify = app.add_subcommand("verify", "Run the inequality suite");
  verify->add_option("--seed", ver.seed, "RNG seed");
  verify->add_option("--samples", ver.samples, "Samples per check (default 200)");
  verify->add_option("--certificate-samples", ver_cert,
                     "States for the recovery certificate (default: --samples)");
  verify->add_option("--dims", ver.dims, "Dimensions d_B,d_C,d_R")->delimiter(',')->expected(3);
  verify->add_option("--source", ver_source, "Tripartite sample source: haar or markov")
      ->check(CLI::IsMember({"haar", "markov"}));
  verify->add_option("--check", ver_checks, "Run only these checks");
  verify->add_option("--restarts", ver_restarts, "Optimizer starts per state");
  verify->add_option("--out-json", ver.out_json, "Report path");

  // recover
  std::string rec_state, rec_out, rec_channel_out;
  bool rec_measured = false;
  auto* recover = app.add_subcommand("recover", "Transpose-channel report for one state");
  recover->add_option("--state", rec_state, "JSON state on B, C, R")->required();
  recover->add_flag("--measured-re", rec_measured, "Include the measured relative entropy");
  recover->add_option("--out-json", rec_out, "Report path (stdout when omitted)");
  recover->add_option("--out-channel", rec_channel_out, "Write the transpose channel as JSON");

  // optimize
  std::string opt_state, opt_out, opt_objective = "fidelity";
  qcmi::RecoveryConfig opt_cfg;
  auto* optimize = app.add_subcommand("optimize", "Search for a good recovery channel");
  optimize->add_option("--state", opt_state, "JSON state on B, C, R")->required();
  optimize->add_option("--objective", opt_objective, "fidelity, renyi_half or measured_re")
      ->check(CLI::IsMember({"fidelity", "renyi_half", "measured_re"}));
  optimize->add_option("--restarts", opt_cfg.restarts, "Starts in total (first is warm)");
  optimize->add_option("--max-iterations", opt_cfg.max_iterations, "Iterations per start");
  optimize->add_option("--env-dim", opt_cfg.env_dim, "Stinespring environment dimension");
  optimize->add_option("--seed", opt_cfg.seed, "RNG seed for random starts");
  optimize->add_option("--out-json", opt_out, "Result path (stdout when omitted)");

  // sample-state
  CommonOptions smp;
  std::size_t smp_rank = 0;
  std::string smp_out;
  auto* sample = app.add_subcommand("sample-state", "Write a random state on B, C, R as JSON");
  sample->add_option("--seed", smp.seed, "RNG seed");
  sample->add_option("--dims", smp.dims, "Dimensions d_B,d_C,d_R")->delimiter(',')->expected(3);
  sample->add_option("--rank", smp_rank, "Rank (0 = pure)");
  sample->add_option("--out", smp_out, "Path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*figure1) {
      qcmi::RunConfig cfg = run_config(fig);
      cfg.with_measured_re = fig_measured;
      const auto result = qcmi::figure1_experiment(cfg);
      qcmi::emit_outputs(result.records, result.summary, cfg);
      if (!cfg.out_json) std::cout << qcmi::summary_json(result.summary);
      if (result.summary.min_cmi_bits < -1e-9) {
        std::cerr << "strong subadditivity violated: min CMI " << result.summary.min_cmi_bits
                  << " bits\n";
        return kExitViolation;
      }
      return kExitOk;
    }
    if (*classical) {
      emit_json(qcmi::to_json(qcmi::classical_example_experiment(ce_d, ce_eps)), ce_out);
      return kExitOk;
    }
    if (*verify) {
      const qcmi::RunConfig cfg = run_config(ver);
      qcmi::SuiteOptions options;
      options.samples = cfg.n_samples;
      options.certificate_samples = ver_cert == 0 ? cfg.n_samples : ver_cert;
      options.source = ver_source == "markov" ? qcmi::SampleSource::kMarkov : qcmi::SampleSource::kHaar;
      options.only = ver_checks;
      options.recovery.restarts = ver_restarts;
      const auto report = qcmi::inequality_suite(cfg, options);
      for (const auto& c : report.checks) {
        std::printf("%-24s %s  (%zu evaluated, %zu failures, %zu allowed)\n", c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.evaluated, c.failures.size(),
                    c.failures_allowed);
        for (const auto& f : c.failures) {
          std::printf("    sample %zu seed %llu stream %llu: %s\n", f.sample,
                      static_cast<unsigned long long>(f.seed),
                      static_cast<unsigned long long>(f.stream), f.detail.c_str());
        }
      }
      if (cfg.out_json) qcmi::write_text(*cfg.out_json, qcmi::to_json(report).dump(2) + "\n");
      return report.all_passed() ? kExitOk : kExitViolation;
    }
    if (*recover) {
      const auto rho = qcmi::load_state(rec_state);
      const auto rho_bc = qcmi::partial_trace(rho, {"B", "C"});
      const auto channel = qcmi::transpose_channel(rho_bc);
      const auto sigma = qcmi::reconstruct(channel, rho);
      const auto report = qcmi::entropy_report(rho, sigma, rec_measured);
      const auto rho_br = qcmi::partial_trace(rho, {"B", "R"});
      const double off =
          qcmi::off_support_weight(qcmi::partial_trace(rho, {"B"}),
                                   qcmi::partial_trace(rho_br, {"B"}).matrix());
      nlohmann::json j = qcmi::to_json(report);
      j["strict"] = report.rel_ent_bits < report.cmi_bits - qcmi::kStrictThreshold;
      j["off_support_weight"] = off;
      j["completion_used"] = off > 1e-9;
      emit_json(j, rec_out);
      if (!rec_channel_out.empty()) {
        qcmi::write_text(rec_channel_out, qcmi::to_json(channel).dump(2) + "\n");
      }
      return report.cmi_bits < -1e-9 ? kExitViolation : kExitOk;
    }
    if (*optimize) {
      const auto rho = qcmi::load_state(opt_state);
      const auto result =
          qcmi::optimize_recovery(rho, qcmi::objective_from_string(opt_objective), opt_cfg);
      nlohmann::json j = qcmi::to_json(result);
      j["cmi_bits"] = qcmi::cmi(rho);
      emit_json(j, opt_out);
      return kExitOk;
    }
    if (*sample) {
      if (smp.dims.size() != 3) throw qcmi::NumericError("--dims expects three values a,b,c");
      qcmi::SeededRng rng(smp.seed);
      const auto subs = qcmi::bcr_subsystems({smp.dims[0], smp.dims[1], smp.dims[2]});
      const auto state =
          smp_rank == 0 ? qcmi::random_pure(subs, rng) : qcmi::random_mixed(subs, smp_rank, rng);
      emit_json(qcmi::to_json(state), smp_out);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
