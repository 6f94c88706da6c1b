#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "qcmi/experiments.hpp"
#include "qcmi/io.hpp"

using namespace qcmi;

TEST_CASE("figure1 is independent of the worker count") {
  RunConfig a;
  a.seed = 9;
  a.n_samples = 64;
  RunConfig b = a;
  b.workers = 5;
  const auto ra = figure1_experiment(a), rb = figure1_experiment(b);
  CHECK(to_csv(ra.records) == to_csv(rb.records));
  CHECK(ra.summary.strict_count == rb.summary.strict_count);
  for (std::size_t i = 0; i < ra.records.size(); ++i) CHECK(ra.records[i].sample_id == i);
}

TEST_CASE("figure1 records match direct evaluation") {
  const auto rho = figure1_sample(3, 17, {2, 2, 2});
  const auto rec = evaluate_sample(rho, 17, true);
  CHECK(rec.cmi_bits == doctest::Approx(cmi(rho)));
  const auto sigma = transpose_reconstruction(rho);
  CHECK(rec.relent_transpose_bits == doctest::Approx(relative_entropy(rho, sigma)));
  CHECK(rec.fidelity_transpose == doctest::Approx(fidelity(rho, sigma)));
  CHECK(rec.strict == (rec.relent_transpose_bits < rec.cmi_bits - kStrictThreshold));
  REQUIRE(rec.measured_re_transpose_bits.has_value());
  CHECK(*rec.measured_re_transpose_bits <= rec.relent_transpose_bits + 1e-7);
}

TEST_CASE("config validation") {
  RunConfig cfg;
  cfg.n_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), NumericError);
  cfg.n_samples = 1;
  cfg.dims = {2, 0, 2};
  CHECK_THROWS_AS(cfg.validate(), NumericError);
  cfg.dims = {2, 2, 2};
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), NumericError);
}

TEST_CASE("CSV round trip preserves doubles and infinities") {
  std::vector<ExperimentRecord> recs(2);
  recs[0] = {0, 0.1, 0.30000000000000004, 0.9, 0.2, std::nullopt, true};
  recs[1] = {1, 1.0 / 3.0, kInfinity, 0.0, 1e-300, std::nullopt, false};
  const std::string text = to_csv(recs);
  CHECK(text.rfind(kCsvHeader, 0) == 0);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].relent_transpose_bits == recs[0].relent_transpose_bits);
  CHECK(back[1].cmi_bits == recs[1].cmi_bits);
  CHECK(std::isinf(back[1].relent_transpose_bits));
  CHECK(back[0].strict);
  CHECK_FALSE(back[1].strict);
  CHECK(format_double(kInfinity) == "inf");
}

TEST_CASE("SVG and JSON outputs") {
  RunConfig cfg;
  cfg.n_samples = 10;
  const auto res = figure1_experiment(cfg);
  const std::string svg = to_svg(res.records);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("class=\"diagonal\"") != std::string::npos);
  const auto j = nlohmann::json::parse(summary_json(res.summary));
  CHECK(j["strict_count"].get<std::size_t>() == res.summary.strict_count);

  const auto dir = std::filesystem::temp_directory_path() / "qcmi_test_outputs";
  std::filesystem::create_directories(dir);
  cfg.out_csv = dir / "a.csv";
  cfg.out_json = dir / "a.json";
  cfg.out_svg = dir / "a.svg";
  emit_outputs(res.records, res.summary, cfg);
  CHECK(read_text(dir / "a.csv") == to_csv(res.records));
  CHECK(std::filesystem::exists(dir / "a.svg"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("classical example report") {
  const auto r = classical_example_experiment(16, 0.1);
  CHECK(std::abs(r.mutual_info_bits - oracle::classical_example_mi_bits(16, 0.1)) < 1e-10);
  CHECK(r.mutual_info_nats == doctest::Approx(r.mutual_info_bits * std::log(2.0)));
  CHECK(r.ceiling_bits == doctest::Approx(-std::log2(0.9)));
  // Independent scalar formulas for the two fidelities.
  double f_prod = std::pow(0.9, 1.5) + 15.0 * std::pow(0.1 / 15.0, 1.5);
  CHECK(r.fr_product_bits == doctest::Approx(-2.0 * std::log2(f_prod)).epsilon(1e-10));
  CHECK(r.fr_pointer_bits == doctest::Approx(-2.0 * std::log2(0.9)).epsilon(1e-10));
  CHECK(std::abs(r.cmi_bits - r.mutual_info_bits) < 1e-9);
  CHECK(r.ratio_to_ceiling == doctest::Approx(r.mutual_info_bits / r.ceiling_bits));
}

TEST_CASE("inequality suite passes and the mixed-log-base mutation is caught") {
  RunConfig cfg;
  SuiteOptions opt;
  opt.samples = 20;
  opt.certificate_samples = 5;
  const auto ok = inequality_suite(cfg, opt);
  for (const auto& c : ok.checks) {
    INFO(c.name);
    CHECK(c.passed);
  }
  CHECK(ok.checks.size() == suite_check_names().size());

  opt.only = {"classical_equality"};
  opt.mutation = SuiteMutation::kMixedLogBase;
  const auto bad = inequality_suite(cfg, opt);
  REQUIRE(bad.checks.size() == 1);
  CHECK_FALSE(bad.checks[0].passed);
  CHECK_FALSE(bad.checks[0].failures.empty());
}

TEST_CASE("suite over Markov samples") {
  RunConfig cfg;
  SuiteOptions opt;
  opt.samples = 10;
  opt.certificate_samples = 3;
  opt.source = SampleSource::kMarkov;
  CHECK(inequality_suite(cfg, opt).all_passed());
}

TEST_CASE("state and channel JSON round trip") {
  SeededRng rng(4);
  const auto s = random_mixed({{"B", 2}, {"C", 3}}, 3, rng);
  const auto s2 = state_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(s2.labels() == s.labels());
  CHECK(relative_frobenius(s2.matrix(), s.matrix()) < 1e-15);
  const auto ch = transpose_channel(s);
  const auto ch2 = channel_from_json(nlohmann::json::parse(to_json(ch).dump()));
  CHECK(relative_frobenius(ch2.choi(), ch.choi()) < 1e-15);
  nlohmann::json broken = to_json(s);
  broken["matrix_re"][0][0] = 5.0;
  CHECK_THROWS(state_from_json(broken));
  CHECK_THROWS(load_state("/nonexistent/state.json"));
}
