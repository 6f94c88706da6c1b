#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcmi/markov.hpp"
#include "qcmi/states.hpp"

namespace qcmi {

/// `strict` threshold: relent < cmi - kStrictThreshold.
inline constexpr double kStrictThreshold = 1e-9;

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 10000;
  std::array<std::size_t, 3> dims{2, 2, 2};  // (d_B, d_C, d_R)
  std::size_t workers = 1;
  bool with_measured_re = false;
  std::optional<std::filesystem::path> out_csv;
  std::optional<std::filesystem::path> out_json;
  std::optional<std::filesystem::path> out_svg;

  void validate() const;
};

struct ExperimentRecord {
  std::uint64_t sample_id = 0;
  double cmi_bits = 0.0;
  double relent_transpose_bits = 0.0;  // may be +infinity
  double fidelity_transpose = 0.0;
  double shalf_transpose_bits = 0.0;
  std::optional<double> measured_re_transpose_bits;
  bool strict = false;
};

struct Figure1Summary {
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::array<std::size_t, 3> dims{};
  std::size_t workers = 1;
  std::size_t strict_count = 0;
  double strict_fraction = 0.0;
  double mean_cmi_bits = 0.0;
  double mean_relent_transpose_bits = 0.0;  // +infinity if any record is infinite
  std::size_t infinite_relent_count = 0;
  double mean_fidelity_transpose = 0.0;
  double min_cmi_bits = 0.0;
  double runtime_seconds = 0.0;
};

struct Figure1Result {
  std::vector<ExperimentRecord> records;
  Figure1Summary summary;
};

/// Tripartite subsystem list (B, C, R) for the configured dimensions.
SubsystemList bcr_subsystems(const std::array<std::size_t, 3>& dims);

/// Evaluates one state: CMI and the transpose-channel reconstruction panel.
ExperimentRecord evaluate_sample(const MultipartiteState& rho_bcr, std::uint64_t sample_id,
                                 bool with_measured_re);

/// Haar-random pure state for sample `sample_id`, drawn from the stream
/// derived from (seed, sample_id).
MultipartiteState figure1_sample(std::uint64_t seed, std::uint64_t sample_id,
                                 const std::array<std::size_t, 3>& dims);

Figure1Summary summarize(const std::vector<ExperimentRecord>& records, const RunConfig& cfg);

/// Samples n Haar-random pure states, records sorted by sample_id; the output
/// does not depend on the worker count.
Figure1Result figure1_experiment(const RunConfig& cfg);

struct ClassicalExampleReport {
  std::size_t d = 0;
  double eps = 0.0;
  double mutual_info_bits = 0.0;     // I(C:R), the measured-RE bound
  double mutual_info_nats = 0.0;
  double fr_product_bits = 0.0;      // -2 log2 F(rho_CR, rho_C (x) rho_R)
  double fr_product_nats = 0.0;
  double fr_pointer_bits = 0.0;      // -2 log2 F(rho_CR, |0><0|_C (x) rho_R)
  double fr_pointer_nats = 0.0;
  double ceiling_bits = 0.0;         // -log2(1 - eps)
  double ceiling_nats = 0.0;
  double ratio_to_ceiling = 0.0;     // mutual_info / ceiling
  double ratio_to_product = 0.0;     // mutual_info / fr_product
  double cmi_bits = 0.0;             // I(C:R|B) of the full state
};

ClassicalExampleReport classical_example_experiment(std::size_t d, double eps);

/// One entry of the inequality suite.
struct CheckFailure {
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string detail;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t evaluated = 0;
  std::size_t failures_allowed = 0;
  std::vector<CheckFailure> failures;
  double worst = 0.0;  // largest violation margin observed (<= 0 is fine)
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

enum class SampleSource { kHaar, kMarkov };

enum class SuiteMutation {
  kNone,
  kMixedLogBase,  // relative entropy in nats against CMI in bits
};

struct SuiteOptions {
  std::size_t samples = 200;
  std::size_t certificate_samples = 200;
  SampleSource source = SampleSource::kHaar;
  SuiteMutation mutation = SuiteMutation::kNone;
  RecoveryConfig recovery{};
  std::vector<std::string> only;  // empty runs every check
};

/// Names of the checks, in run order.
const std::vector<std::string>& suite_check_names();

SuiteReport inequality_suite(const RunConfig& cfg, const SuiteOptions& options = {});

// ---- output ----

inline const char* kCsvHeader =
    "sample_id,cmi_bits,relent_transpose_bits,fidelity_transpose,shalf_transpose_bits,strict";

std::string format_double(double x);
std::string to_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_csv(const std::string& text);
std::string summary_json(const Figure1Summary& summary);
std::string to_svg(const std::vector<ExperimentRecord>& records);

/// Writes whichever of CSV / JSON / SVG have paths in `cfg`.
void emit_outputs(const std::vector<ExperimentRecord>& records, const Figure1Summary& summary,
                  const RunConfig& cfg);

}  // namespace qcmi
