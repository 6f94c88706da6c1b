#include "qcmi/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qcmi/io.hpp"

namespace qcmi {

void RunConfig::validate() const {
  if (n_samples < 1) throw NumericError("RunConfig: n_samples must be >= 1");
  for (std::size_t d : dims) {
    if (d < 2) throw NumericError("RunConfig: every dimension must be >= 2");
  }
  if (workers < 1) throw NumericError("RunConfig: workers must be >= 1");
}

SubsystemList bcr_subsystems(const std::array<std::size_t, 3>& dims) {
  return {{"B", dims[0]}, {"C", dims[1]}, {"R", dims[2]}};
}

ExperimentRecord evaluate_sample(const MultipartiteState& rho_bcr, std::uint64_t sample_id,
                                 bool with_measured_re) {
  const MultipartiteState sigma = transpose_reconstruction(rho_bcr);
  const EntropyReport report = entropy_report(rho_bcr, sigma, with_measured_re);
  ExperimentRecord rec;
  rec.sample_id = sample_id;
  rec.cmi_bits = report.cmi_bits;
  rec.relent_transpose_bits = report.rel_ent_bits;
  rec.fidelity_transpose = report.fidelity;
  rec.shalf_transpose_bits = report.renyi_half_bits;
  if (with_measured_re) rec.measured_re_transpose_bits = report.measured_re_bits;
  rec.strict = rec.relent_transpose_bits < rec.cmi_bits - kStrictThreshold;
  return rec;
}

MultipartiteState figure1_sample(std::uint64_t seed, std::uint64_t sample_id,
                                 const std::array<std::size_t, 3>& dims) {
  SeededRng rng(seed, sample_id);
  return random_pure(bcr_subsystems(dims), rng);
}

Figure1Summary summarize(const std::vector<ExperimentRecord>& records, const RunConfig& cfg) {
  Figure1Summary s;
  s.seed = cfg.seed;
  s.n_samples = records.size();
  s.dims = cfg.dims;
  s.workers = cfg.workers;
  if (records.empty()) return s;
  double sum_cmi = 0.0, sum_rel = 0.0, sum_f = 0.0;
  s.min_cmi_bits = records.front().cmi_bits;
  for (const auto& r : records) {
    if (r.strict) ++s.strict_count;
    sum_cmi += r.cmi_bits;
    sum_f += r.fidelity_transpose;
    if (std::isinf(r.relent_transpose_bits)) {
      ++s.infinite_relent_count;
    } else {
      sum_rel += r.relent_transpose_bits;
    }
    s.min_cmi_bits = std::min(s.min_cmi_bits, r.cmi_bits);
  }
  const auto n = static_cast<double>(records.size());
  s.strict_fraction = static_cast<double>(s.strict_count) / n;
  s.mean_cmi_bits = sum_cmi / n;
  s.mean_fidelity_transpose = sum_f / n;
  s.mean_relent_transpose_bits = s.infinite_relent_count > 0 ? kInfinity : sum_rel / n;
  return s;
}

Figure1Result figure1_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<ExperimentRecord> records(cfg.n_samples);
  const std::size_t workers = std::min(cfg.workers, cfg.n_samples);

  auto work = [&](std::size_t w, std::exception_ptr& error) {
    try {
      for (std::size_t i = w; i < cfg.n_samples; i += workers) {
        records[i] = evaluate_sample(figure1_sample(cfg.seed, i, cfg.dims), i,
                                     cfg.with_measured_re);
      }
    } catch (...) {
      error = std::current_exception();
    }
  };
  std::vector<std::exception_ptr> errors(workers);
  if (workers == 1) {
    work(0, errors[0]);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, std::ref(errors[w]));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Figure1Result result{std::move(records), {}};
  result.summary = summarize(result.records, cfg);
  result.summary.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ClassicalExampleReport classical_example_experiment(std::size_t d, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw NumericError("classical_example_experiment: eps must lie in [0, 1)");
  }
  const MultipartiteState state = classical_example_state(d, eps);
  const MultipartiteState rho_cr = partial_trace(state, {"C", "R"});
  const MultipartiteState rho_c = partial_trace(rho_cr, {"C"});
  const MultipartiteState rho_r = partial_trace(rho_cr, {"R"});

  ClassicalExampleReport rep;
  rep.d = d;
  rep.eps = eps;
  rep.mutual_info_bits = mutual_information(rho_cr, "C", "R");
  rep.mutual_info_nats = bits_to_nats(rep.mutual_info_bits);
  rep.cmi_bits = cmi(state);
  rep.fr_product_bits = renyi_half(rho_cr, tensor(rho_c, rho_r));

  std::vector<double> pointer(d, 0.0);
  pointer[0] = 1.0;
  rep.fr_pointer_bits = renyi_half(rho_cr, tensor(classical_state(pointer, {{"C", d}}), rho_r));
  rep.fr_product_nats = bits_to_nats(rep.fr_product_bits);
  rep.fr_pointer_nats = bits_to_nats(rep.fr_pointer_bits);
  rep.ceiling_bits = -std::log2(1.0 - eps);
  rep.ceiling_nats = -std::log(1.0 - eps);
  rep.ratio_to_ceiling = rep.ceiling_bits > 0.0 ? rep.mutual_info_bits / rep.ceiling_bits : 0.0;
  rep.ratio_to_product =
      rep.fr_product_bits > 0.0 ? rep.mutual_info_bits / rep.fr_product_bits : 0.0;
  return rep;
}

// ---- output ----

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
  const bool measured = std::any_of(records.begin(), records.end(), [](const auto& r) {
    return r.measured_re_transpose_bits.has_value();
  });
  std::string out = kCsvHeader;
  if (measured) out += ",measured_re_transpose_bits";
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.sample_id);
    for (double v : {r.cmi_bits, r.relent_transpose_bits, r.fidelity_transpose,
                     r.shalf_transpose_bits}) {
      out += ',';
      out += format_double(v);
    }
    out += r.strict ? ",1" : ",0";
    if (measured) {
      out += ',';
      if (r.measured_re_transpose_bits) out += format_double(*r.measured_re_transpose_bits);
    }
    out += '\n';
  }
  return out;
}

namespace {

double parse_double(const std::string& field) {
  if (field == "inf") return kInfinity;
  if (field == "-inf") return -kInfinity;
  std::size_t used = 0;
  const double v = std::stod(field, &used);
  if (used != field.size()) throw NumericError("CSV: bad number '" + field + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<ExperimentRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw NumericError("CSV: missing header");
  const auto header = split(line);
  const bool measured = header.size() == 7 && header[6] == "measured_re_transpose_bits";
  if (line.rfind(kCsvHeader, 0) != 0 || (header.size() != 6 && !measured)) {
    throw NumericError("CSV: unexpected header '" + line + "'");
  }
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw NumericError("CSV: wrong field count in '" + line + "'");
    ExperimentRecord r;
    r.sample_id = std::stoull(f[0]);
    r.cmi_bits = parse_double(f[1]);
    r.relent_transpose_bits = parse_double(f[2]);
    r.fidelity_transpose = parse_double(f[3]);
    r.shalf_transpose_bits = parse_double(f[4]);
    if (f[5] != "0" && f[5] != "1") throw NumericError("CSV: strict flag must be 0 or 1");
    r.strict = f[5] == "1";
    if (measured && !f[6].empty()) r.measured_re_transpose_bits = parse_double(f[6]);
    out.push_back(r);
  }
  return out;
}

std::string summary_json(const Figure1Summary& s) {
  nlohmann::json j;
  j["config"] = {{"seed", s.seed},
                 {"n_samples", s.n_samples},
                 {"dims", {s.dims[0], s.dims[1], s.dims[2]}},
                 {"workers", s.workers}};
  j["strict_count"] = s.strict_count;
  j["strict_fraction"] = s.strict_fraction;
  j["strict_threshold_bits"] = kStrictThreshold;
  put_number(j, "mean_cmi_bits", s.mean_cmi_bits);
  put_number(j, "mean_relent_transpose_bits", s.mean_relent_transpose_bits);
  j["infinite_relent_count"] = s.infinite_relent_count;
  put_number(j, "mean_fidelity_transpose", s.mean_fidelity_transpose);
  put_number(j, "min_cmi_bits", s.min_cmi_bits);
  j["runtime_seconds"] = s.runtime_seconds;
  return j.dump(2) + "\n";
}

std::string to_svg(const std::vector<ExperimentRecord>& records) {
  constexpr double kSize = 480.0, kMargin = 48.0;
  double top = 0.0;
  for (const auto& r : records) {
    top = std::max(top, r.cmi_bits);
    if (std::isfinite(r.relent_transpose_bits)) top = std::max(top, r.relent_transpose_bits);
  }
  if (top <= 0.0) top = 1.0;
  top *= 1.05;
  auto sx = [&](double v) { return kMargin + std::clamp(v / top, 0.0, 1.0) * kSize; };
  auto sy = [&](double v) { return kMargin + kSize - std::clamp(v / top, 0.0, 1.0) * kSize; };
  char buf[160];
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n",
                kSize + 2 * kMargin, kSize + 2 * kMargin);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                kMargin, kMargin, kSize, kSize);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<line class=\"diagonal\" x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"gray\"/>\n",
                sx(0.0), sy(0.0), sx(top), sy(top));
  out += buf;
  out += "<g class=\"points\" fill=\"steelblue\">\n";
  for (const auto& r : records) {
    const double y = std::isfinite(r.relent_transpose_bits) ? r.relent_transpose_bits : top;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\"/>\n", sx(r.cmi_bits),
                  sy(y));
    out += buf;
  }
  out += "</g>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">I(C:R|B) [bits]</text>\n",
                kMargin + kSize / 2, kSize + 2 * kMargin - 12);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"%.1f\" transform=\"rotate(-90 14 %.1f)\" "
                "text-anchor=\"middle\">S(rho || T(rho_BR)) [bits]</text>\n",
                kMargin + kSize / 2, kMargin + kSize / 2);
  out += buf;
  out += "</svg>\n";
  return out;
}

void emit_outputs(const std::vector<ExperimentRecord>& records, const Figure1Summary& summary,
                  const RunConfig& cfg) {
  if (cfg.out_csv) write_text(*cfg.out_csv, to_csv(records));
  if (cfg.out_json) write_text(*cfg.out_json, summary_json(summary));
  if (cfg.out_svg) write_text(*cfg.out_svg, to_svg(records));
}

}  // namespace qcmi
