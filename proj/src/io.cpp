#include "qcmi/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcmi {

using nlohmann::json;

namespace {

json subsystems_json(const SubsystemList& subs) {
  json arr = json::array();
  for (const auto& s : subs) arr.push_back({{"label", s.label}, {"dim", s.dim}});
  return arr;
}

SubsystemList subsystems_from(const json& arr, const char* key) {
  if (!arr.is_array()) throw NumericError(std::string("JSON: '") + key + "' must be an array");
  SubsystemList out;
  for (const auto& item : arr) {
    if (!item.contains("label") || !item.contains("dim")) {
      throw NumericError(std::string("JSON: entries of '") + key + "' need label and dim");
    }
    const auto dim = item.at("dim").get<long long>();
    if (dim < 1) throw NumericError(std::string("JSON: non-positive dim in '") + key + "'");
    out.push_back({item.at("label").get<std::string>(), static_cast<std::size_t>(dim)});
  }
  return out;
}

void put_matrix(json& j, const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row_re = json::array(), row_im = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row_re.push_back(m(i, k).real());
      row_im.push_back(m(i, k).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  j["matrix_re"] = std::move(re);
  j["matrix_im"] = std::move(im);
}

ComplexMatrix matrix_from(const json& j) {
  if (!j.contains("matrix_re")) throw NumericError("JSON: missing 'matrix_re'");
  const json& re = j.at("matrix_re");
  const bool has_im = j.contains("matrix_im");
  const auto n = static_cast<Eigen::Index>(re.size());
  if (has_im && j.at("matrix_im").size() != re.size()) {
    throw NumericError("JSON: matrix_re and matrix_im differ in shape");
  }
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = re.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != n) throw NumericError("JSON: matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      const double im =
          has_im ? j.at("matrix_im").at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k))
                       .get<double>()
                 : 0.0;
      m(i, k) = Complex(row.at(static_cast<std::size_t>(k)).get<double>(), im);
    }
  }
  return m;
}

}  // namespace

void put_number(json& obj, const std::string& key, double value) {
  if (std::isfinite(value)) {
    obj[key] = value;
  } else {
    obj[key] = nullptr;
    obj[key + "_infinite"] = true;
  }
}

json to_json(const MultipartiteState& s) {
  json j;
  j["subsystems"] = subsystems_json(s.subsystems());
  put_matrix(j, s.matrix());
  return j;
}

MultipartiteState state_from_json(const json& j) {
  try {
    return MultipartiteState(matrix_from(j), subsystems_from(j.at("subsystems"), "subsystems"));
  } catch (const json::exception& e) {
    throw NumericError(std::string("JSON state: ") + e.what());
  }
}

json to_json(const Channel& ch) {
  json j;
  j["input"] = subsystems_json(ch.input());
  j["output"] = subsystems_json(ch.output());
  put_matrix(j, ch.choi());
  return j;
}

Channel channel_from_json(const json& j) {
  try {
    return Channel(matrix_from(j), subsystems_from(j.at("input"), "input"),
                   subsystems_from(j.at("output"), "output"));
  } catch (const json::exception& e) {
    throw NumericError(std::string("JSON channel: ") + e.what());
  }
}

json to_json(const OptimizerResult& r) {
  json j;
  j["objective_kind"] = to_string(r.objective_kind);
  put_number(j, "best_value", r.best_value);
  put_number(j, "warm_start_value", r.warm_start_value);
  j["restarts_used"] = r.restarts_used;
  j["converged"] = r.converged;
  json trace = json::array();
  for (double v : r.trace) trace.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  j["trace"] = std::move(trace);
  j["channel"] = to_json(r.best_channel);
  return j;
}

json to_json(const EntropyReport& r) {
  json j;
  j["cmi_bits"] = r.cmi_display();
  j["cmi_bits_raw"] = r.cmi_bits;
  put_number(j, "rel_ent_bits", r.rel_ent_bits);
  j["fidelity"] = r.fidelity;
  put_number(j, "renyi_half_bits", r.renyi_half_bits);
  if (r.has_measured_re) j["measured_re_bits"] = r.measured_re_bits;
  return j;
}

json to_json(const ClassicalExampleReport& r) {
  return json{{"d", r.d},
              {"eps", r.eps},
              {"mutual_info_bits", r.mutual_info_bits},
              {"mutual_info_nats", r.mutual_info_nats},
              {"cmi_bits", r.cmi_bits},
              {"fr_product_bits", r.fr_product_bits},
              {"fr_product_nats", r.fr_product_nats},
              {"fr_pointer_bits", r.fr_pointer_bits},
              {"fr_pointer_nats", r.fr_pointer_nats},
              {"ceiling_bits", r.ceiling_bits},
              {"ceiling_nats", r.ceiling_nats},
              {"ratio_to_ceiling", r.ratio_to_ceiling},
              {"ratio_to_product", r.ratio_to_product}};
}

json to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json failures = json::array();
    for (const auto& f : c.failures) {
      failures.push_back(
          {{"sample", f.sample}, {"seed", f.seed}, {"stream", f.stream}, {"detail", f.detail}});
    }
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"evaluated", c.evaluated},
                      {"failures_allowed", c.failures_allowed},
                      {"worst_margin", c.worst},
                      {"failures", std::move(failures)}});
  }
  return json{{"all_passed", r.all_passed()}, {"checks", std::move(checks)}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

MultipartiteState load_state(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw NumericError("'" + path.string() + "': " + e.what());
  }
  return state_from_json(j);
}

Channel load_channel(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw NumericError("'" + path.string() + "': " + e.what());
  }
  return channel_from_json(j);
}

}  // namespace qcmi
