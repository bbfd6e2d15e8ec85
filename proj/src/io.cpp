#include "priorcheck/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "priorcheck/discrepancy.hpp"
#include "priorcheck/error.hpp"

namespace priorcheck::io {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

double parse_value(std::string_view text, std::size_t line) {
  const auto first = text.find_first_not_of(' ');
  const auto last = text.find_last_not_of(' ');
  if (first == std::string_view::npos) throw Error(ErrorCode::BadRow, "empty value", line);
  text = text.substr(first, last - first + 1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw Error(ErrorCode::NonFiniteValue, "value '" + std::string(text) + "' overflows", line);
  }
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadRow, "cannot parse value '" + std::string(text) + "'", line);
  }
  return value;
}

}  // namespace

GroupedDataset parse_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<Observation> rows;

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!header_seen) {
      if (line != "group,value") {
        throw Error(ErrorCode::MissingHeader, "first line must be exactly 'group,value'", line_no);
      }
      header_seen = true;
      continue;
    }
    if (is_blank(line)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorCode::BadRow, "expected 'group,value'", line_no);
    }
    std::string group = line.substr(0, comma);
    if (group.empty()) throw Error(ErrorCode::BadRow, "empty group label", line_no);
    const double value = parse_value(std::string_view(line).substr(comma + 1), line_no);
    rows.push_back({std::move(group), value, line_no});
  }
  if (!header_seen) throw Error(ErrorCode::MissingHeader, "empty input", 1);
  return validate_dataset(rows);
}

GroupedDataset load_dataset_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  return parse_dataset_csv(in);
}

std::string dataset_to_csv(const GroupedDataset& data) {
  std::string out = "group,value\n";
  for (const auto& obs : data.flatten()) {
    out += obs.group;
    out += ',';
    out += format_real(obs.value);
    out += '\n';
  }
  return out;
}

ProtocolConfig RunConfig::protocol(unsigned threads) const {
  ProtocolConfig p;
  p.alpha = alpha;
  p.n_draws = n_draws;
  p.seed = seed;
  p.model_discrepancy = discrepancies.model;
  p.pi2_discrepancy = discrepancies.pi2;
  p.pi1_discrepancy = discrepancies.pi1;
  p.threads = threads;
  return p;
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) {
      throw Error(ErrorCode::UnknownKey,
                  "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

double get_number(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw Error(ErrorCode::TypeMismatch, std::string(key) + " must be a number");
  }
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    throw Error(ErrorCode::InvalidParameter, std::string(key) + " must be non-negative");
  }
  throw Error(ErrorCode::TypeMismatch, std::string(key) + " must be an integer");
}

std::string get_string(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw Error(ErrorCode::TypeMismatch, std::string(key) + " must be a string");
  return v.get<std::string>();
}

HyperPrior parse_hyperprior(const json& obj) {
  if (!obj.is_object()) throw Error(ErrorCode::TypeMismatch, "hyperprior must be an object");
  if (!obj.contains("type")) throw Error(ErrorCode::MissingRequired, "hyperprior.type is required");
  const std::string type = get_string(obj, "type");
  if (type == "improper_flat") {
    reject_unknown_keys(obj, {"type"}, "hyperprior");
    return HyperPrior::improper_flat();
  }
  if (type == "normal_inv_gamma") {
    reject_unknown_keys(obj, {"type", "m0", "s0sq", "a0", "b0"}, "hyperprior");
    for (const char* key : {"m0", "s0sq", "a0", "b0"}) {
      if (!obj.contains(key)) {
        throw Error(ErrorCode::MissingRequired, std::string("hyperprior.") + key + " is required");
      }
    }
    return HyperPrior::normal_inv_gamma(get_number(obj, "m0"), get_number(obj, "s0sq"),
                                        get_number(obj, "a0"), get_number(obj, "b0"));
  }
  throw Error(ErrorCode::InvalidParameter, "unknown hyperprior type '" + type + "'");
}

void require_space(const std::string& name, Space space, const char* stage) {
  if (discrepancy_space(name) != space) {
    throw Error(ErrorCode::UnknownDiscrepancy,
                "'" + name + "' is not a built-in discrepancy for stage " + stage);
  }
}

}  // namespace

RunConfig parse_config_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::TypeMismatch, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::TypeMismatch, "config must be a JSON object");
  reject_unknown_keys(root,
                      {"sigma2", "alpha", "n_draws", "seed", "discrepancies", "hyperprior",
                       "output"},
                      "config");

  RunConfig cfg;
  if (!root.contains("sigma2")) throw Error(ErrorCode::MissingRequired, "sigma2 is required");
  cfg.sigma2 = get_number(root, "sigma2");
  if (!(std::isfinite(cfg.sigma2) && cfg.sigma2 > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "sigma2 must be > 0");
  }
  if (root.contains("alpha")) {
    cfg.alpha = get_number(root, "alpha");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
      throw Error(ErrorCode::InvalidParameter, "alpha must lie in (0, 1)");
    }
  }
  if (root.contains("n_draws")) {
    cfg.n_draws = get_unsigned(root, "n_draws");
    if (cfg.n_draws == 0) throw Error(ErrorCode::InvalidParameter, "n_draws must be >= 1");
  }
  if (root.contains("seed")) cfg.seed = get_unsigned(root, "seed");
  if (root.contains("discrepancies")) {
    const auto& d = root.at("discrepancies");
    if (!d.is_object()) throw Error(ErrorCode::TypeMismatch, "discrepancies must be an object");
    reject_unknown_keys(d, {"model", "pi2", "pi1"}, "discrepancies");
    if (d.contains("model")) cfg.discrepancies.model = get_string(d, "model");
    if (d.contains("pi2")) cfg.discrepancies.pi2 = get_string(d, "pi2");
    if (d.contains("pi1")) cfg.discrepancies.pi1 = get_string(d, "pi1");
  }
  require_space(cfg.discrepancies.model, Space::Residual, "model");
  require_space(cfg.discrepancies.pi2, Space::T, "pi2");
  require_space(cfg.discrepancies.pi1, Space::V, "pi1");
  if (!root.contains("hyperprior")) {
    throw Error(ErrorCode::MissingRequired, "hyperprior is required");
  }
  cfg.hyperprior = parse_hyperprior(root.at("hyperprior"));
  if (root.contains("output")) cfg.output = get_string(root, "output");
  return cfg;
}

RunConfig load_config_json(const std::filesystem::path& path) {
  return parse_config_json(read_text(path));
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string number_or_null(const std::optional<PValueResult>& r, double PValueResult::*field) {
  return r ? format_real((*r).*field) : "null";
}

}  // namespace

std::string report_to_json(const CheckReport& report) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema_version\": \"1\",\n";
  out << "  \"data_summary\": {\"I\": " << report.groups << ", \"n\": " << report.per_group
      << "},\n";
  out << "  \"stages\": [";
  for (std::size_t k = 0; k < report.stages.size(); ++k) {
    const auto& st = report.stages[k];
    const auto& r = st.result;
    out << (k == 0 ? "\n" : ",\n");
    out << "    {\n";
    out << "      \"stage\": " << quote(to_string(st.stage)) << ",\n";
    out << "      \"status\": " << quote(to_string(st.status)) << ",\n";
    out << "      \"p_value\": " << number_or_null(r, &PValueResult::p) << ",\n";
    out << "      \"n_draws\": " << (r ? std::to_string(r->n_draws) : "null") << ",\n";
    out << "      \"seed\": " << (r ? std::to_string(r->seed) : "null") << ",\n";
    out << "      \"discrepancy\": " << quote(st.discrepancy) << ",\n";
    out << "      \"observed_h\": " << number_or_null(r, &PValueResult::observed_h) << ",\n";
    out << "      \"mc_stderr\": " << number_or_null(r, &PValueResult::mc_stderr) << ",\n";
    out << "      \"degenerate\": " << (r ? (r->degenerate ? "true" : "false") : "null") << ",\n";
    out << "      \"alpha\": " << format_real(st.alpha) << ",\n";
    out << "      \"decision\": " << quote(to_string(st.decision)) << ",\n";
    out << "      \"message\": " << (st.message.empty() ? "null" : quote(st.message)) << "\n";
    out << "    }";
  }
  out << (report.stages.empty() ? "],\n" : "\n  ],\n");
  out << "  \"inference_ready\": " << (report.inference_ready ? "true" : "false") << "\n";
  out << "}\n";
  return out.str();
}

CheckReport parse_report_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::TypeMismatch, std::string("invalid report JSON: ") + e.what());
  }
  try {
    if (root.at("schema_version").get<std::string>() != "1") {
      throw Error(ErrorCode::InvalidParameter, "unsupported report schema_version");
    }
    CheckReport report;
    report.groups = root.at("data_summary").at("I").get<std::size_t>();
    report.per_group = root.at("data_summary").at("n").get<std::size_t>();
    report.inference_ready = root.at("inference_ready").get<bool>();
    for (const auto& js : root.at("stages")) {
      StageRecord st;
      const auto stage = parse_stage(js.at("stage").get<std::string>());
      const auto status = parse_stage_status(js.at("status").get<std::string>());
      const auto decision = parse_decision(js.at("decision").get<std::string>());
      if (!stage || !status || !decision) {
        throw Error(ErrorCode::InvalidParameter, "unknown stage, status or decision");
      }
      st.stage = *stage;
      st.status = *status;
      st.decision = *decision;
      st.alpha = js.at("alpha").get<double>();
      st.discrepancy = js.at("discrepancy").get<std::string>();
      if (!js.at("message").is_null()) st.message = js.at("message").get<std::string>();
      if (!js.at("p_value").is_null()) {
        PValueResult r;
        r.p = js.at("p_value").get<double>();
        r.n_draws = js.at("n_draws").get<std::size_t>();
        r.seed = js.at("seed").get<std::uint64_t>();
        r.discrepancy_name = st.discrepancy;
        r.observed_h = js.at("observed_h").get<double>();
        r.mc_stderr = js.at("mc_stderr").get<double>();
        r.degenerate = js.at("degenerate").get<bool>();
        st.result = r;
      }
      report.stages.push_back(std::move(st));
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::TypeMismatch, std::string("malformed report: ") + e.what());
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

void write_report_json(const CheckReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_json(report));
}

std::string calibration_to_json(const CalibrationResult& result) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"stage\": " << quote(to_string(result.stage)) << ",\n";
  out << "  \"discrepancy\": " << quote(result.discrepancy) << ",\n";
  out << "  \"M\": " << result.datasets << ",\n";
  out << "  \"N_inner\": " << result.inner_draws << ",\n";
  out << "  \"ks_distance\": " << format_real(result.ks_distance) << ",\n";
  out << "  \"ks_pvalue\": " << format_real(result.ks_pvalue) << ",\n";
  out << "  \"pvalues\": [";
  for (std::size_t k = 0; k < result.pvalues.size(); ++k) {
    if (k) out << ", ";
    out << format_real(result.pvalues[k]);
  }
  out << "]\n}\n";
  return out.str();
}

}  // namespace priorcheck::io
