#include "priorcheck/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "priorcheck/calibration.hpp"
#include "priorcheck/checks.hpp"
#include "priorcheck/error.hpp"
#include "priorcheck/io.hpp"
#include "priorcheck/sampler.hpp"
#include "priorcheck/sufficiency.hpp"

namespace priorcheck::cli {

namespace {

using nlohmann::json;

struct RunArgs {
  std::string data;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> draws;
  std::optional<std::string> out;
  unsigned threads = 1;
};

struct CalibrateArgs {
  std::string config;
  std::string stage;
  std::size_t datasets = 2000;
  std::size_t draws = 999;
  double truth_mu = 0.0;
  double truth_tau2 = 1.0;
  std::size_t groups = 5;
  std::size_t per_group = 3;
  std::optional<std::string> discrepancy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned threads = 1;
};

struct SampleArgs {
  std::string what;
  std::string params;
  std::size_t count = 1;
  std::uint64_t seed = 1;
};

void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
  if (path) {
    io::write_text(*path, text);
  } else {
    out << text;
  }
}

int do_run(const RunArgs& a, std::ostream& out) {
  const auto data = io::load_dataset_csv(a.data);
  auto cfg = io::load_config_json(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.draws) cfg.n_draws = *a.draws;
  const SamplingModel model(cfg.sigma2, data.per_group(), data.groups());
  const auto report = run_protocol(data, model, cfg.hyperprior, cfg.protocol(a.threads));
  emit(io::report_to_json(report), a.out ? a.out : cfg.output, out);
  return kOk;
}

std::string default_discrepancy(Stage stage, const io::RunConfig& cfg) {
  switch (stage) {
    case Stage::Model: return cfg.discrepancies.model;
    case Stage::Pi1: return cfg.discrepancies.pi1;
    case Stage::Pi2:
    case Stage::Pi2Star: return cfg.discrepancies.pi2;
  }
  return {};
}

int do_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  const auto cfg = io::load_config_json(a.config);
  const Stage stage = *parse_stage(a.stage);
  if ((stage == Stage::Pi1 || stage == Stage::Pi2Star) && !cfg.hyperprior.is_proper()) {
    err << "error: stage " << a.stage
        << " needs a proper hyperprior; an improper hyperprior is asserted never to conflict "
           "with the data, so its check is skipped and cannot be calibrated\n";
    return kInvalidInput;
  }
  const SamplingModel model(cfg.sigma2, a.per_group, a.groups);
  CalibrationTruth truth;
  if (stage == Stage::Pi1 || stage == Stage::Pi2Star) {
    truth.prior = cfg.hyperprior;
  } else {
    truth.fixed = Hyper{a.truth_mu, a.truth_tau2};
  }
  CalibrationSpec spec;
  spec.stage = stage;
  spec.discrepancy = a.discrepancy.value_or(default_discrepancy(stage, cfg));
  spec.datasets = a.datasets;
  spec.inner_draws = a.draws;
  spec.seed = a.seed.value_or(cfg.seed);
  spec.threads = a.threads;
  emit(io::calibration_to_json(calibrate_stage(model, truth, spec)), a.out, out);
  return kOk;
}

void check_keys(const json& p, std::initializer_list<const char*> keys) {
  if (!p.is_object()) throw Error(ErrorCode::TypeMismatch, "--params must be a JSON object");
  for (const auto& [key, value] : p.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw Error(ErrorCode::UnknownKey, "unknown parameter '" + key + "'");
  }
  for (const char* k : keys) {
    if (!p.contains(k)) throw Error(ErrorCode::MissingRequired, std::string("missing '") + k + "'");
    if (!p.at(k).is_number()) throw Error(ErrorCode::TypeMismatch, std::string(k) + " must be a number");
  }
}

std::size_t count_param(const json& p, const char* key) {
  const auto& v = p.at(key);
  if (!v.is_number_unsigned()) {
    throw Error(ErrorCode::TypeMismatch, std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string json_array(std::span<const double> xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += format_real(xs[i]);
  }
  return s + "]";
}

int do_sample(const SampleArgs& a, std::ostream& out) {
  json p;
  try {
    p = json::parse(a.params);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::TypeMismatch, std::string("--params is not valid JSON: ") + e.what());
  }
  std::vector<std::string> lines;
  lines.reserve(a.count);

  if (a.what == "sphere") {
    check_keys(p, {"dim"});
    const std::size_t dim = count_param(p, "dim");
    if (dim < 1) throw Error(ErrorCode::DimensionTooSmall, "dim must be >= 1");
    for (std::size_t k = 0; k < a.count; ++k) {
      RngStream rng(a.seed, k);
      lines.push_back(json_array(sample_unit_sphere(dim, rng)));
    }
  } else if (a.what == "T_given_V") {
    check_keys(p, {"s", "q", "I"});
    const std::size_t groups = count_param(p, "I");
    const auto basis = helmert_basis(groups);
    const auto v = make_hyper_stat(p.at("s").get<double>(), p.at("q").get<double>(), groups);
    for (std::size_t k = 0; k < a.count; ++k) {
      RngStream rng(a.seed, k);
      lines.push_back(json_array(sample_T_given_V(v, groups, basis, rng)));
    }
  } else if (a.what == "residuals") {
    check_keys(p, {"sigma2", "n", "I"});
    const SamplingModel model(p.at("sigma2").get<double>(), count_param(p, "n"),
                              count_param(p, "I"));
    for (std::size_t k = 0; k < a.count; ++k) {
      RngStream rng(a.seed, k);
      const auto r = sample_residual_matrix(model, rng);
      std::string line = "[";
      for (std::size_t i = 0; i < r.rows(); ++i) {
        if (i) line += ", ";
        line += json_array(r.row(i));
      }
      lines.push_back(line + "]");
    }
  } else {
    check_keys(p, {"mu", "tau2", "sigma2", "n", "I"});
    const SamplingModel model(p.at("sigma2").get<double>(), count_param(p, "n"),
                              count_param(p, "I"));
    const Hyper hyper{p.at("mu").get<double>(), p.at("tau2").get<double>()};
    for (std::size_t k = 0; k < a.count; ++k) {
      RngStream rng(a.seed, k);
      const auto v = sample_V_given_hyper(hyper, model, rng);
      const double pair[2] = {v.s, v.q};
      lines.push_back(json_array(pair));
    }
  }
  for (const auto& line : lines) out << line << '\n';
  return kOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Staged prior-data conflict checks for the balanced normal-normal model",
               "priorcheck"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the model -> pi2 -> pi1 protocol on a dataset");
  run_cmd->add_option("--data", run.data, "CSV file with header 'group,value'")->required();
  run_cmd->add_option("--config", run.config, "JSON run configuration")->required();
  run_cmd->add_option("--seed", run.seed, "Override the config seed");
  run_cmd->add_option("--draws", run.draws, "Override n_draws")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out, "Report path (default: stdout)");
  run_cmd->add_option("--threads", run.threads, "Monte Carlo workers (0 = all cores)")
      ->envname("PRIORCHECK_THREADS");

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Check p-value uniformity for one stage");
  cal_cmd->add_option("--config", cal.config, "JSON run configuration")->required();
  cal_cmd->add_option("--stage", cal.stage, "Stage to calibrate")
      ->required()
      ->check(CLI::IsMember({"model", "pi2", "pi1", "pi2_star"}));
  cal_cmd->add_option("--datasets", cal.datasets, "Synthetic datasets M")
      ->check(CLI::PositiveNumber);
  cal_cmd->add_option("--draws", cal.draws, "Draws per check")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--truth-mu", cal.truth_mu, "Generating mu (model, pi2)");
  cal_cmd->add_option("--truth-tau2", cal.truth_tau2, "Generating tau^2 (model, pi2)")
      ->check(CLI::NonNegativeNumber);
  cal_cmd->add_option("--groups", cal.groups, "Group count I")->check(CLI::Range(2, 1 << 20));
  cal_cmd->add_option("--per-group", cal.per_group, "Observations per group n")
      ->check(CLI::PositiveNumber);
  cal_cmd->add_option("--discrepancy", cal.discrepancy, "Override the stage discrepancy");
  cal_cmd->add_option("--seed", cal.seed, "Override the config seed");
  cal_cmd->add_option("--out", cal.out, "Result path (default: stdout)");
  cal_cmd->add_option("--threads", cal.threads, "Workers (0 = all cores)")
      ->envname("PRIORCHECK_THREADS");

  SampleArgs smp;
  auto* smp_cmd = app.add_subcommand("sample", "Print sampler draws, one JSON array per line");
  smp_cmd->add_option("--what", smp.what, "Sampler")
      ->required()
      ->check(CLI::IsMember({"sphere", "T_given_V", "residuals", "V_given_hyper"}));
  smp_cmd->add_option("--params", smp.params, "Sampler parameters as a JSON object")->required();
  smp_cmd->add_option("--count", smp.count, "Number of draws");
  smp_cmd->add_option("--seed", smp.seed, "Seed");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("priorcheck");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (run_cmd->parsed()) return do_run(run, out);
    if (cal_cmd->parsed()) return do_calibrate(cal, out, err);
    return do_sample(smp, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InfeasibleV ? kInfeasible : kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace priorcheck::cli
