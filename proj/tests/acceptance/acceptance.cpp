// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "oracles.hpp"
#include "priorcheck/calibration.hpp"
#include "priorcheck/checks.hpp"
#include "priorcheck/cli.hpp"
#include "priorcheck/io.hpp"
#include "priorcheck/sampler.hpp"

using namespace priorcheck;

namespace {

const std::string kData = PRIORCHECK_TEST_DATA;

struct Verdict {
  bool pass;
  std::string detail;
};

GroupedDataset from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ids.push_back("g" + std::to_string(i + 1));
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return GroupedDataset::make(ids, m);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Verdict sphere_constraints() {
  RngStream config(2024, 0);
  std::size_t violations = 0;
  double worst_s = 0.0, worst_q = 0.0;
  for (std::uint64_t c = 0; c < 200; ++c) {
    const std::size_t groups = 2 + static_cast<std::size_t>(config.uniform() * 49);
    const double scale = std::pow(10.0, 4.0 * config.uniform() - 2.0);
    const double s = scale * 10.0 * config.normal();
    const double q = s * s / groups + scale * scale * groups * (0.01 + config.uniform());
    const HyperStat v{s, q};
    const auto basis = helmert_basis(groups);
    RngStream rng(7, c);
    for (int d = 0; d < 1000; ++d) {
      const auto y = sample_T_given_V(v, groups, basis, rng);
      double sum = 0.0, sq = 0.0;
      for (double x : y) {
        sum += x;
        sq += x * x;
      }
      const double es = std::abs(sum - s) / std::max(1.0, std::abs(s));
      const double eq = std::abs(sq - q) / std::max(1.0, q);
      worst_s = std::max(worst_s, es);
      worst_q = std::max(worst_q, eq);
      if (es > 1e-9 || eq > 1e-9) ++violations;
    }
  }
  return {violations == 0,
          fmt("violations=%zu worst_rel_sum=%.3g worst_rel_sq=%.3g", violations, worst_s, worst_q)};
}

Verdict sphere_law() {
  constexpr std::size_t draws = 100000;
  const HyperStat v{3.0, 5.0};
  const auto basis = helmert_basis(3);
  RngStream rng(11, 0);
  std::array<std::vector<double>, 3> lib, ref;
  std::mt19937_64 engine(99);
  std::normal_distribution<double> gauss;
  for (std::size_t k = 0; k < draws; ++k) {
    const auto y = sample_T_given_V(v, 3, basis, rng);
    // independent construction: centre and rescale iid normals
    std::array<double, 3> z{gauss(engine), gauss(engine), gauss(engine)};
    const double m = (z[0] + z[1] + z[2]) / 3.0;
    double norm = 0.0;
    for (auto& x : z) {
      x -= m;
      norm += x * x;
    }
    const double radius = std::sqrt(5.0 - 9.0 / 3.0);
    for (int i = 0; i < 3; ++i) {
      lib[i].push_back(y[i]);
      ref[i].push_back(1.0 + radius * z[i] / std::sqrt(norm));
    }
  }
  const double mean_tol = 4.0 * std::sqrt((2.0 / 3.0) / draws);
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    for (const auto* sample : {&lib[i], &ref[i]}) {
      const auto mo = oracle::moments(*sample);
      ok = ok && std::abs(mo.mean - 1.0) <= mean_tol &&
           std::abs(mo.variance - 2.0 / 3.0) <= 4.0 * mo.variance_se;
      if (sample == &lib[i]) detail += fmt("y%d mean=%.5f var=%.5f ", i + 1, mo.mean, mo.variance);
    }
  }
  return {ok, detail + fmt("(mean tol %.5f; reference MC agrees)", mean_tol)};
}

Verdict pi2_uniformity() {
  const SamplingModel model(1.0, 3, 5);
  CalibrationTruth truth;
  truth.fixed = Hyper{0.0, 1.0};
  CalibrationSpec spec;
  spec.stage = Stage::Pi2;
  spec.discrepancy = "skew";
  spec.datasets = 2000;
  spec.inner_draws = 999;
  spec.seed = 1;
  spec.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto result = calibrate_stage(model, truth, spec);
  const double limit = 0.0364 + 0.001;
  return {result.ks_distance < limit,
          fmt("ks_distance=%.5f limit=%.4f ks_pvalue=%.4f", result.ks_distance, limit,
              result.ks_pvalue)};
}

Verdict model_check_oracle() {
  const SamplingModel model(1.0, 5, 4);
  const boost::math::chi_squared chi(16.0);
  const auto h = residual_discrepancy("chisq_total");
  bool ok = true;
  std::string detail;
  RngStream rng(5, 0);
  std::uint64_t seed = 100;
  for (double target : {0.01, 0.25, 0.5, 0.75, 0.99}) {
    const double stat = boost::math::quantile(boost::math::complement(chi, target));
    std::vector<std::vector<double>> rows(4, std::vector<double>(5));
    double total = 0.0;
    for (auto& row : rows) {
      double m = 0.0;
      for (auto& x : row) m += (x = rng.normal());
      m /= 5.0;
      for (auto& x : row) total += (x -= m) * x;
    }
    const double scale = std::sqrt(stat / total);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (auto& x : rows[i]) x = 10.0 * i + scale * x;
    }
    const auto r = check_model(from_rows(rows), model, h, McOptions{100000, seed++, 4});
    const double exact = boost::math::cdf(boost::math::complement(chi, stat));
    ok = ok && std::abs(r.p - exact) <= 4.0 * r.mc_stderr;
    detail += fmt("[exact %.4f mc %.4f] ", exact, r.p);
  }
  return {ok, detail};
}

Verdict quadrature_oracle() {
  const SamplingModel model(1.0, 2, 3);
  const auto h = t_discrepancy("skew");
  const std::vector<std::vector<std::vector<double>>> fixtures{
      {{0.1, -0.3}, {1.2, 0.8}, {-0.5, 0.4}},
      {{2.0, 2.5}, {0.0, 0.3}, {0.1, -0.2}},
      {{-1.0, -2.0}, {0.5, 0.5}, {0.7, 0.9}},
      {{3.0, 1.0}, {-1.0, 0.0}, {0.2, 0.3}},
      {{0.0, 0.1}, {0.05, 0.0}, {1.5, 1.9}},
  };
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 300;
  for (const auto& rows : fixtures) {
    const auto data = from_rows(rows);
    const auto r = check_pi2(data, model, h, McOptions{100000, seed++, 4});
    std::array<double, 3> t{};
    for (std::size_t i = 0; i < 3; ++i) t[i] = (rows[i][0] + rows[i][1]) / 2.0;
    const double exact = oracle::circle_tail_probability(
        t, [](std::span<const double> y) { return oracle::plain_skew(y); });
    ok = ok && std::abs(r.p - exact) <= std::max(4.0 * r.mc_stderr, 0.01);
    detail += fmt("[quad %.4f mc %.4f] ", exact, r.p);
  }
  return {ok, detail};
}

Verdict pi1_irrelevance() {
  const auto data = io::load_dataset_csv(kData + "/clean.csv");
  const SamplingModel model(1.0, data.per_group(), data.groups());
  ProtocolConfig config;
  config.n_draws = 20000;
  config.seed = 17;
  const std::vector<HyperPrior> priors{
      HyperPrior::improper_flat(),
      HyperPrior::normal_inv_gamma(0.0, 4.0, 3.0, 2.0),
      HyperPrior::normal_inv_gamma(5.0, 0.1, 1.5, 0.5),
      HyperPrior::normal_inv_gamma(-20.0, 100.0, 10.0, 40.0),
  };
  std::vector<StageRecord> pi2;
  for (const auto& prior : priors) {
    const auto report = run_protocol(data, model, prior, config);
    pi2.push_back(report.stages.at(1));
  }
  const bool ran = pi2.front().status == StageStatus::Run;
  const bool same = std::all_of(pi2.begin(), pi2.end(), [&](const auto& r) { return r == pi2[0]; });
  return {ran && same, fmt("pi2 status=%s p=%.17g identical=%s",
                           to_string(pi2[0].status).c_str(),
                           pi2[0].result ? pi2[0].result->p : -1.0, same ? "yes" : "no")};
}

Verdict simple_check_oracle() {
  constexpr std::size_t draws = 1000000;
  const boost::math::normal phi;
  std::mt19937_64 engine(31);
  std::normal_distribution<double> gauss;
  bool ok = true;
  std::string detail;
  for (double z : {0.0, 1.0, 1.96, 3.0}) {
    // xbar = z with unit predictive variance: tau0sq + sigma2/n = 0.5 + 1/2
    const double closed = check_simple(z, 2, 1.0, 0.0, 0.5);
    const double exact = 2.0 * boost::math::cdf(boost::math::complement(phi, z));
    std::size_t hits = 0;
    for (std::size_t k = 0; k < draws; ++k) {
      if (std::abs(gauss(engine)) >= z) ++hits;
    }
    const double mc = static_cast<double>(hits) / draws;
    const double tol = 4.0 * std::sqrt(exact * (1.0 - exact) / draws);
    ok = ok && std::abs(closed - mc) <= std::max(tol, 1e-12) && std::abs(closed - exact) < 1e-12;
    detail += fmt("[z=%.2f closed %.6f mc %.6f] ", z, closed, mc);
  }
  return {ok, detail};
}

Verdict protocol_gating() {
  const auto inflated = io::load_dataset_csv(kData + "/inflated.csv");
  const auto clean = io::load_dataset_csv(kData + "/clean.csv");
  const auto proper = io::load_config_json(kData + "/proper.json");
  const auto improper = io::load_config_json(kData + "/improper.json");

  const SamplingModel model(proper.sigma2, inflated.per_group(), inflated.groups());
  const auto gated = run_protocol(inflated, model, proper.hyperprior, proper.protocol(1));
  const bool gate_ok = gated.stages.at(0).decision == Decision::EvidenceOfConflict &&
                       gated.stages.at(1).status == StageStatus::GatedNotRun &&
                       gated.stages.at(2).status == StageStatus::GatedNotRun &&
                       !gated.inference_ready;

  const SamplingModel clean_model(improper.sigma2, clean.per_group(), clean.groups());
  const auto skipped = run_protocol(clean, clean_model, improper.hyperprior, improper.protocol(1));
  const bool skip_ok = skipped.stages.at(2).status == StageStatus::SkippedImproper &&
                       skipped.stages.at(2).decision == Decision::Skipped;
  return {gate_ok && skip_ok,
          fmt("model p=%.4f pi2=%s pi1=%s ready=%s; improper pi1=%s",
              gated.stages[0].result ? gated.stages[0].result->p : -1.0,
              to_string(gated.stages[1].status).c_str(), to_string(gated.stages[2].status).c_str(),
              gated.inference_ready ? "true" : "false", to_string(skipped.stages[2].status).c_str())};
}

Verdict parallel_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "priorcheck_acceptance";
  std::filesystem::create_directories(dir);
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "4", "16"}) {
    const auto path = (dir / (std::string("report_") + threads + ".json")).string();
    std::ostringstream out, err;
    const int code = cli::main({"run", "--data", kData + "/clean.csv", "--config",
                                kData + "/proper.json", "--draws", "50000", "--threads", threads,
                                "--out", path},
                               out, err);
    if (code != 0) return {false, "run failed: " + err.str()};
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    outputs.push_back(buf.str());
  }
  std::filesystem::remove_all(dir);
  const bool same = outputs[0] == outputs[1] && outputs[1] == outputs[2] && !outputs[0].empty();
  return {same, fmt("report bytes=%zu identical=%s", outputs[0].size(), same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"sphere sampler constraints", sphere_constraints},
      {"sphere sampler law", sphere_law},
      {"pi2 check uniformity", pi2_uniformity},
      {"model check chi-square oracle", model_check_oracle},
      {"I=3 quadrature oracle", quadrature_oracle},
      {"pi1 irrelevance for pi2", pi1_irrelevance},
      {"simple check oracle", simple_check_oracle},
      {"protocol gating", protocol_gating},
      {"parallel determinism", parallel_determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("%s %zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
