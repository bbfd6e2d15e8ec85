#include "priorcheck/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "priorcheck/checks.hpp"
#include "priorcheck/discrepancy.hpp"
#include "priorcheck/error.hpp"
#include "priorcheck/parallel.hpp"
#include "priorcheck/rng.hpp"
#include "priorcheck/sampler.hpp"

namespace priorcheck {

namespace {

constexpr double kSeriesCutoff = 1e-12;
// Stream block for synthetic data, disjoint from the check stages.
constexpr std::uint64_t kCalibrationDataStage = 15;

}  // namespace

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.0) {
    // P(K <= x) = sqrt(2 pi)/x * sum_k exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double factor = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(factor * odd * odd);
      cdf += term;
      if (term < kSeriesCutoff) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < kSeriesCutoff) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_statistic(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "KS test needs at least one value");
  for (double x : sample) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorCode::OutOfRangeValue, "KS sample value outside [0, 1]");
    }
  }
  const auto xs = sorted(sample);
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double above = static_cast<double>(i + 1) / m - xs[i];
    const double below = xs[i] - static_cast<double>(i) / m;
    d = std::max({d, above, below});
  }
  return {d, kolmogorov_survival(std::sqrt(m) * d)};
}

GroupedDataset simulate_dataset(const SamplingModel& model, const Hyper& hyper,
                                RngStream& rng) {
  const double tau = std::sqrt(hyper.tau2);
  const double sigma = std::sqrt(model.sigma2());
  Matrix values(model.groups(), model.per_group());
  std::vector<std::string> ids;
  ids.reserve(model.groups());
  for (std::size_t i = 0; i < model.groups(); ++i) {
    ids.push_back("g" + std::to_string(i + 1));
    const double theta = hyper.mu + tau * rng.normal();
    for (double& x : values.row(i)) x = theta + sigma * rng.normal();
  }
  return GroupedDataset::make(std::move(ids), std::move(values));
}

CalibrationResult calibrate_stage(const SamplingModel& model, const CalibrationTruth& truth,
                                  const CalibrationSpec& spec) {
  if (spec.datasets == 0) throw Error(ErrorCode::EmptySample, "calibration needs M >= 1");
  if (spec.inner_draws == 0) throw Error(ErrorCode::EmptyDraws, "calibration needs N >= 1");

  const bool needs_prior = spec.stage == Stage::Pi1 || spec.stage == Stage::Pi2Star;
  if (needs_prior) {
    if (!truth.prior) {
      throw Error(ErrorCode::InvalidParameter,
                  "stage " + to_string(spec.stage) + " calibrates against a hyperprior");
    }
    if (!truth.prior->is_proper()) {
      throw Error(ErrorCode::ImproperPriorNotSamplable,
                  "an improper hyperprior is never checked, so it cannot be calibrated");
    }
  } else {
    if (!truth.fixed) {
      throw Error(ErrorCode::InvalidParameter,
                  "stage " + to_string(spec.stage) + " calibrates against a fixed (mu, tau2)");
    }
    if (!(truth.fixed->tau2 >= 0.0) || !std::isfinite(truth.fixed->mu)) {
      throw Error(ErrorCode::InvalidParameter, "truth needs finite mu and tau2 >= 0");
    }
  }

  // Resolve the discrepancy once so that bad names fail before any work.
  std::optional<TDiscrepancy> t_h;
  std::optional<ResidualDiscrepancy> r_h;
  std::optional<VDiscrepancy> v_h;
  switch (spec.stage) {
    case Stage::Model: r_h = residual_discrepancy(spec.discrepancy); break;
    case Stage::Pi2:
    case Stage::Pi2Star: t_h = t_discrepancy(spec.discrepancy); break;
    case Stage::Pi1: v_h = v_discrepancy(spec.discrepancy); break;
  }

  CalibrationResult out;
  out.stage = spec.stage;
  out.discrepancy = spec.discrepancy;
  out.datasets = spec.datasets;
  out.inner_draws = spec.inner_draws;
  out.pvalues.resize(spec.datasets);

  parallel_for(spec.datasets, spec.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      RngStream rng(spec.seed, stage_stream(kCalibrationDataStage, m));
      const Hyper hyper = needs_prior ? sample_hyper(*truth.prior, rng) : *truth.fixed;
      const auto data = simulate_dataset(model, hyper, rng);
      const McOptions mc{spec.inner_draws, mix_seed(spec.seed, m), 1};

      PValueResult r;
      switch (spec.stage) {
        case Stage::Model: r = check_model(data, model, *r_h, mc); break;
        case Stage::Pi2: r = check_pi2(data, model, *t_h, mc); break;
        case Stage::Pi2Star: r = check_pi2_star(data, model, *truth.prior, *t_h, mc); break;
        case Stage::Pi1: r = *check_pi1(data, model, *truth.prior, *v_h, mc); break;
      }
      if (r.degenerate) {
        throw Error(ErrorCode::DegenerateDiscrepancy,
                    "replicate " + std::to_string(m) + ": '" + spec.discrepancy +
                        "' has a degenerate reference law; calibration is meaningless");
      }
      out.pvalues[m] = r.p;
    }
  });

  const auto ks = ks_statistic(out.pvalues);
  out.ks_distance = ks.distance;
  out.ks_pvalue = ks.pvalue;
  return out;
}

}  // namespace priorcheck
