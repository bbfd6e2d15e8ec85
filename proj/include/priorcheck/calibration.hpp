#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "priorcheck/model.hpp"
#include "priorcheck/rng.hpp"

namespace priorcheck {

struct KsResult {
  double distance = 0.0;
  double pvalue = 1.0;
};

// One-sample Kolmogorov-Smirnov test against U(0, 1). The distance is exact
// (from order statistics); the p-value uses the asymptotic Kolmogorov law of
// sqrt(m) * D. Throws EmptySample or OutOfRangeValue.
KsResult ks_statistic(std::span<const double> sample);

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// Law the synthetic datasets are drawn from: a fixed hyperparameter for the
// model and pi2 stages, a proper hyperprior for pi1 and pi2_star.
struct CalibrationTruth {
  std::optional<Hyper> fixed;
  std::optional<HyperPrior> prior;
};

struct CalibrationSpec {
  Stage stage = Stage::Pi2;
  std::string discrepancy = "skew";
  std::size_t datasets = 2000;
  std::size_t inner_draws = 999;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct CalibrationResult {
  Stage stage = Stage::Pi2;
  std::string discrepancy;
  std::size_t datasets = 0;
  std::size_t inner_draws = 0;
  std::vector<double> pvalues;
  double ks_distance = 0.0;
  double ks_pvalue = 1.0;

  bool operator==(const CalibrationResult&) const = default;
};

// Draws `datasets` synthetic datasets from the joint law given by `truth`
// (theta from the second level, observations from the sampling model), runs
// the stage's check on each and tests the p-values for uniformity.
// A degenerate discrepancy on any replicate aborts with DegenerateDiscrepancy.
CalibrationResult calibrate_stage(const SamplingModel& model, const CalibrationTruth& truth,
                                  const CalibrationSpec& spec);

// Synthetic dataset: theta_i ~ normal(mu, tau2), x_ij ~ normal(theta_i, sigma2).
GroupedDataset simulate_dataset(const SamplingModel& model, const Hyper& hyper,
                                RngStream& rng);

}  // namespace priorcheck
