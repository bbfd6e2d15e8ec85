#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "priorcheck/numeric.hpp"

namespace priorcheck {

// One (group label, value) pair as read from input.
struct Observation {
  std::string group;
  double value = 0.0;
  // 1-based source line, when the observation came from a file.
  std::optional<std::size_t> line;
};

// Balanced I x n table of observations; rows are groups in first-appearance
// order. Only constructible through validate_dataset / GroupedDataset::make.
class GroupedDataset {
 public:
  // Throws TooFewGroups, UnbalancedData or NonFiniteValue.
  static GroupedDataset make(std::vector<std::string> group_ids, Matrix values);

  std::size_t groups() const noexcept { return values_.rows(); }
  std::size_t per_group() const noexcept { return values_.cols(); }
  const std::vector<std::string>& group_ids() const noexcept { return group_ids_; }
  const Matrix& values() const noexcept { return values_; }

  // Long-format observations in row order, the inverse of validate_dataset.
  std::vector<Observation> flatten() const;

  bool operator==(const GroupedDataset&) const = default;

 private:
  GroupedDataset(std::vector<std::string> ids, Matrix values)
      : group_ids_(std::move(ids)), values_(std::move(values)) {}

  std::vector<std::string> group_ids_;
  Matrix values_;
};

GroupedDataset validate_dataset(std::span<const Observation> raw);

// Known common within-group variance for a balanced I x n design.
class SamplingModel {
 public:
  // Throws InvalidParameter unless sigma2 > 0 (finite), n >= 1, I >= 2.
  SamplingModel(double sigma2, std::size_t per_group, std::size_t groups);

  double sigma2() const noexcept { return sigma2_; }
  std::size_t per_group() const noexcept { return per_group_; }
  std::size_t groups() const noexcept { return groups_; }
  // Variance of each group mean given theta: sigma^2 / n.
  double mean_variance() const noexcept { return sigma2_ / static_cast<double>(per_group_); }

 private:
  double sigma2_;
  std::size_t per_group_;
  std::size_t groups_;
};

// T: the vector of group means.
struct SufficientStat {
  std::vector<double> means;
};

// V = (sum of means, sum of squared means).
struct HyperStat {
  double s = 0.0;
  double q = 0.0;

  bool operator==(const HyperStat&) const = default;
};

// Relative tolerance for q >= s^2 / I.
inline constexpr double kFeasibilityTolerance = 1e-9;

// Validates (s, q) for dimension `groups`. A q below s^2/I by at most
// kFeasibilityTolerance * max(1, q) is clamped onto the boundary; anything
// further below throws InfeasibleV.
HyperStat make_hyper_stat(double s, double q, std::size_t groups);

// q - s^2/I, never negative for a value built by make_hyper_stat.
double centered_square_sum(const HyperStat& v, std::size_t groups) noexcept;

struct ImproperFlat {};

// mu ~ normal(m0, s0sq), tau2 ~ inverse-gamma(a0, b0), independent.
struct NormalInvGamma {
  double m0 = 0.0;
  double s0sq = 1.0;
  double a0 = 1.0;
  double b0 = 1.0;
};

class HyperPrior {
 public:
  static HyperPrior improper_flat() { return HyperPrior(ImproperFlat{}); }
  // Throws InvalidParameter unless s0sq, a0, b0 > 0 and all finite.
  static HyperPrior normal_inv_gamma(double m0, double s0sq, double a0, double b0);

  bool is_proper() const noexcept {
    return std::holds_alternative<NormalInvGamma>(spec_);
  }
  const NormalInvGamma& proper() const { return std::get<NormalInvGamma>(spec_); }
  const std::variant<ImproperFlat, NormalInvGamma>& spec() const noexcept { return spec_; }

 private:
  explicit HyperPrior(std::variant<ImproperFlat, NormalInvGamma> spec)
      : spec_(spec) {}

  std::variant<ImproperFlat, NormalInvGamma> spec_;
};

// Hyperparameter draw (mu, tau^2).
struct Hyper {
  double mu = 0.0;
  double tau2 = 0.0;
};

// Result of a Monte Carlo check.
struct PValueResult {
  double p = 1.0;
  std::size_t n_draws = 0;
  std::uint64_t seed = 0;
  double mc_stderr = 0.0;
  std::string discrepancy_name;
  double observed_h = 0.0;
  // Reference draws had (numerically) zero variance.
  bool degenerate = false;

  bool operator==(const PValueResult&) const = default;
};

enum class Stage { Model, Pi2, Pi1, Pi2Star };
enum class StageStatus { Run, SkippedImproper, SkippedNoInformation, GatedNotRun, Failed };
enum class Decision { NoEvidence, EvidenceOfConflict, Skipped, NotRun };

std::string to_string(Stage stage);
std::string to_string(StageStatus status);
std::string to_string(Decision decision);
std::optional<Stage> parse_stage(std::string_view name);
std::optional<StageStatus> parse_stage_status(std::string_view name);
std::optional<Decision> parse_decision(std::string_view name);

// Stage index used for stream derivation.
constexpr std::uint64_t stage_index(Stage stage) noexcept {
  return static_cast<std::uint64_t>(stage);
}

struct StageRecord {
  Stage stage = Stage::Model;
  StageStatus status = StageStatus::GatedNotRun;
  std::optional<PValueResult> result;
  double alpha = 0.05;
  Decision decision = Decision::NotRun;
  // Discrepancy configured for the stage, also when it did not run.
  std::string discrepancy;
  // Why a stage was skipped or failed.
  std::string message;

  bool operator==(const StageRecord&) const = default;
};

struct CheckReport {
  std::size_t groups = 0;
  std::size_t per_group = 0;
  std::vector<StageRecord> stages;
  bool inference_ready = false;

  bool operator==(const CheckReport&) const = default;
};

}  // namespace priorcheck
