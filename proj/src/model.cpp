#include "priorcheck/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "priorcheck/error.hpp"

namespace priorcheck {

GroupedDataset GroupedDataset::make(std::vector<std::string> group_ids, Matrix values) {
  if (group_ids.size() != values.rows()) {
    throw Error(ErrorCode::InvalidParameter, "group label count does not match row count");
  }
  if (values.rows() < 2) {
    throw Error(ErrorCode::TooFewGroups,
                "need at least 2 groups, got " + std::to_string(values.rows()));
  }
  if (values.cols() < 1) {
    throw Error(ErrorCode::UnbalancedData, "groups must have at least one observation");
  }
  for (double x : values.flat()) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "non-finite observation");
  }
  return GroupedDataset(std::move(group_ids), std::move(values));
}

std::vector<Observation> GroupedDataset::flatten() const {
  std::vector<Observation> out;
  out.reserve(values_.rows() * values_.cols());
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    for (double x : values_.row(i)) out.push_back({group_ids_[i], x, std::nullopt});
  }
  return out;
}

GroupedDataset validate_dataset(std::span<const Observation> raw) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<std::optional<std::size_t>> last_line;
  std::unordered_map<std::string, std::size_t> index;

  for (const auto& obs : raw) {
    if (!std::isfinite(obs.value)) {
      throw Error(ErrorCode::NonFiniteValue,
                  "non-finite value in group '" + obs.group + "'", obs.line);
    }
    auto [it, inserted] = index.try_emplace(obs.group, ids.size());
    if (inserted) {
      ids.push_back(obs.group);
      rows.emplace_back();
      last_line.emplace_back();
    }
    rows[it->second].push_back(obs.value);
    last_line[it->second] = obs.line;
  }

  if (ids.size() < 2) {
    throw Error(ErrorCode::TooFewGroups,
                "need at least 2 groups, got " + std::to_string(ids.size()));
  }
  const std::size_t n = rows.front().size();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != n) {
      throw Error(ErrorCode::UnbalancedData,
                  "group '" + ids[i] + "' has " + std::to_string(rows[i].size()) +
                      " observations but group '" + ids[0] + "' has " + std::to_string(n),
                  last_line[i]);
    }
  }

  Matrix values(ids.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), values.row(i).begin());
  }
  return GroupedDataset::make(std::move(ids), std::move(values));
}

SamplingModel::SamplingModel(double sigma2, std::size_t per_group, std::size_t groups)
    : sigma2_(sigma2), per_group_(per_group), groups_(groups) {
  if (!(std::isfinite(sigma2) && sigma2 > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "sigma2 must be finite and > 0");
  }
  if (per_group < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1");
  if (groups < 2) throw Error(ErrorCode::InvalidParameter, "I must be >= 2");
}

HyperStat make_hyper_stat(double s, double q, std::size_t groups) {
  if (groups < 1) throw Error(ErrorCode::DimensionTooSmall, "I must be >= 1");
  if (!std::isfinite(s) || !std::isfinite(q)) {
    throw Error(ErrorCode::NonFiniteValue, "V must be finite");
  }
  const double boundary = s * s / static_cast<double>(groups);
  if (q >= boundary) return {s, q};
  if (boundary - q <= kFeasibilityTolerance * std::max(1.0, std::abs(q))) {
    return {s, boundary};
  }
  throw Error(ErrorCode::InfeasibleV,
              "q = " + format_real(q) + " is below s^2/I = " + format_real(boundary));
}

double centered_square_sum(const HyperStat& v, std::size_t groups) noexcept {
  return std::max(0.0, v.q - v.s * v.s / static_cast<double>(groups));
}

HyperPrior HyperPrior::normal_inv_gamma(double m0, double s0sq, double a0, double b0) {
  if (!std::isfinite(m0)) throw Error(ErrorCode::InvalidParameter, "m0 must be finite");
  auto positive = [](double x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0)) {
      throw Error(ErrorCode::InvalidParameter, std::string(name) + " must be finite and > 0");
    }
  };
  positive(s0sq, "s0sq");
  positive(a0, "a0");
  positive(b0, "b0");
  return HyperPrior(NormalInvGamma{m0, s0sq, a0, b0});
}

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Model: return "model";
    case Stage::Pi2: return "pi2";
    case Stage::Pi1: return "pi1";
    case Stage::Pi2Star: return "pi2_star";
  }
  return "?";
}

std::string to_string(StageStatus status) {
  switch (status) {
    case StageStatus::Run: return "run";
    case StageStatus::SkippedImproper: return "skipped_improper";
    case StageStatus::SkippedNoInformation: return "skipped_no_information";
    case StageStatus::GatedNotRun: return "gated_not_run";
    case StageStatus::Failed: return "failed";
  }
  return "?";
}

std::string to_string(Decision decision) {
  switch (decision) {
    case Decision::NoEvidence: return "no_evidence";
    case Decision::EvidenceOfConflict: return "evidence_of_conflict";
    case Decision::Skipped: return "skipped";
    case Decision::NotRun: return "not_run";
  }
  return "?";
}

namespace {

template <class Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view name, const Enum (&all)[N]) {
  for (Enum e : all) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Stage> parse_stage(std::string_view name) {
  static constexpr Stage kAll[] = {Stage::Model, Stage::Pi2, Stage::Pi1, Stage::Pi2Star};
  return parse_enum(name, kAll);
}

std::optional<StageStatus> parse_stage_status(std::string_view name) {
  static constexpr StageStatus kAll[] = {
      StageStatus::Run, StageStatus::SkippedImproper, StageStatus::SkippedNoInformation,
      StageStatus::GatedNotRun, StageStatus::Failed};
  return parse_enum(name, kAll);
}

std::optional<Decision> parse_decision(std::string_view name) {
  static constexpr Decision kAll[] = {Decision::NoEvidence, Decision::EvidenceOfConflict,
                                      Decision::Skipped, Decision::NotRun};
  return parse_enum(name, kAll);
}

}  // namespace priorcheck
