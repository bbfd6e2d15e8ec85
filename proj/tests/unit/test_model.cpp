#include <doctest.h>

#include <cmath>
#include <limits>

#include "priorcheck/error.hpp"
#include "priorcheck/model.hpp"
#include "priorcheck/rng.hpp"

using namespace priorcheck;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected priorcheck::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("validate_dataset groups by first appearance") {
  const std::vector<Observation> raw{{"a", 1}, {"a", 3}, {"b", 2}, {"b", 4}};
  const auto d = validate_dataset(raw);
  CHECK(d.groups() == 2);
  CHECK(d.per_group() == 2);
  CHECK(d.group_ids() == std::vector<std::string>{"a", "b"});
  CHECK(d.values()(0, 0) == 1);
  CHECK(d.values()(0, 1) == 3);
  CHECK(d.values()(1, 0) == 2);
  CHECK(d.values()(1, 1) == 4);

  const std::vector<Observation> interleaved{{"z", 1}, {"y", 2}, {"z", 3}, {"y", 4}};
  CHECK(validate_dataset(interleaved).group_ids() == std::vector<std::string>{"z", "y"});
}

TEST_CASE("validate_dataset errors") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<Observation> unbalanced{{"a", 1}, {"b", 2}, {"b", 3}};
  const std::vector<Observation> non_finite{{"a", nan}, {"a", 1}, {"b", 0}, {"b", 0}};
  const std::vector<Observation> one_group{{"a", 1}};
  const std::vector<Observation> empty{};
  CHECK(code_of([&] { validate_dataset(unbalanced); }) == ErrorCode::UnbalancedData);
  CHECK(code_of([&] { validate_dataset(non_finite); }) == ErrorCode::NonFiniteValue);
  CHECK(code_of([&] { validate_dataset(one_group); }) == ErrorCode::TooFewGroups);
  CHECK(code_of([&] { validate_dataset(empty); }) == ErrorCode::TooFewGroups);
}

TEST_CASE("validate_dataset reports the source line of an unbalanced group") {
  const std::vector<Observation> raw{{"a", 1, 2}, {"a", 2, 3}, {"b", 2, 4}};
  try {
    validate_dataset(raw);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnbalancedData);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("validate_dataset is idempotent on its own flattened output") {
  RngStream rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t groups = 2 + rng() % 6, n = 1 + rng() % 5;
    std::vector<Observation> raw;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < groups; ++i) {
        raw.push_back({"g" + std::to_string(i), rng.normal() * 10.0, std::nullopt});
      }
    }
    const auto once = validate_dataset(raw);
    const auto flat = once.flatten();
    CHECK(validate_dataset(flat) == once);
  }
}

TEST_CASE("SamplingModel invariants") {
  CHECK_NOTHROW(SamplingModel(1.0, 1, 2));
  CHECK(code_of([] { SamplingModel(0.0, 3, 3); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { SamplingModel(-1.0, 3, 3); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { SamplingModel(1.0, 0, 3); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { SamplingModel(1.0, 3, 1); }) == ErrorCode::InvalidParameter);
  CHECK(SamplingModel(2.0, 4, 3).mean_variance() == 0.5);
}

TEST_CASE("hyper statistic feasibility clamp") {
  CHECK(make_hyper_stat(3, 5, 3) == HyperStat{3, 5});
  // below s^2/I = 3 by less than 1e-9 * q: clamped onto the boundary
  const auto clamped = make_hyper_stat(3, 3.0 - 1e-10, 3);
  CHECK(clamped.q == 3.0);
  CHECK(centered_square_sum(clamped, 3) == 0.0);
  CHECK(code_of([] { make_hyper_stat(3, 1, 3); }) == ErrorCode::InfeasibleV);
  CHECK(code_of([] { make_hyper_stat(3, 3.0 - 1e-6, 3); }) == ErrorCode::InfeasibleV);
}

TEST_CASE("clamping never moves q by more than eps * max(1, q)") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t groups = 2 + rng() % 40;
    const double scale = std::pow(10.0, rng.uniform() * 12.0 - 6.0);
    const double offset = rng.normal() * scale * 100.0;
    double s = 0.0, q = 0.0;
    for (std::size_t i = 0; i < groups; ++i) {
      // nearly constant means push (s, q) to the boundary
      const double m = offset + scale * 1e-9 * rng.normal();
      s += m;
      q += m * m;
    }
    const auto v = make_hyper_stat(s, q, groups);
    CHECK(v.s == s);
    CHECK(std::abs(v.q - q) <= kFeasibilityTolerance * std::max(1.0, q));
    CHECK(v.q >= v.s * v.s / double(groups));
  }
}

TEST_CASE("HyperPrior parameters") {
  CHECK_FALSE(HyperPrior::improper_flat().is_proper());
  const auto p = HyperPrior::normal_inv_gamma(0, 1, 2, 1);
  CHECK(p.is_proper());
  CHECK(p.proper().a0 == 2);
  CHECK(code_of([] { HyperPrior::normal_inv_gamma(0, 0, 2, 1); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { HyperPrior::normal_inv_gamma(0, 1, -2, 1); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { HyperPrior::normal_inv_gamma(0, 1, 2, 0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("enum names round-trip") {
  for (Stage s : {Stage::Model, Stage::Pi2, Stage::Pi1, Stage::Pi2Star}) {
    CHECK(parse_stage(to_string(s)) == s);
  }
  CHECK(to_string(StageStatus::SkippedImproper) == "skipped_improper");
  CHECK(to_string(StageStatus::GatedNotRun) == "gated_not_run");
  CHECK(to_string(Decision::EvidenceOfConflict) == "evidence_of_conflict");
  CHECK_FALSE(parse_decision("maybe").has_value());
}
