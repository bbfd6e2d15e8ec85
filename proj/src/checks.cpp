#include "priorcheck/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "priorcheck/error.hpp"
#include "priorcheck/parallel.hpp"
#include "priorcheck/sampler.hpp"
#include "priorcheck/sufficiency.hpp"

namespace priorcheck {

namespace {

void require_draws(const McOptions& mc) {
  if (mc.n_draws == 0) throw Error(ErrorCode::EmptyDraws, "n_draws must be >= 1");
}

void require_shape(const GroupedDataset& data, const SamplingModel& model) {
  if (data.groups() != model.groups() || data.per_group() != model.per_group()) {
    throw Error(ErrorCode::InvalidParameter, "dataset shape does not match the sampling model");
  }
}

// Evaluates draw(rng) for every replicate of `stage` in parallel.
template <class Draw>
std::vector<double> reference_sample(Stage stage, const McOptions& mc, Draw&& draw) {
  std::vector<double> out(mc.n_draws);
  parallel_for(mc.n_draws, mc.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      RngStream rng(mc.seed, stage_stream(stage_index(stage), k));
      out[k] = draw(rng);
    }
  });
  return out;
}

PValueResult finish(PValueResult r, const std::string& name, const McOptions& mc) {
  r.discrepancy_name = name;
  r.seed = mc.seed;
  return r;
}

}  // namespace

PValueResult mc_pvalue(double observed_h, std::span<const double> reference_draws) {
  if (reference_draws.empty()) throw Error(ErrorCode::EmptyDraws, "no reference draws");
  if (!std::isfinite(observed_h)) {
    throw Error(ErrorCode::NonFiniteValue, "observed discrepancy is not finite");
  }
  double largest = 0.0;
  for (double d : reference_draws) {
    if (!std::isfinite(d)) throw Error(ErrorCode::NonFiniteValue, "non-finite reference draw");
    largest = std::max(largest, std::abs(d));
  }

  const std::size_t n = reference_draws.size();
  const double mean = pairwise_sum(reference_draws) / static_cast<double>(n);
  std::vector<double> dev2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = reference_draws[k] - mean;
    dev2[k] = d * d;
  }
  const double variance = n > 1 ? pairwise_sum(dev2) / static_cast<double>(n - 1) : 0.0;
  const double band = kDegeneracyTolerance * std::max(1.0, largest);
  const bool degenerate = std::sqrt(variance) <= band;

  std::size_t exceed = 0;
  if (degenerate && std::abs(observed_h - mean) <= band) {
    exceed = n;
  } else {
    for (double d : reference_draws) exceed += d >= observed_h ? 1 : 0;
  }

  PValueResult r;
  r.n_draws = n;
  r.observed_h = observed_h;
  r.p = static_cast<double>(exceed + 1) / static_cast<double>(n + 1);
  r.mc_stderr = std::sqrt(r.p * (1.0 - r.p) / static_cast<double>(n));
  r.degenerate = degenerate;
  return r;
}

PValueResult check_model(const GroupedDataset& data, const SamplingModel& model,
                         const ResidualDiscrepancy& h, const McOptions& mc) {
  require_shape(data, model);
  require_draws(mc);
  if (model.per_group() < 2) {
    throw Error(ErrorCode::NoResidualInformation,
                "residuals are identically zero when n = 1; the model check is skipped");
  }
  const double sigma2 = model.sigma2();
  const double observed = h.eval(compute_residuals(data, compute_T(data)), sigma2);
  const auto draws = reference_sample(Stage::Model, mc, [&](RngStream& rng) {
    return h.eval(sample_residual_matrix(model, rng), sigma2);
  });
  return finish(mc_pvalue(observed, draws), h.name, mc);
}

PValueResult check_pi2(const GroupedDataset& data, const SamplingModel& model,
                       const TDiscrepancy& h, const McOptions& mc) {
  require_shape(data, model);
  require_draws(mc);
  const auto t = compute_T(data);
  const auto v = compute_V(t);
  const std::size_t groups = data.groups();
  const auto basis = helmert_basis(groups);

  const double observed = h.eval(t.means);
  const auto draws = reference_sample(Stage::Pi2, mc, [&](RngStream& rng) {
    return h.eval(sample_T_given_V(v, groups, basis, rng));
  });
  auto result = finish(mc_pvalue(observed, draws), h.name, mc);
  if (result.degenerate && groups >= 3) {
    throw Error(ErrorCode::DegenerateDiscrepancy,
                "'" + h.name + "' is constant given V; it cannot detect conflict with the "
                "second level");
  }
  return result;
}

std::optional<PValueResult> check_pi1(const GroupedDataset& data, const SamplingModel& model,
                                      const HyperPrior& prior, const VDiscrepancy& d,
                                      const McOptions& mc) {
  require_shape(data, model);
  require_draws(mc);
  if (!prior.is_proper()) return std::nullopt;

  const auto observed = compute_V(compute_T(data));
  std::vector<HyperStat> reference(mc.n_draws);
  parallel_for(mc.n_draws, mc.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      RngStream rng(mc.seed, stage_stream(stage_index(Stage::Pi1), k));
      const Hyper hyper = sample_hyper(prior, rng);
      reference[k] = sample_V_given_hyper(hyper, model, rng);
    }
  });
  const auto scores = d.score(observed, reference, data.groups());
  return finish(mc_pvalue(scores.observed, scores.reference), d.name, mc);
}

PValueResult check_pi2_star(const GroupedDataset& data, const SamplingModel& model,
                            const HyperPrior& prior, const TDiscrepancy& h,
                            const McOptions& mc) {
  require_shape(data, model);
  require_draws(mc);
  if (!prior.is_proper()) {
    throw Error(ErrorCode::ImproperPriorNotSamplable,
                "the marginal check needs a proper hyperprior");
  }
  const double observed = h.eval(compute_T(data).means);
  const auto draws = reference_sample(Stage::Pi2Star, mc, [&](RngStream& rng) {
    const Hyper hyper = sample_hyper(prior, rng);
    return h.eval(sample_T_given_hyper(hyper, model, rng));
  });
  return finish(mc_pvalue(observed, draws), h.name, mc);
}

double check_simple(double xbar, std::size_t n, double sigma2, double mu0, double tau0sq) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1");
  if (!(sigma2 > 0.0) || !(tau0sq > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "sigma2 and tau0sq must be > 0");
  }
  if (!std::isfinite(xbar) || !std::isfinite(mu0)) {
    throw Error(ErrorCode::NonFiniteValue, "xbar and mu0 must be finite");
  }
  const double z = std::abs(xbar - mu0) / std::sqrt(tau0sq + sigma2 / static_cast<double>(n));
  // 2 (1 - Phi(z)) without cancellation in the upper tail.
  return std::erfc(z / std::numbers::sqrt2);
}

namespace {

StageRecord gated(Stage stage, double alpha, std::string discrepancy) {
  StageRecord rec;
  rec.stage = stage;
  rec.status = StageStatus::GatedNotRun;
  rec.alpha = alpha;
  rec.decision = Decision::NotRun;
  rec.discrepancy = std::move(discrepancy);
  rec.message = "an earlier stage did not pass";
  return rec;
}

// Runs `check` and fills the record; any library error becomes a failed stage.
template <class Check>
StageRecord run_stage(Stage stage, double alpha, const std::string& discrepancy,
                      Check&& check) {
  StageRecord rec;
  rec.stage = stage;
  rec.alpha = alpha;
  rec.discrepancy = discrepancy;
  try {
    std::optional<PValueResult> result = check();
    if (!result) {
      rec.status = StageStatus::SkippedImproper;
      rec.decision = Decision::Skipped;
      rec.message = "improper hyperprior: asserted never to conflict with the data";
      return rec;
    }
    rec.status = StageStatus::Run;
    rec.decision = result->p <= alpha ? Decision::EvidenceOfConflict : Decision::NoEvidence;
    if (result->degenerate) rec.message = "DegenerateDiscrepancy: reference law is a point mass";
    rec.result = std::move(result);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoResidualInformation) {
      rec.status = StageStatus::SkippedNoInformation;
      rec.decision = Decision::Skipped;
    } else {
      rec.status = StageStatus::Failed;
      rec.decision = Decision::NotRun;
    }
    rec.message = e.what();
  }
  return rec;
}

bool blocks_later_stages(const StageRecord& rec) {
  return rec.decision == Decision::EvidenceOfConflict || rec.status == StageStatus::Failed;
}

}  // namespace

CheckReport run_protocol(const GroupedDataset& data, const SamplingModel& model,
                         const HyperPrior& prior, const ProtocolConfig& config) {
  const McOptions mc{config.n_draws, config.seed, config.threads};
  const double alpha = config.alpha;

  CheckReport report;
  report.groups = data.groups();
  report.per_group = data.per_group();

  report.stages.push_back(run_stage(Stage::Model, alpha, config.model_discrepancy, [&] {
    return std::optional(
        check_model(data, model, residual_discrepancy(config.model_discrepancy), mc));
  }));

  if (blocks_later_stages(report.stages.back())) {
    report.stages.push_back(gated(Stage::Pi2, alpha, config.pi2_discrepancy));
  } else {
    report.stages.push_back(run_stage(Stage::Pi2, alpha, config.pi2_discrepancy, [&] {
      return std::optional(check_pi2(data, model, t_discrepancy(config.pi2_discrepancy), mc));
    }));
  }

  if (blocks_later_stages(report.stages.back()) ||
      report.stages.back().status == StageStatus::GatedNotRun) {
    report.stages.push_back(gated(Stage::Pi1, alpha, config.pi1_discrepancy));
  } else {
    report.stages.push_back(run_stage(Stage::Pi1, alpha, config.pi1_discrepancy, [&] {
      return check_pi1(data, model, prior, v_discrepancy(config.pi1_discrepancy), mc);
    }));
  }

  report.inference_ready = std::all_of(
      report.stages.begin(), report.stages.end(), [](const StageRecord& rec) {
        return rec.decision == Decision::NoEvidence || rec.decision == Decision::Skipped;
      });
  return report;
}

}  // namespace priorcheck
