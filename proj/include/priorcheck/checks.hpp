#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "priorcheck/discrepancy.hpp"
#include "priorcheck/model.hpp"

namespace priorcheck {

// Monte Carlo settings shared by every check. Replicate k of stage s draws
// from RngStream(seed, 2^60 * s + k), so results do not depend on `threads`.
struct McOptions {
  std::size_t n_draws = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// Reference draws whose sample standard deviation is at most
// kDegeneracyTolerance * max(1, max|draw|) are treated as a point mass.
inline constexpr double kDegeneracyTolerance = 1e-9;

// p = (1 + #{k : draw_k >= observed}) / (N + 1), mc_stderr = sqrt(p(1-p)/N).
//
// If the draws are degenerate the result is flagged, and an observed value
// inside the point mass's tolerance band counts as tied with every draw
// (p = 1). Throws EmptyDraws for N = 0 and NonFiniteValue for non-finite
// input.
PValueResult mc_pvalue(double observed_h, std::span<const double> reference_draws);

// Sampling-model check against the residual law P(.|T).
// Throws NoResidualInformation when n = 1.
PValueResult check_model(const GroupedDataset& data, const SamplingModel& model,
                         const ResidualDiscrepancy& h, const McOptions& mc);

// Second-level check against M_T(.|V): reference T's are uniform on the
// sphere-in-hyperplane fixed by the observed V. Takes no hyperprior.
// Throws DegenerateDiscrepancy if h is constant on that set and I >= 3; at
// I = 2 every symmetric h is constant, and the flagged result (p = 1) is
// returned instead.
PValueResult check_pi2(const GroupedDataset& data, const SamplingModel& model,
                       const TDiscrepancy& h, const McOptions& mc);

// Hyperprior check against M_V. Returns nullopt for the improper flat prior,
// which is never checked.
std::optional<PValueResult> check_pi1(const GroupedDataset& data, const SamplingModel& model,
                                      const HyperPrior& prior, const VDiscrepancy& d,
                                      const McOptions& mc);

// Marginal check of T against M_T with the hyperparameter integrated out.
// Throws ImproperPriorNotSamplable for the improper prior.
PValueResult check_pi2_star(const GroupedDataset& data, const SamplingModel& model,
                            const HyperPrior& prior, const TDiscrepancy& h,
                            const McOptions& mc);

// One-level conjugate normal check in closed form:
// z = |xbar - mu0| / sqrt(tau0sq + sigma2/n), p = 2 (1 - Phi(z)).
double check_simple(double xbar, std::size_t n, double sigma2, double mu0, double tau0sq);

struct ProtocolConfig {
  double alpha = 0.05;
  std::size_t n_draws = 10000;
  std::uint64_t seed = 1;
  std::string model_discrepancy = "chisq_total";
  std::string pi2_discrepancy = "skew";
  std::string pi1_discrepancy = "mahalanobis_mv";
  unsigned threads = 1;
};

// model -> pi2 -> pi1, each stage gated on the previous one finding no
// evidence against it. Stage errors are recorded in the report, never thrown.
CheckReport run_protocol(const GroupedDataset& data, const SamplingModel& model,
                         const HyperPrior& prior, const ProtocolConfig& config);

}  // namespace priorcheck
