#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "priorcheck/model.hpp"
#include "priorcheck/numeric.hpp"

namespace priorcheck {

// Space a discrepancy acts on: group means (R^I), residuals (R^{I x n}) or
// the hyper-statistic V (R^2).
enum class Space { T, Residual, V };

// h : R^I -> R. Used by the pi2 and pi2_star checks, so it has to be
// symmetric in its coordinates; built-ins sort their input first and are
// therefore bit-identical under permutation.
struct TDiscrepancy {
  std::string name;
  std::function<double(std::span<const double>)> eval;
};

// h : residual matrix, sigma^2 -> R.
struct ResidualDiscrepancy {
  std::string name;
  std::function<double(const Matrix&, double)> eval;
};

// Scores for the observed V and every reference V. V-space discrepancies see
// the whole reference sample because they are standardized against it.
struct VScores {
  double observed = 0.0;
  std::vector<double> reference;
};

struct VDiscrepancy {
  std::string name;
  std::function<VScores(const HyperStat& observed, std::span<const HyperStat> reference,
                        std::size_t groups)>
      score;
};

// Built-ins. Unknown names throw UnknownDiscrepancy.
//   T-space:        range, skew, maxabs_dev
//   residual-space: chisq_total, max_std_resid
//   V-space:        mahalanobis_mv
TDiscrepancy t_discrepancy(std::string_view name);
ResidualDiscrepancy residual_discrepancy(std::string_view name);
VDiscrepancy v_discrepancy(std::string_view name);

std::optional<Space> discrepancy_space(std::string_view name);
std::vector<std::string> builtin_discrepancies(Space space);

namespace discrepancies {

double range(std::span<const double> y);
// Standardized third central moment m3 / m2^(3/2); 0 when m2 == 0.
double skew(std::span<const double> y);
double maxabs_dev(std::span<const double> y);
double chisq_total(const Matrix& residuals, double sigma2);
double max_std_resid(const Matrix& residuals, double sigma2);

// Guard inside log(q - s^2/I + delta).
inline constexpr double kMahalanobisLogGuard = 1e-12;

// (s/I, log((q - s^2/I + delta) / (I - 1))): location and log-scale of T.
std::array<double, 2> hyper_coordinates(const HyperStat& v, std::size_t groups);

// Squared Mahalanobis distance of each point in hyper_coordinates, using the
// mean and covariance of the pooled sample (reference draws plus observed).
// Throws DegenerateDiscrepancy if that covariance is singular.
VScores mahalanobis_mv(const HyperStat& observed, std::span<const HyperStat> reference,
                       std::size_t groups);

}  // namespace discrepancies

}  // namespace priorcheck
