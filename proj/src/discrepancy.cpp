#include "priorcheck/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "priorcheck/error.hpp"

namespace priorcheck {

namespace discrepancies {

namespace {

struct CentralMoments {
  double m2 = 0.0;
  double m3 = 0.0;
};

CentralMoments central_moments(std::span<const double> ascending) {
  const double n = static_cast<double>(ascending.size());
  const double mean = pairwise_sum(ascending) / n;
  std::vector<double> d2(ascending.size()), d3(ascending.size());
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    const double d = ascending[i] - mean;
    d2[i] = d * d;
    d3[i] = d * d * d;
  }
  return {pairwise_sum(d2) / n, pairwise_sum(d3) / n};
}

}  // namespace

double range(std::span<const double> y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo;
}

double skew(std::span<const double> y) {
  const auto s = sorted(y);
  const auto m = central_moments(s);
  if (m.m2 <= 0.0) return 0.0;
  return m.m3 / std::pow(m.m2, 1.5);
}

double maxabs_dev(std::span<const double> y) {
  const auto s = sorted(y);
  const double mean = pairwise_sum(s) / static_cast<double>(s.size());
  return std::max(std::abs(s.front() - mean), std::abs(s.back() - mean));
}

double chisq_total(const Matrix& residuals, double sigma2) {
  std::vector<double> squares;
  squares.reserve(residuals.flat().size());
  for (double r : residuals.flat()) squares.push_back(r * r);
  return stable_sum(squares) / sigma2;
}

double max_std_resid(const Matrix& residuals, double sigma2) {
  double worst = 0.0;
  for (double r : residuals.flat()) worst = std::max(worst, std::abs(r));
  return worst / std::sqrt(sigma2);
}

std::array<double, 2> hyper_coordinates(const HyperStat& v, std::size_t groups) {
  const double dim = static_cast<double>(groups);
  const double spread = centered_square_sum(v, groups) + kMahalanobisLogGuard;
  return {v.s / dim, std::log(spread / (dim - 1.0))};
}

VScores mahalanobis_mv(const HyperStat& observed, std::span<const HyperStat> reference,
                       std::size_t groups) {
  const std::size_t total = reference.size() + 1;
  std::vector<double> x(total), y(total);
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const auto w = hyper_coordinates(reference[k], groups);
    x[k] = w[0];
    y[k] = w[1];
  }
  {
    const auto w = hyper_coordinates(observed, groups);
    x.back() = w[0];
    y.back() = w[1];
  }

  const double count = static_cast<double>(total);
  const double mx = pairwise_sum(x) / count;
  const double my = pairwise_sum(y) / count;
  std::vector<double> dxx(total), dyy(total), dxy(total);
  for (std::size_t k = 0; k < total; ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    dxx[k] = dx * dx;
    dyy[k] = dy * dy;
    dxy[k] = dx * dy;
  }
  const double denom = count > 1.0 ? count - 1.0 : 1.0;
  const double sxx = pairwise_sum(dxx) / denom;
  const double syy = pairwise_sum(dyy) / denom;
  const double sxy = pairwise_sum(dxy) / denom;
  const double det = sxx * syy - sxy * sxy;
  if (!(det > 1e-12 * std::max(1.0, sxx * syy))) {
    throw Error(ErrorCode::DegenerateDiscrepancy,
                "mahalanobis_mv: reference covariance is singular");
  }

  auto distance = [&](std::size_t k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    return (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) / det;
  };
  VScores out;
  out.reference.resize(reference.size());
  for (std::size_t k = 0; k < reference.size(); ++k) out.reference[k] = distance(k);
  out.observed = distance(total - 1);
  return out;
}

}  // namespace discrepancies

TDiscrepancy t_discrepancy(std::string_view name) {
  if (name == "range") return {"range", discrepancies::range};
  if (name == "skew") return {"skew", discrepancies::skew};
  if (name == "maxabs_dev") return {"maxabs_dev", discrepancies::maxabs_dev};
  throw Error(ErrorCode::UnknownDiscrepancy,
              "no T-space discrepancy named '" + std::string(name) + "'");
}

ResidualDiscrepancy residual_discrepancy(std::string_view name) {
  if (name == "chisq_total") return {"chisq_total", discrepancies::chisq_total};
  if (name == "max_std_resid") return {"max_std_resid", discrepancies::max_std_resid};
  throw Error(ErrorCode::UnknownDiscrepancy,
              "no residual-space discrepancy named '" + std::string(name) + "'");
}

VDiscrepancy v_discrepancy(std::string_view name) {
  if (name == "mahalanobis_mv") return {"mahalanobis_mv", discrepancies::mahalanobis_mv};
  throw Error(ErrorCode::UnknownDiscrepancy,
              "no V-space discrepancy named '" + std::string(name) + "'");
}

std::vector<std::string> builtin_discrepancies(Space space) {
  switch (space) {
    case Space::T: return {"range", "skew", "maxabs_dev"};
    case Space::Residual: return {"chisq_total", "max_std_resid"};
    case Space::V: return {"mahalanobis_mv"};
  }
  return {};
}

std::optional<Space> discrepancy_space(std::string_view name) {
  for (Space space : {Space::T, Space::Residual, Space::V}) {
    for (const auto& known : builtin_discrepancies(space)) {
      if (known == name) return space;
    }
  }
  return std::nullopt;
}

}  // namespace priorcheck
