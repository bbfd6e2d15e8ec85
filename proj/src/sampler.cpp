#include "priorcheck/sampler.hpp"

#include <cmath>

#include "priorcheck/error.hpp"
#include "priorcheck/sufficiency.hpp"

namespace priorcheck {

namespace {

constexpr double kMinGaussianNorm = 1e-300;

}  // namespace

void ComplementBasis::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t rows = columns_.rows();
  const std::size_t cols = columns_.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const auto row = columns_.row(r);
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * u[c];
    out[r] = acc;
  }
}

ComplementBasis helmert_basis(std::size_t groups) {
  if (groups < 2) {
    throw Error(ErrorCode::DimensionTooSmall,
                "complement basis needs I >= 2, got " + std::to_string(groups));
  }
  Matrix a(groups, groups - 1);
  for (std::size_t k = 1; k < groups; ++k) {
    const double kk = static_cast<double>(k);
    const double norm = std::sqrt(kk * (kk + 1.0));
    for (std::size_t r = 0; r < k; ++r) a(r, k - 1) = 1.0 / norm;
    a(k, k - 1) = -kk / norm;
  }
  return ComplementBasis(std::move(a));
}

void sample_unit_sphere(std::span<double> out, RngStream& rng) {
  for (;;) {
    for (double& x : out) x = rng.normal();
    double norm2 = 0.0;
    for (double x : out) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (norm < kMinGaussianNorm) continue;
    for (double& x : out) x /= norm;
    return;
  }
}

std::vector<double> sample_unit_sphere(std::size_t dim, RngStream& rng) {
  std::vector<double> u(dim);
  sample_unit_sphere(u, rng);
  return u;
}

std::vector<double> sample_T_given_V(const HyperStat& v, std::size_t groups,
                                     const ComplementBasis& basis, RngStream& rng) {
  if (groups < 2) throw Error(ErrorCode::DimensionTooSmall, "I must be >= 2");
  if (basis.dim() != groups) {
    throw Error(ErrorCode::InvalidParameter, "basis dimension does not match I");
  }
  const HyperStat feasible = make_hyper_stat(v.s, v.q, groups);
  const double radius = std::sqrt(centered_square_sum(feasible, groups));
  const double centre = feasible.s / static_cast<double>(groups);

  std::vector<double> u(groups - 1);
  sample_unit_sphere(u, rng);
  std::vector<double> y(groups);
  basis.apply(u, y);
  for (double& yi : y) yi = centre + radius * yi;
  return y;
}

Matrix sample_residual_matrix(const SamplingModel& model, RngStream& rng) {
  const std::size_t n = model.per_group();
  const double sigma = std::sqrt(model.sigma2());
  Matrix r(model.groups(), n);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    auto row = r.row(i);
    for (double& z : row) z = sigma * rng.normal();
    const double mean = pairwise_sum(row) / static_cast<double>(n);
    for (double& z : row) z -= mean;
  }
  return r;
}

Hyper sample_hyper(const HyperPrior& prior, RngStream& rng) {
  if (!prior.is_proper()) {
    throw Error(ErrorCode::ImproperPriorNotSamplable,
                "the improper flat hyperprior cannot be sampled");
  }
  const auto& p = prior.proper();
  const double mu = p.m0 + std::sqrt(p.s0sq) * rng.normal();
  const double tau2 = p.b0 / rng.gamma(p.a0);
  return {mu, tau2};
}

std::vector<double> sample_T_given_hyper(const Hyper& hyper, const SamplingModel& model,
                                         RngStream& rng) {
  if (!(hyper.tau2 >= 0.0)) throw Error(ErrorCode::InvalidParameter, "tau2 must be >= 0");
  const double sd = std::sqrt(hyper.tau2 + model.mean_variance());
  std::vector<double> t(model.groups());
  for (double& ti : t) ti = hyper.mu + sd * rng.normal();
  return t;
}

HyperStat sample_V_given_hyper(const Hyper& hyper, const SamplingModel& model, RngStream& rng) {
  return compute_V(SufficientStat{sample_T_given_hyper(hyper, model, rng)});
}

}  // namespace priorcheck
