#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "priorcheck/model.hpp"
#include "priorcheck/numeric.hpp"
#include "priorcheck/rng.hpp"

namespace priorcheck {

// I x (I-1) matrix whose columns form an orthonormal basis of the subspace
// orthogonal to the all-ones vector.
class ComplementBasis {
 public:
  std::size_t dim() const noexcept { return columns_.rows(); }
  // Entry (row, col) with 0-based indices.
  double operator()(std::size_t row, std::size_t col) const { return columns_(row, col); }
  const Matrix& matrix() const noexcept { return columns_; }

  // out = A * u, with u of length dim() - 1 and out of length dim().
  void apply(std::span<const double> u, std::span<double> out) const;

 private:
  friend ComplementBasis helmert_basis(std::size_t groups);
  explicit ComplementBasis(Matrix columns) : columns_(std::move(columns)) {}

  Matrix columns_;
};

// Helmert construction: column k (1-based) has 1/sqrt(k(k+1)) in rows 1..k,
// -k/sqrt(k(k+1)) in row k+1 and zeros below. Throws DimensionTooSmall for I < 2.
ComplementBasis helmert_basis(std::size_t groups);

// Uniform point on the unit sphere in R^dim (normalized Gaussian vector).
std::vector<double> sample_unit_sphere(std::size_t dim, RngStream& rng);
void sample_unit_sphere(std::span<double> out, RngStream& rng);

// Uniform draw of T given V: the sphere of squared radius q centred on
// (s/I) 1 inside the hyperplane sum(y) = s,
//   y = (s/I) 1 + sqrt(q - s^2/I) A u,   u uniform on S^{I-2}.
// Throws InfeasibleV or DimensionTooSmall.
std::vector<double> sample_T_given_V(const HyperStat& v, std::size_t groups,
                                     const ComplementBasis& basis, RngStream& rng);

// Residuals x_ij - xbar_i drawn from their law given T: each row is an iid
// normal(0, sigma^2) vector minus its own mean.
Matrix sample_residual_matrix(const SamplingModel& model, RngStream& rng);

// (mu, tau^2) from a proper hyperprior; ImproperPriorNotSamplable otherwise.
Hyper sample_hyper(const HyperPrior& prior, RngStream& rng);

// T ~ N_I(mu 1, (tau^2 + sigma^2/n) I), reduced to V(T).
HyperStat sample_V_given_hyper(const Hyper& hyper, const SamplingModel& model, RngStream& rng);

// The group-mean vector T itself under the same law.
std::vector<double> sample_T_given_hyper(const Hyper& hyper, const SamplingModel& model,
                                         RngStream& rng);

}  // namespace priorcheck
