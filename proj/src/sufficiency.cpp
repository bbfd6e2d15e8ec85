#include "priorcheck/sufficiency.hpp"

#include "priorcheck/error.hpp"

namespace priorcheck {

SufficientStat compute_T(const GroupedDataset& data) {
  const auto& values = data.values();
  SufficientStat t;
  t.means.reserve(values.rows());
  const double n = static_cast<double>(values.cols());
  for (std::size_t i = 0; i < values.rows(); ++i) {
    t.means.push_back(stable_sum(values.row(i)) / n);
  }
  return t;
}

HyperStat compute_V(const SufficientStat& t) {
  std::vector<double> squares;
  squares.reserve(t.means.size());
  for (double m : t.means) squares.push_back(m * m);
  return make_hyper_stat(stable_sum(t.means), stable_sum(squares), t.means.size());
}

Matrix compute_residuals(const GroupedDataset& data, const SufficientStat& t) {
  const auto& values = data.values();
  if (t.means.size() != values.rows()) {
    throw Error(ErrorCode::InvalidParameter, "T does not match the dataset");
  }
  Matrix r(values.rows(), values.cols());
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) r(i, j) = values(i, j) - t.means[i];
  }
  return r;
}

}  // namespace priorcheck
