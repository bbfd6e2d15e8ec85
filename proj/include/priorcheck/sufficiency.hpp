#pragma once

#include "priorcheck/model.hpp"
#include "priorcheck/numeric.hpp"

namespace priorcheck {

// Group means. Each mean uses an order-independent sum, so the result does not
// depend on the order of observations within a group.
SufficientStat compute_T(const GroupedDataset& data);

// V = (sum of means, sum of squared means), both order-independent, with the
// feasibility clamp applied.
HyperStat compute_V(const SufficientStat& t);

// r_ij = x_ij - xbar_i.
Matrix compute_residuals(const GroupedDataset& data, const SufficientStat& t);

}  // namespace priorcheck
