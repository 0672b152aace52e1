#pragma once

// Property suites shared by the unit tests and the acceptance binary.

#include "property.hpp"

namespace suites {

inline constexpr int kDefaultCases = 100;

prop::Outcome weighting_inverse_identity(int cases = kDefaultCases);
prop::Outcome scaled_frequency_identity(int cases = kDefaultCases);
prop::Outcome rcf_grid_identity(int cases = kDefaultCases);
prop::Outcome simulate_linearity(int cases = kDefaultCases);
/// Certified rate of gradient descent with half-order 3 never exceeds the
/// half-order 0 rate (same grid), over random step sizes.
prop::Outcome order_monotonicity(int cases = kDefaultCases);
/// (1 - beta) phi + beta c id stays in the slope class.
prop::Outcome convex_combination_closure(int cases = kDefaultCases);

}  // namespace suites
