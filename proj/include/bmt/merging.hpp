#pragma once

#include <span>

namespace bmt {

/// Product of independent e-values. Empty input gives 1.
double merge_product(std::span<const double> values);

/// Mean of arbitrarily dependent e-values. Throws on empty input.
double merge_mean(std::span<const double> values);

}  // namespace bmt
