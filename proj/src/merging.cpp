#include "bmt/merging.hpp"

#include <numeric>
#include <stdexcept>

namespace bmt {

double merge_product(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 1.0, std::multiplies<>());
}

double merge_mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("merge_mean: empty input");
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

}  // namespace bmt
