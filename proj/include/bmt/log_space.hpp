#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace bmt {

/// log(sum_i exp(a_i)), stable for any mix of large and -inf entries.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::ArrayBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    if (a.size() == 0) return -std::numeric_limits<Scalar>::infinity();
    const Scalar m = a.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((a - m).exp().sum());
}

/// log(exp(a) + exp(b)).
template <typename Scalar>
Scalar log_add(Scalar a, Scalar b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<Scalar>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace bmt
