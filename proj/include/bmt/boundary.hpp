#pragma once

// Time-uniform confidence boundaries for 1-sub-Gaussian sample means.
//
// Each boundary phi(t, delta) satisfies
//
//     P( exists t >= 1 : |mu_hat_t - mu| > phi(t, delta) ) <= delta
//
// for i.i.d. 1-sub-Gaussian observations, over the delta range reported by
// `valid_delta_max`. All logarithms are natural except the explicit log2
// inside the PHI0 boundary.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bmt {

enum class BoundaryKind {
    PHI0,   ///< sqrt(4 log(log2(2t) / delta) / t)
    PHIJJ,  ///< LIL boundary with the 2/6/3 constants, delta <= 0.1
    PHIIS,  ///< polynomial-stitched boundary, 2.89 / 2.041 / 2.065 / 4.983
};

struct Boundary {
    BoundaryKind kind = BoundaryKind::PHIJJ;

    friend bool operator==(const Boundary&, const Boundary&) = default;
};

std::string_view to_string(BoundaryKind kind);
BoundaryKind boundary_kind_from_string(std::string_view name);

/// Largest admissible delta. PHIJJ is closed at 0.1, the others are open at 1.
constexpr double valid_delta_max(BoundaryKind kind) {
    return kind == BoundaryKind::PHIJJ ? 0.1 : 1.0;
}

constexpr bool delta_in_range(BoundaryKind kind, double delta) {
    if (!(delta > 0.0)) return false;
    return kind == BoundaryKind::PHIJJ ? delta <= 0.1 : delta < 1.0;
}

/// t * phi(t, delta)^2 written in terms of u = log(1/delta).
///
/// This is the quantity the p-process inversion works with: it is strictly
/// increasing in u, so crossing tests never need to leave log space.
template <typename Scalar>
Scalar boundary_sq_times_t(BoundaryKind kind, std::uint64_t t, Scalar log_inv_delta) {
    using std::log;
    const Scalar tt = static_cast<Scalar>(t);
    switch (kind) {
    case BoundaryKind::PHI0:
        // 4 * (log(log2(2t)) + log(1/delta))
        return Scalar(4) * (log(std::log2(Scalar(2) * tt)) + log_inv_delta);
    case BoundaryKind::PHIJJ:
        return Scalar(2) * log_inv_delta + Scalar(6) * log(log_inv_delta) +
               Scalar(3) * log(log(std::exp(Scalar(1)) * tt / Scalar(2)));
    case BoundaryKind::PHIIS:
        return Scalar(2.89) * log(log(Scalar(2.041) * tt)) +
               Scalar(2.065) * (log(Scalar(4.983)) + log_inv_delta);
    }
    return Scalar(0);
}

/// phi_kind(t, delta). Throws std::domain_error outside t >= 1 and the
/// kind's delta range.
template <typename Scalar = double>
Scalar eval_boundary(Boundary b, std::uint64_t t, Scalar delta) {
    if (t < 1) throw std::domain_error("boundary: t must be >= 1");
    if (!delta_in_range(b.kind, static_cast<double>(delta)))
        throw std::domain_error("boundary: delta outside valid range for " +
                                std::string(to_string(b.kind)));
    using std::log;
    using std::sqrt;
    const Scalar num = boundary_sq_times_t<Scalar>(b.kind, t, -log(delta));
    return sqrt(num / static_cast<Scalar>(t));
}

}  // namespace bmt
