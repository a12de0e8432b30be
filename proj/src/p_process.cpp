#include "bmt/p_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmt {

namespace {

constexpr double kBisectionTol = 1e-12;
constexpr int kBisectionMaxIter = 200;

}  // namespace

double PProcessState::current_p() const { return std::max(std::exp(log_p), kPFloor); }
double PProcessState::running_inf_p() const { return std::max(std::exp(log_inf_p), kPFloor); }

PProcessState make_boundary_p_process(Boundary boundary, double mu0) {
    PProcessState s;
    s.boundary = boundary;
    s.mu0 = mu0;
    s.mode = PMode::BOUNDARY_INVERSION;
    return s;
}

PProcessState make_inverse_e_p_process(LambdaStrategy lambda, double mu0) {
    PProcessState s;
    s.mu0 = mu0;
    s.mode = PMode::INVERSE_E;
    s.inner = make_pmh(lambda, mu0);
    return s;
}

double p_from_e(double e) {
    if (!(e > 1.0)) return 1.0;
    return 1.0 / e;
}

double log_p_from_log_e(double log_e) { return std::min(0.0, -log_e); }

double phi0_log_p_closed_form(std::uint64_t t, double deviation) {
    const double tt = static_cast<double>(t);
    return std::min(0.0, std::log(std::log2(2.0 * tt)) - tt * deviation * deviation / 4.0);
}

double invert_boundary_log_p(BoundaryKind kind, std::uint64_t t, double deviation) {
    // In u = log(1/rho) the squared boundary is increasing; rho crosses
    // exactly when u < u*, so the p-value is exp(-u*).
    const double target = static_cast<double>(t) * deviation * deviation;
    const double u_min = -std::log(valid_delta_max(kind));
    auto g = [&](double u) { return boundary_sq_times_t<double>(kind, t, u); };

    if (!(target > g(u_min))) return 0.0;

    double lo = u_min;
    double hi = std::max(1.0, 2.0 * u_min);
    while (g(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) return -std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < kBisectionMaxIter && hi - lo > kBisectionTol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) < target ? lo : hi) = mid;
    }
    // lo is on the crossing side; -lo is the larger (conservative) p.
    return -lo;
}

PProcessState p_update(PProcessState s, double x) {
    s.count += 1;
    s.mean_sum += x;
    if (s.mode == PMode::INVERSE_E) {
        s.inner = pmh_update(std::move(s.inner), x);
        s.log_p = log_p_from_log_e(s.inner.log_e);
    } else {
        const double d = std::abs(s.mean() - s.mu0);
        s.log_p = s.boundary.kind == BoundaryKind::PHI0
                      ? phi0_log_p_closed_form(s.count, d)
                      : invert_boundary_log_p(s.boundary.kind, s.count, d);
    }
    s.log_inf_p = std::min(s.log_inf_p, s.log_p);
    return s;
}

}  // namespace bmt
