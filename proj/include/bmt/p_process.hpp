#pragma once

// Anytime p-processes for the mean null.
//
// BOUNDARY_INVERSION: P_t = inf{rho : |mu_hat_t - mu0| > phi(t, rho)}, the
// smallest level at which the time-uniform boundary is already crossed.
// INVERSE_E: P_t = min(1, 1 / E_t) for a wrapped PMH e-process.
//
// p-values live in log space; the linear accessors clamp to [kPFloor, 1].

#include "bmt/boundary.hpp"
#include "bmt/e_process.hpp"

#include <cstdint>

namespace bmt {

inline constexpr double kPFloor = 1e-320;

enum class PMode { BOUNDARY_INVERSION, INVERSE_E };

struct PProcessState {
    std::uint64_t count = 0;
    double mean_sum = 0.0;
    double mu0 = 0.0;
    Boundary boundary{};
    PMode mode = PMode::BOUNDARY_INVERSION;
    double log_p = 0.0;      ///< log P_t
    double log_inf_p = 0.0;  ///< log inf_{s <= t} P_s
    EProcessState inner{};   ///< INVERSE_E only

    double mean() const { return count == 0 ? 0.0 : mean_sum / static_cast<double>(count); }
    double current_p() const;
    double running_inf_p() const;
};

PProcessState make_boundary_p_process(Boundary boundary, double mu0);
PProcessState make_inverse_e_p_process(LambdaStrategy lambda, double mu0);

PProcessState p_update(PProcessState s, double x);

/// min(1, 1/e); 1 for e <= 1 (including e = 0).
double p_from_e(double e);
/// log-space version of `p_from_e`.
double log_p_from_log_e(double log_e);

/// log of inf{rho in (0, rho_max] : deviation > phi(t, rho)} by bisection on
/// log(1/rho). Returns 0 (p = 1) when the boundary is not crossed anywhere in
/// the valid range.
double invert_boundary_log_p(BoundaryKind kind, std::uint64_t t, double deviation);

/// Closed form for PHI0: log min(1, log2(2t) exp(-t d^2 / 4)).
double phi0_log_p_closed_form(std::uint64_t t, double deviation);

}  // namespace bmt
