#pragma once

// Sub-Gaussian e-processes for the one-sided mean null "mean <= mu0".
//
// Two families are provided:
//
//   PMH               prod_j exp(lambda_j (X_j - mu0) - lambda_j^2 / 2)
//                     with a predictable bet lambda_j >= 0.
//   DISCRETE_MIXTURE  sum_l w_l exp(sum_j lambda_l (X_j - mu0) - lambda_l^2 / 2)
//                     with lambda_l = e^{-(l + 5/2)}, w_l = 2(e-1) / (e (l+2)^2).
//
// Everything is carried as log-wealth; `e_value()` is only a convenience.

#include <Eigen/Core>

#include <cstdint>
#include <string_view>

namespace bmt {

enum class LambdaKind {
    FIXED,              ///< constant bet
    DEFAULT_WSR,        ///< sqrt(2 log(2/alpha) / (T log(T + 1)))
    BETTING_HALF_MEAN,  ///< ((mu_hat - mu0) / 2)_+ over prior samples
};

struct LambdaStrategy {
    LambdaKind kind = LambdaKind::DEFAULT_WSR;
    /// FIXED: the bet. DEFAULT_WSR: alpha. Unused for BETTING_HALF_MEAN.
    double param = 0.05;

    static LambdaStrategy fixed(double lambda) { return {LambdaKind::FIXED, lambda}; }
    static LambdaStrategy default_wsr(double alpha) { return {LambdaKind::DEFAULT_WSR, alpha}; }
    static LambdaStrategy betting_half_mean() { return {LambdaKind::BETTING_HALF_MEAN, 0.0}; }

    friend bool operator==(const LambdaStrategy&, const LambdaStrategy&) = default;
};

std::string_view to_string(LambdaKind kind);
LambdaKind lambda_kind_from_string(std::string_view name);

/// Bet for the next sample given only the samples before it.
///
/// DEFAULT_WSR uses T = prior_count + 1 (the index of the sample being bet
/// on), which keeps the bet finite at the first sample.
double next_lambda(const LambdaStrategy& strategy, std::uint64_t prior_count,
                   double prior_sum, double mu0);

enum class EVariant { PMH, DISCRETE_MIXTURE };

/// Explicit mixture components; one extra slot aggregates the tail l >= 50.
inline constexpr int kMixtureComponents = 50;
inline constexpr int kMixtureSlots = kMixtureComponents + 1;
using MixtureArray = Eigen::Array<double, kMixtureSlots, 1>;

struct MixtureGrid {
    MixtureArray lambda;
    MixtureArray log_weight;
    /// Sum of all slot weights; equals 2(e-1)/e * (pi^2/6 - 1) up to rounding.
    double total_weight;
};

/// Process-wide constant grid.
const MixtureGrid& mixture_grid();

double mixture_lambda(int l);  ///< e^{-(l + 5/2)}
double mixture_weight(int l);  ///< 2(e-1) / (e (l+2)^2)

struct EProcessState {
    EVariant variant = EVariant::PMH;
    std::uint64_t count = 0;
    double mu0 = 0.0;
    double sum = 0.0;  ///< running sum of raw observations

    // PMH
    LambdaStrategy lambda{};
    double log_wealth = 0.0;

    // DISCRETE_MIXTURE: L_l = sum_j lambda_l (X_j - mu0) - lambda_l^2 / 2
    MixtureArray log_terms = MixtureArray::Zero();

    /// Additive shift on the reported log e-value. Zero for a genuine
    /// e-process; used to pre-seed evidence in tests and replays.
    double log_offset = 0.0;

    /// Cached log e-value, maintained by the update functions.
    double log_e = 0.0;

    double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
    double e_value() const;
};

EProcessState make_pmh(LambdaStrategy lambda, double mu0);
EProcessState make_discrete_mixture(double mu0);

/// PMH step with the bet drawn from the state's strategy before the update.
EProcessState pmh_update(EProcessState s, double x);
/// PMH step with an explicit bet (must be >= 0).
EProcessState pmh_update(EProcessState s, double x, double lambda);
EProcessState dm_update(EProcessState s, double x);
/// Dispatches on `s.variant`.
EProcessState e_update(EProcessState s, double x);

/// Recomputes `log_e` from the raw state. The update functions already do this.
double compute_log_e(const EProcessState& s);

}  // namespace bmt
