#include "bmt/e_process.hpp"

#include "bmt/log_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bmt {

std::string_view to_string(LambdaKind kind) {
    switch (kind) {
    case LambdaKind::FIXED: return "fixed";
    case LambdaKind::DEFAULT_WSR: return "default_wsr";
    case LambdaKind::BETTING_HALF_MEAN: return "betting_half_mean";
    }
    return "?";
}

LambdaKind lambda_kind_from_string(std::string_view name) {
    if (name == "fixed") return LambdaKind::FIXED;
    if (name == "default_wsr") return LambdaKind::DEFAULT_WSR;
    if (name == "betting_half_mean") return LambdaKind::BETTING_HALF_MEAN;
    throw std::invalid_argument("unknown lambda strategy '" + std::string(name) + "'");
}

double next_lambda(const LambdaStrategy& strategy, std::uint64_t prior_count,
                   double prior_sum, double mu0) {
    switch (strategy.kind) {
    case LambdaKind::FIXED:
        return strategy.param;
    case LambdaKind::DEFAULT_WSR: {
        const double t = static_cast<double>(prior_count + 1);
        return std::sqrt(2.0 * std::log(2.0 / strategy.param) / (t * std::log(t + 1.0)));
    }
    case LambdaKind::BETTING_HALF_MEAN: {
        if (prior_count == 0) return 0.0;
        const double mu_hat = prior_sum / static_cast<double>(prior_count);
        return std::max(0.0, (mu_hat - mu0) / 2.0);
    }
    }
    return 0.0;
}

double mixture_lambda(int l) { return std::exp(-(static_cast<double>(l) + 2.5)); }

double mixture_weight(int l) {
    constexpr double e = std::numbers::e;
    const double d = static_cast<double>(l) + 2.0;
    return 2.0 * (e - 1.0) / (e * d * d);
}

namespace {

MixtureGrid build_grid() {
    MixtureGrid g{};
    constexpr double e = std::numbers::e;
    const double total = 2.0 * (e - 1.0) / e * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0);
    double explicit_weight = 0.0;
    for (int l = 0; l < kMixtureComponents; ++l) {
        g.lambda(l) = mixture_lambda(l);
        g.log_weight(l) = std::log(mixture_weight(l));
        explicit_weight += mixture_weight(l);
    }
    // Tail l >= 50 folded into one component at the largest tail bet. The
    // tail bets are below 1e-22, so every tail factor is 1 to double precision.
    g.lambda(kMixtureComponents) = mixture_lambda(kMixtureComponents);
    g.log_weight(kMixtureComponents) = std::log(total - explicit_weight);
    g.total_weight = total;
    return g;
}

}  // namespace

const MixtureGrid& mixture_grid() {
    static const MixtureGrid grid = build_grid();
    return grid;
}

double EProcessState::e_value() const { return std::exp(log_e); }

double compute_log_e(const EProcessState& s) {
    if (s.variant == EVariant::PMH) return s.log_wealth + s.log_offset;
    return log_sum_exp((mixture_grid().log_weight + s.log_terms).eval()) + s.log_offset;
}

EProcessState make_pmh(LambdaStrategy lambda, double mu0) {
    EProcessState s;
    s.variant = EVariant::PMH;
    s.mu0 = mu0;
    s.lambda = lambda;
    s.log_e = compute_log_e(s);
    return s;
}

EProcessState make_discrete_mixture(double mu0) {
    EProcessState s;
    s.variant = EVariant::DISCRETE_MIXTURE;
    s.mu0 = mu0;
    s.log_e = compute_log_e(s);
    return s;
}

EProcessState pmh_update(EProcessState s, double x, double lambda) {
    if (s.variant != EVariant::PMH) throw std::logic_error("pmh_update on a mixture state");
    if (!(lambda >= 0.0)) throw std::invalid_argument("pmh_update: bet must be >= 0");
    s.log_wealth += lambda * (x - s.mu0) - 0.5 * lambda * lambda;
    s.count += 1;
    s.sum += x;
    s.log_e = s.log_wealth + s.log_offset;
    return s;
}

EProcessState pmh_update(EProcessState s, double x) {
    const double lambda = next_lambda(s.lambda, s.count, s.sum, s.mu0);
    return pmh_update(std::move(s), x, lambda);
}

EProcessState dm_update(EProcessState s, double x) {
    if (s.variant != EVariant::DISCRETE_MIXTURE)
        throw std::logic_error("dm_update on a PMH state");
    const auto& lam = mixture_grid().lambda;
    s.log_terms += lam * (x - s.mu0) - 0.5 * lam.square();
    s.count += 1;
    s.sum += x;
    s.log_e = compute_log_e(s);
    return s;
}

EProcessState e_update(EProcessState s, double x) {
    return s.variant == EVariant::PMH ? pmh_update(std::move(s), x) : dm_update(std::move(s), x);
}

}  // namespace bmt
