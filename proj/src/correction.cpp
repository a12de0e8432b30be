#include "bmt/correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmt {

std::string_view to_string(Adaptivity a) {
    return a == Adaptivity::ADAPTIVE ? "adaptive" : "non_adaptive";
}
std::string_view to_string(Dependence d) {
    return d == Dependence::INDEPENDENT ? "independent" : "arbitrary";
}
std::string_view to_string(OutputKind o) {
    return o == OutputKind::STEP_UP ? "step_up" : "self_consistent_only";
}

Adaptivity adaptivity_from_string(std::string_view s) {
    if (s == "adaptive") return Adaptivity::ADAPTIVE;
    if (s == "non_adaptive") return Adaptivity::NON_ADAPTIVE;
    throw std::invalid_argument("unknown adaptivity '" + std::string(s) + "'");
}
Dependence dependence_from_string(std::string_view s) {
    if (s == "independent") return Dependence::INDEPENDENT;
    if (s == "arbitrary") return Dependence::ARBITRARY;
    throw std::invalid_argument("unknown dependence '" + std::string(s) + "'");
}
OutputKind output_kind_from_string(std::string_view s) {
    if (s == "step_up") return OutputKind::STEP_UP;
    if (s == "self_consistent_only") return OutputKind::SELF_CONSISTENT_ONLY;
    throw std::invalid_argument("unknown output kind '" + std::string(s) + "'");
}

double harmonic(std::size_t k) {
    if (k < 1) throw std::domain_error("harmonic: k must be >= 1");
    double sum = 0.0;
    // Smallest terms first.
    for (std::size_t i = k; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
}

double solve_c_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("solve_c_delta: delta in (0, 1)");
    auto f = [](double c) { return c * (1.0 - std::log(c)); };
    double lo = 0.0;
    double hi = delta;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < delta ? lo : hi) = mid;
    }
    return lo;
}

CorrectedLevel corrected_level_detail(double delta, const DependenceSetting& setting,
                                      TestMode mode, std::size_t k) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("corrected_level: delta in (0, 1)");
    if (k < 1) throw std::domain_error("corrected_level: k must be >= 1");
    if (mode == TestMode::E) return {delta, "delta"};

    const double lk = harmonic(k);
    if (setting.multi_arm_hypotheses) return {delta / lk, "delta/l_k"};

    const bool independent = setting.dependence == Dependence::INDEPENDENT;
    if (setting.output_kind == OutputKind::STEP_UP) {
        if (!independent) return {delta / lk, "delta/l_k"};
        if (setting.adaptivity == Adaptivity::NON_ADAPTIVE) return {delta, "delta"};
        return {std::max(solve_c_delta(delta), delta / lk), "max(c_delta, delta/l_k)"};
    }
    // Arbitrary self-consistent output: adaptivity no longer matters.
    if (independent)
        return {std::max(solve_c_delta(delta), delta / lk), "max(c_delta, delta/l_k)"};
    return {solve_c_delta(delta) / lk, "c_delta/l_k"};
}

}  // namespace bmt
