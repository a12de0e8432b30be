#include "bmt/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bmt {

std::string_view to_string(Procedure p) {
    switch (p) {
    case Procedure::BH: return "bh";
    case Procedure::EBH: return "ebh";
    case Procedure::CONSTRAINED_P: return "constrained_p";
    case Procedure::CONSTRAINED_E: return "constrained_e";
    }
    return "?";
}

bool RejectionSet::contains(std::size_t id) const {
    return std::binary_search(ids.begin(), ids.end(), id);
}

double log_threshold(double alpha, std::size_t set_size, std::size_t k) {
    return std::log(alpha * static_cast<double>(set_size) / static_cast<double>(k));
}

Eigen::VectorXd to_log(const Eigen::VectorXd& values) {
    return values.unaryExpr([](double v) { return std::log(v); });
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
}

}  // namespace

RejectionSet step_up_log(const Eigen::VectorXd& log_values, double alpha, TestMode mode) {
    check_alpha(alpha);
    const auto k = static_cast<std::size_t>(log_values.size());
    RejectionSet out;
    out.level = alpha;
    out.procedure = mode == TestMode::P ? Procedure::BH : Procedure::EBH;
    if (k == 0) return out;

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return strength(log_values(a), mode) < strength(log_values(b), mode);
    });

    std::size_t m = k;
    for (; m > 0; --m) {
        if (strength(log_values(order[m - 1]), mode) <= log_threshold(alpha, m, k)) break;
    }
    out.ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(out.ids.begin(), out.ids.end());
    return out;
}

RejectionSet bh_log(const Eigen::VectorXd& log_p, double alpha) {
    return step_up_log(log_p, alpha, TestMode::P);
}

RejectionSet ebh_log(const Eigen::VectorXd& log_e, double alpha) {
    return step_up_log(log_e, alpha, TestMode::E);
}

RejectionSet bh(const Eigen::VectorXd& pvals, double alpha) {
    check_alpha(alpha);
    if (pvals.size() == 0) throw std::invalid_argument("bh: empty input");
    if ((pvals.array() <= 0.0).any() || (pvals.array() > 1.0).any())
        throw std::invalid_argument("bh: p-values must lie in (0, 1]");
    return bh_log(to_log(pvals), alpha);
}

RejectionSet ebh(const Eigen::VectorXd& evals, double alpha) {
    check_alpha(alpha);
    if ((evals.array() < 0.0).any()) throw std::invalid_argument("ebh: negative e-value");
    return ebh_log(to_log(evals), alpha);
}

bool is_self_consistent_log(const Eigen::VectorXd& log_values, std::span<const std::size_t> set,
                            double alpha, TestMode mode) {
    if (set.empty()) return true;
    const auto k = static_cast<std::size_t>(log_values.size());
    const double tau = log_threshold(alpha, set.size(), k);
    return std::all_of(set.begin(), set.end(), [&](std::size_t i) {
        return strength(log_values(static_cast<Eigen::Index>(i)), mode) <= tau;
    });
}

bool is_self_consistent(const Eigen::VectorXd& values, std::span<const std::size_t> set,
                        double alpha, TestMode mode) {
    return is_self_consistent_log(to_log(values), set, alpha, mode);
}

RejectionSet brute_force_largest_self_consistent(const Eigen::VectorXd& values, double alpha,
                                                 TestMode mode) {
    check_alpha(alpha);
    const auto k = static_cast<std::size_t>(values.size());
    if (k > 16) throw std::invalid_argument("brute force oracle limited to k <= 16");
    const Eigen::VectorXd logs = to_log(values);

    RejectionSet best;
    best.level = alpha;
    best.procedure = mode == TestMode::P ? Procedure::BH : Procedure::EBH;
    std::vector<std::size_t> members;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        members.clear();
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1u << i)) members.push_back(i);
        if (members.size() < best.ids.size()) continue;
        if (!is_self_consistent_log(logs, members, alpha, mode)) continue;
        if (members.size() > best.ids.size() || members < best.ids) best.ids = members;
    }
    return best;
}

}  // namespace bmt
