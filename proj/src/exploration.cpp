#include "bmt/exploration.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace bmt {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::UNIFORM: return "uniform";
    case PolicyKind::UCB: return "ucb";
    case PolicyKind::BEST_EVIDENCE: return "best_evidence";
    case PolicyKind::BAI_REDUCTION: return "bai";
    }
    return "?";
}

PolicyKind policy_kind_from_string(std::string_view name) {
    for (auto k : {PolicyKind::UNIFORM, PolicyKind::UCB, PolicyKind::BEST_EVIDENCE,
                   PolicyKind::BAI_REDUCTION})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

double PolicyState::mean(std::size_t arm) const {
    const auto i = static_cast<Eigen::Index>(arm);
    return counts(i) == 0 ? 0.0 : sums(i) / static_cast<double>(counts(i));
}

PolicyState make_policy(PolicyKind kind, std::size_t n_arms, Boundary boundary, double delta,
                        std::uint64_t seed) {
    if (n_arms == 0) throw std::invalid_argument("policy needs at least one arm");
    if (!delta_in_range(boundary.kind, delta))
        throw std::invalid_argument("policy delta outside the boundary's valid range");
    PolicyState p;
    p.kind = kind;
    p.counts = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(n_arms));
    p.sums = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_arms));
    p.boundary = boundary;
    p.delta = delta;
    p.rng.seed(seed);
    return p;
}

void observe(PolicyState& policy, std::size_t arm, double reward) {
    const auto i = static_cast<Eigen::Index>(arm);
    policy.counts(i) += 1;
    policy.sums(i) += reward;
}

ArmSet lift_to_superarm(std::size_t arm, std::span<const ArmSet> feasible) {
    for (const auto& s : feasible)
        if (std::find(s.begin(), s.end(), arm) != s.end()) return s;
    return {arm};
}

ArmSet select_uniform(PolicyState& policy, std::span<const ArmSet> feasible) {
    if (feasible.empty()) throw std::invalid_argument("select_uniform: empty feasible set");
    std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
    return feasible[pick(policy.rng)];
}

std::optional<ArmSet> select_ucb(PolicyState& policy, const std::vector<bool>& active,
                                 std::span<const ArmSet> feasible) {
    std::optional<std::size_t> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < policy.n_arms(); ++i) {
        if (!active[i]) continue;
        const auto n = policy.counts(static_cast<Eigen::Index>(i));
        if (n == 0) return lift_to_superarm(i, feasible);
        const double score = policy.mean(i) + eval_boundary(policy.boundary, n, policy.delta);
        if (!best || score > best_score) {
            best = i;
            best_score = score;
        }
    }
    if (!best) return std::nullopt;
    return lift_to_superarm(*best, feasible);
}

namespace {

std::size_t least_sampled(const PolicyState& policy, const ArmSet& arms) {
    std::size_t pick = arms.front();
    for (auto a : arms)
        if (policy.counts(static_cast<Eigen::Index>(a)) < policy.counts(static_cast<Eigen::Index>(pick)) ||
            (policy.counts(static_cast<Eigen::Index>(a)) == policy.counts(static_cast<Eigen::Index>(pick)) &&
             a < pick))
            pick = a;
    return pick;
}

}  // namespace

std::optional<ArmSet> select_best_evidence(PolicyState& policy, const Eigen::VectorXd& strengths,
                                           const std::vector<bool>& rejected,
                                           std::span<const ArmSet> hypothesis_arms,
                                           std::uint64_t round, std::span<const ArmSet> feasible) {
    const auto k = static_cast<std::size_t>(strengths.size());
    if (round >= 1 && round <= k) {
        const auto h = static_cast<std::size_t>(round - 1);
        return lift_to_superarm(least_sampled(policy, hypothesis_arms[h]), feasible);
    }
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < k; ++i) {
        if (rejected[i]) continue;
        if (!best || strengths(static_cast<Eigen::Index>(i)) < strengths(static_cast<Eigen::Index>(*best)))
            best = i;
    }
    if (!best) return std::nullopt;
    return lift_to_superarm(least_sampled(policy, hypothesis_arms[*best]), feasible);
}

namespace {

void restart_bai(PolicyState& policy, const std::vector<bool>& active) {
    auto& b = policy.bai;
    b.candidates.clear();
    for (std::size_t i = 0; i < policy.n_arms(); ++i)
        if (active[i]) b.candidates.push_back(i);
    b.restart_size = b.candidates.size();
    b.best.reset();
    b.running = !b.candidates.empty();
    ++b.restarts;
}

// One elimination pass; sets `best` when a single candidate survives.
void eliminate(PolicyState& policy) {
    auto& b = policy.bai;
    const double level = policy.delta / (2.0 * static_cast<double>(b.restart_size));
    const Boundary phi0{BoundaryKind::PHI0};
    for (auto a : b.candidates)
        if (policy.counts(static_cast<Eigen::Index>(a)) == 0) return;

    double max_lcb = -std::numeric_limits<double>::infinity();
    std::vector<double> ucb(b.candidates.size());
    for (std::size_t j = 0; j < b.candidates.size(); ++j) {
        const auto a = b.candidates[j];
        const double r = eval_boundary(phi0, policy.counts(static_cast<Eigen::Index>(a)), level);
        ucb[j] = policy.mean(a) + r;
        max_lcb = std::max(max_lcb, policy.mean(a) - r);
    }
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < b.candidates.size(); ++j)
        if (ucb[j] >= max_lcb) kept.push_back(b.candidates[j]);
    b.candidates = std::move(kept);
    if (b.candidates.size() == 1) {
        b.best = b.candidates.front();
        b.running = false;
    }
}

}  // namespace

std::optional<ArmSet> select_bai(PolicyState& policy, const std::vector<bool>& active,
                                 std::span<const ArmSet> feasible) {
    auto& b = policy.bai;
    if (b.best && active[*b.best]) return lift_to_superarm(*b.best, feasible);

    if (b.running) {
        std::erase_if(b.candidates, [&](std::size_t a) { return !active[a]; });
        if (b.candidates.empty()) b.running = false;
    }
    if (!b.running) {
        restart_bai(policy, active);
        if (!b.running) return std::nullopt;
    }
    eliminate(policy);
    if (b.best) return lift_to_superarm(*b.best, feasible);
    return lift_to_superarm(least_sampled(policy, b.candidates), feasible);
}

}  // namespace bmt
