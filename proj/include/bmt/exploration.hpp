#pragma once

// Exploration policies S_t. A policy sees only the rewards it has been fed
// through `observe` and its own rng, so selections are predictable.
//
// Arms are 0-based. `active` masks mark arms that still have an unrejected
// hypothesis attached; in the standard setting this is [k] \ R_{t-1}.

#include "bmt/boundary.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace bmt {

using ArmSet = std::vector<std::size_t>;

enum class PolicyKind { UNIFORM, UCB, BEST_EVIDENCE, BAI_REDUCTION };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view name);

/// Successive elimination over the arms alive at the last restart.
struct BaiState {
    bool running = false;
    std::vector<std::size_t> candidates;
    std::size_t restart_size = 0;  ///< |B| at the last restart
    std::optional<std::size_t> best;
    std::size_t restarts = 0;
};

struct PolicyState {
    PolicyKind kind = PolicyKind::UNIFORM;
    Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1> counts;
    Eigen::VectorXd sums;
    Boundary boundary{};
    double delta = 0.05;
    std::mt19937_64 rng;
    BaiState bai;

    std::size_t n_arms() const { return static_cast<std::size_t>(counts.size()); }
    double mean(std::size_t arm) const;
};

PolicyState make_policy(PolicyKind kind, std::size_t n_arms, Boundary boundary, double delta,
                        std::uint64_t seed);

/// Records one reward for `arm`.
void observe(PolicyState& policy, std::size_t arm, double reward);

/// Smallest-id feasible superarm containing `arm`, or {arm} if `feasible` is empty.
ArmSet lift_to_superarm(std::size_t arm, std::span<const ArmSet> feasible);

/// Uniform draw over all feasible superarms. Throws std::invalid_argument if empty.
ArmSet select_uniform(PolicyState& policy, std::span<const ArmSet> feasible);

/// argmax over active arms of mu_hat_i + phi(T_i, delta); unsampled arms first,
/// smallest id on ties. nullopt when no arm is active.
std::optional<ArmSet> select_ucb(PolicyState& policy, const std::vector<bool>& active,
                                 std::span<const ArmSet> feasible = {});

/// Round-robin over hypotheses for t <= k (1-based round), then the unrejected
/// hypothesis with the smallest strength (log p, or -log e). Within a
/// multi-arm hypothesis the least-sampled arm is chosen.
std::optional<ArmSet> select_best_evidence(PolicyState& policy,
                                           const Eigen::VectorXd& strengths,
                                           const std::vector<bool>& rejected,
                                           std::span<const ArmSet> hypothesis_arms,
                                           std::uint64_t round,
                                           std::span<const ArmSet> feasible = {});

/// Cached best arm while it is alive; otherwise successive elimination on the
/// active arms with PHI0 radii at per-arm level delta / (2 |B|).
std::optional<ArmSet> select_bai(PolicyState& policy, const std::vector<bool>& active,
                                 std::span<const ArmSet> feasible = {});

}  // namespace bmt
