#pragma once

// The sequential testing loop: select a superarm, draw rewards, update the
// evidence of every unrejected hypothesis touching a queried arm, recompute the
// rejection set, and check the stopping rule.

#include "bmt/correction.hpp"
#include "bmt/dag.hpp"
#include "bmt/evidence.hpp"
#include "bmt/exploration.hpp"
#include "bmt/multiple_testing.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace bmt {

enum class EnvironmentKind { STANDARD_GAUSSIAN, CLIQUE_GRAPH, STREAMING, DRIFTING_NULL };
enum class NoiseModel { INDEPENDENT, SHARED_NOISE };

std::string_view to_string(EnvironmentKind kind);
std::string_view to_string(NoiseModel noise);
EnvironmentKind environment_kind_from_string(std::string_view name);
NoiseModel noise_model_from_string(std::string_view name);

struct Environment {
    EnvironmentKind kind = EnvironmentKind::STANDARD_GAUSSIAN;
    Eigen::VectorXd means;
    /// Feasible superarms. Empty for STREAMING, where any subset is allowed.
    std::vector<ArmSet> superarms;
    NoiseModel noise = NoiseModel::INDEPENDENT;

    std::size_t n_arms() const { return static_cast<std::size_t>(means.size()); }
};

/// Singletons {0}, ..., {n-1}.
Environment make_standard_environment(Eigen::VectorXd means, NoiseModel noise = NoiseModel::INDEPENDENT);
/// Cliques {i, i + c, i + 2c, ...} for i < c. Requires n % c == 0.
Environment make_clique_environment(Eigen::VectorXd means, std::size_t cliques = 10,
                                    NoiseModel noise = NoiseModel::INDEPENDENT);
Environment make_streaming_environment(Eigen::VectorXd means, NoiseModel noise = NoiseModel::INDEPENDENT);
/// All-null arms whose conditional mean alternates -1, +1 over each arm's own
/// sample index, plus unit Gaussian noise.
Environment make_drifting_null_environment(std::size_t n_arms);

/// Draws unit-variance Gaussian rewards. SHARED_NOISE uses
/// X_i = mu_i + (Z + zeta_i) / sqrt(2) with one Z per call.
class RewardSource {
public:
    RewardSource(const Environment& env, std::mt19937_64 rng);
    /// Rewards for `arms`, in the same order.
    void draw(const ArmSet& arms, std::vector<double>& out);

private:
    const Environment* env_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<std::uint64_t> drift_index_;
};

struct HypothesisConfig {
    /// Arms each hypothesis concerns. A multi-arm hypothesis is the
    /// intersection null "every listed arm has mean <= mu0" and is fed every
    /// reward from its arms.
    std::vector<ArmSet> arms;
    Eigen::VectorXd mu0;
    std::vector<bool> non_null;  ///< simulation ground truth

    std::size_t k() const { return arms.size(); }
    std::size_t h1_size() const;
};

/// Identity mapping over k arms; the last `h1_count` ids are non-null.
HypothesisConfig standard_hypotheses(std::size_t k, std::size_t h1_count, double mu0 = 0.0);

/// Means vector with mu1 on the last `h1_count` arms and mu0 elsewhere.
Eigen::VectorXd planted_means(std::size_t k, std::size_t h1_count, double mu1, double mu0 = 0.0);

enum class StopKind { FIXED_HORIZON, ALL_NONNULLS_ORACLE, REJECTION_COUNT, STREAMING_GAP };

std::string_view to_string(StopKind kind);
StopKind stop_kind_from_string(std::string_view name);

struct StoppingRule {
    StopKind kind = StopKind::FIXED_HORIZON;
    std::uint64_t max_rounds = 1000;  ///< horizon, cap, or t_max
    std::size_t count = 1;            ///< REJECTION_COUNT target
    std::uint64_t gap = 0;            ///< STREAMING_GAP t_gap

    static StoppingRule fixed(std::uint64_t horizon) { return {StopKind::FIXED_HORIZON, horizon, 1, 0}; }
    static StoppingRule oracle(std::uint64_t cap) { return {StopKind::ALL_NONNULLS_ORACLE, cap, 1, 0}; }
    static StoppingRule rejections(std::size_t m, std::uint64_t cap) {
        return {StopKind::REJECTION_COUNT, cap, m, 0};
    }
    static StoppingRule streaming(std::uint64_t t_gap, std::uint64_t t_max) {
        return {StopKind::STREAMING_GAP, t_max, 1, t_gap};
    }
};

/// What is kept from a superarm pull. SINGLE_UNIFORM saves one uniformly
/// chosen arm's reward and discards the rest.
enum class Retention { ALL, SINGLE_UNIFORM };

std::string_view to_string(Retention r);
Retention retention_from_string(std::string_view name);

struct TrialConfig {
    Environment env;
    HypothesisConfig hypotheses;
    PolicyKind policy = PolicyKind::UCB;
    EvidenceConfig evidence{};
    DependenceSetting setting{};
    double delta = 0.05;
    Retention retention = Retention::ALL;
    StoppingRule stop{};
    /// Evidence snapshots every `snapshot_stride` rounds; 0 disables them.
    std::uint64_t snapshot_stride = 1;
    std::optional<DagConstraint> dag;
};

struct RoundRejections {
    std::uint64_t round;
    RejectionSet set;
};

struct EvidenceSnapshot {
    std::uint64_t round;
    Eigen::VectorXd log_values;
};

struct TrialResult {
    std::uint64_t seed = 0;
    std::uint64_t stop_round = 0;
    RejectionSet rejections;
    /// (round, R_t) at round 0 and every round where R_t changed.
    std::vector<RoundRejections> trajectory;
    std::vector<EvidenceSnapshot> snapshots;
    Eigen::VectorXd final_log_values;
    double fdp = 0.0;
    double tpp = 0.0;
    CorrectedLevel level{0.0, ""};
    Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1> pulls;
    bool all_rejected = false;
};

/// Checks dimensions and ranges; throws std::invalid_argument.
void validate(const TrialConfig& config);

TrialResult run_trial(const TrialConfig& config, std::uint64_t seed);

/// Full-feedback monitor: every round queries all unrejected arms and stops
/// once more than t_gap rounds pass without a new rejection, R = [k], or
/// t = t_max. `initial_log_e` pre-seeds e-processes (E mode only).
TrialResult run_streaming(TrialConfig config, std::uint64_t t_gap, std::uint64_t t_max,
                          std::uint64_t seed,
                          const std::optional<Eigen::VectorXd>& initial_log_e = std::nullopt);

struct FdpTpp {
    double fdp;
    double tpp;
};

/// tpp is 1 when there are no non-nulls.
FdpTpp compute_fdp_tpp(const RejectionSet& rejections, const std::vector<bool>& non_null);

/// Independent generator for stream `stream` of trial `seed`.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint32_t stream);

}  // namespace bmt
