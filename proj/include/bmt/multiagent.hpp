#pragma once

// Evidence pooling across agents that join a bandit at different rounds.
//
// When agent l joins hypothesis i at round s, it is handed the pooled value
// e_{i,s-1} as its starting wealth. The pooled value is then the average over
// joined agents of (starting wealth) * (agent's own e-process):
//
//   e_{i,t} = (1 / |A_{i,t}|) * sum_l e_{i, s_l - 1} * e^{(l)}_{i,t}.
//
// Everything is stored in log space.

#include "bmt/engine.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace bmt {

struct AgentReport {
    std::size_t hypothesis;
    std::size_t agent;
    double log_e;
};

class AgentPool {
public:
    explicit AgentPool(std::size_t k);

    std::size_t k() const { return static_cast<std::size_t>(log_aggregate_.size()); }

    /// Records agent `agent` joining `hypothesis` at `round`, capturing the
    /// current pooled value as its start snapshot. Registering twice throws.
    void register_agent(std::size_t hypothesis, std::size_t agent, std::uint64_t round);

    bool is_registered(std::size_t hypothesis, std::size_t agent) const;

    /// Applies one round of reports (sorted by hypothesis, then agent), updates
    /// the pooled values of unrejected hypotheses and runs e-BH at `delta`.
    /// Throws std::invalid_argument on a report from an unregistered agent.
    const RejectionSet& aggregate_step(std::uint64_t round, std::vector<AgentReport> reports, double delta);

    const Eigen::VectorXd& log_aggregate() const { return log_aggregate_; }
    const RejectionSet& rejections() const { return rejections_; }
    /// log e_{i, s_l - 1} for a registered agent.
    double log_snapshot(std::size_t hypothesis, std::size_t agent) const;
    std::uint64_t arrival_round(std::size_t hypothesis, std::size_t agent) const;
    std::size_t active_agents(std::size_t hypothesis) const { return members_[hypothesis].size(); }

private:
    struct Member {
        std::uint64_t arrival;
        double log_snapshot;
        double log_e = 0.0;
    };

    Eigen::VectorXd log_aggregate_;
    std::vector<std::map<std::size_t, Member>> members_;
    std::vector<bool> rejected_;
    RejectionSet rejections_;
};

enum class Coupling { SHARED, INDEPENDENT };

std::string_view to_string(Coupling c);
Coupling coupling_from_string(std::string_view name);

struct AgentSpec {
    std::uint64_t arrival_round = 1;
    EvidenceConfig evidence{};
};

struct MultiAgentConfig {
    Environment env;
    HypothesisConfig hypotheses;
    std::vector<AgentSpec> agents;
    /// SHARED: every agent sees the same reward for an arm in a round.
    /// INDEPENDENT: each agent draws its own.
    Coupling coupling = Coupling::SHARED;
    double delta = 0.05;
    std::uint64_t horizon = 1000;
    /// Also stop once every non-null hypothesis is rejected.
    bool oracle_stop = false;
};

struct MultiAgentResult {
    std::uint64_t seed = 0;
    std::uint64_t stop_round = 0;
    RejectionSet rejections;
    std::vector<RoundRejections> trajectory;
    Eigen::VectorXd sup_log_aggregate;  ///< running sup over rounds, per hypothesis
    Eigen::VectorXd final_log_aggregate;
    double fdp = 0.0;
    double tpp = 0.0;
};

/// Every joined agent samples each arm of every unrejected hypothesis each
/// round; agents need e-process evidence.
MultiAgentResult run_multiagent(const MultiAgentConfig& config, std::uint64_t seed);

}  // namespace bmt
