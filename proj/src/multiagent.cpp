#include "bmt/multiagent.hpp"

#include "bmt/log_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bmt {

AgentPool::AgentPool(std::size_t k)
    : log_aggregate_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))), members_(k), rejected_(k, false) {
    if (k == 0) throw std::invalid_argument("agent pool needs at least one hypothesis");
    rejections_.procedure = Procedure::EBH;
}

void AgentPool::register_agent(std::size_t hypothesis, std::size_t agent, std::uint64_t round) {
    if (hypothesis >= k()) throw std::invalid_argument("register_agent: hypothesis out of range");
    auto& m = members_[hypothesis];
    if (m.contains(agent)) throw std::invalid_argument("register_agent: agent already registered");
    m.emplace(agent, Member{round, log_aggregate_(static_cast<Eigen::Index>(hypothesis))});
}

bool AgentPool::is_registered(std::size_t hypothesis, std::size_t agent) const {
    return hypothesis < k() && members_[hypothesis].contains(agent);
}

double AgentPool::log_snapshot(std::size_t hypothesis, std::size_t agent) const {
    return members_.at(hypothesis).at(agent).log_snapshot;
}

std::uint64_t AgentPool::arrival_round(std::size_t hypothesis, std::size_t agent) const {
    return members_.at(hypothesis).at(agent).arrival;
}

const RejectionSet& AgentPool::aggregate_step(std::uint64_t round, std::vector<AgentReport> reports, double delta) {
    std::sort(reports.begin(), reports.end(), [](const AgentReport& a, const AgentReport& b) {
        return std::pair(a.hypothesis, a.agent) < std::pair(b.hypothesis, b.agent);
    });
    for (const auto& r : reports) {
        if (!is_registered(r.hypothesis, r.agent))
            throw std::invalid_argument("aggregate_step: report from an unregistered agent");
        if (members_[r.hypothesis].at(r.agent).arrival > round)
            throw std::invalid_argument("aggregate_step: report before the agent's arrival");
    }
    for (const auto& r : reports) {
        if (rejected_[r.hypothesis]) continue;
        members_[r.hypothesis].at(r.agent).log_e = r.log_e;
    }

    Eigen::VectorXd terms;
    for (std::size_t i = 0; i < k(); ++i) {
        const auto& m = members_[i];
        if (rejected_[i] || m.empty()) continue;
        terms.resize(static_cast<Eigen::Index>(m.size()));
        Eigen::Index j = 0;
        for (const auto& [id, member] : m) terms(j++) = member.log_snapshot + member.log_e;
        log_aggregate_(static_cast<Eigen::Index>(i)) =
            log_sum_exp(terms.array()) - std::log(static_cast<double>(m.size()));
    }

    rejections_ = ebh_log(log_aggregate_, delta);
    for (auto i : rejections_.ids) rejected_[i] = true;
    return rejections_;
}

std::string_view to_string(Coupling c) { return c == Coupling::SHARED ? "shared" : "independent"; }

Coupling coupling_from_string(std::string_view name) {
    if (name == "shared") return Coupling::SHARED;
    if (name == "independent") return Coupling::INDEPENDENT;
    throw std::invalid_argument("unknown coupling '" + std::string(name) + "'");
}

MultiAgentResult run_multiagent(const MultiAgentConfig& c, std::uint64_t seed) {
    const std::size_t k = c.hypotheses.k();
    const std::size_t n = c.env.n_arms();
    if (c.agents.empty()) throw std::invalid_argument("multi-agent run needs at least one agent");
    for (const auto& a : c.agents) {
        if (mode_of(a.evidence.kind) != TestMode::E)
            throw std::invalid_argument("agents must run e-processes");
        if (a.arrival_round == 0) throw std::invalid_argument("arrival rounds start at 1");
    }
    TrialConfig check;
    check.env = c.env;
    check.hypotheses = c.hypotheses;
    check.delta = c.delta;
    validate(check);

    AgentPool pool(k);
    std::vector<std::vector<Evidence>> evidence(c.agents.size());
    for (std::size_t l = 0; l < c.agents.size(); ++l)
        for (std::size_t i = 0; i < k; ++i)
            evidence[l].push_back(make_evidence(c.agents[l].evidence, c.hypotheses.mu0(static_cast<Eigen::Index>(i))));

    // Stream 0 feeds the shared source; agent l owns stream 3 + l.
    std::vector<RewardSource> sources;
    sources.emplace_back(c.env, trial_stream(seed, 0));
    if (c.coupling == Coupling::INDEPENDENT)
        for (std::size_t l = 0; l < c.agents.size(); ++l)
            sources.emplace_back(c.env, trial_stream(seed, static_cast<std::uint32_t>(3 + l)));

    MultiAgentResult out;
    out.seed = seed;
    out.sup_log_aggregate = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    out.trajectory.push_back({0, pool.rejections()});

    std::vector<bool> rejected(k, false);
    std::vector<double> drawn;
    std::vector<double> shared_rewards(n);
    auto found_all = [&]() {
        for (std::size_t i = 0; i < k; ++i)
            if (c.hypotheses.non_null[i] && !rejected[i]) return false;
        return true;
    };
    std::uint64_t t = 0;
    while (t < c.horizon && pool.rejections().size() < k && !(c.oracle_stop && found_all())) {
        ++t;
        ArmSet arms;
        for (std::size_t i = 0; i < k; ++i)
            if (!rejected[i])
                for (auto a : c.hypotheses.arms[i])
                    if (std::find(arms.begin(), arms.end(), a) == arms.end()) arms.push_back(a);
        std::sort(arms.begin(), arms.end());

        for (std::size_t l = 0; l < c.agents.size(); ++l)
            if (c.agents[l].arrival_round == t)
                for (std::size_t i = 0; i < k; ++i) pool.register_agent(i, l, t);

        if (c.coupling == Coupling::SHARED) {
            sources[0].draw(arms, drawn);
            for (std::size_t j = 0; j < arms.size(); ++j) shared_rewards[arms[j]] = drawn[j];
        }

        std::vector<AgentReport> reports;
        for (std::size_t l = 0; l < c.agents.size(); ++l) {
            if (c.agents[l].arrival_round > t) continue;
            if (c.coupling == Coupling::INDEPENDENT) {
                sources[1 + l].draw(arms, drawn);
                for (std::size_t j = 0; j < arms.size(); ++j) shared_rewards[arms[j]] = drawn[j];
            }
            for (std::size_t i = 0; i < k; ++i) {
                if (rejected[i]) continue;
                for (auto a : c.hypotheses.arms[i])
                    evidence[l][i] = evidence_update(std::move(evidence[l][i]), shared_rewards[a]);
                reports.push_back({i, l, evidence_log_value(evidence[l][i])});
            }
        }

        const RejectionSet before = pool.rejections();
        const auto& now = pool.aggregate_step(t, std::move(reports), c.delta);
        out.sup_log_aggregate = out.sup_log_aggregate.cwiseMax(pool.log_aggregate());
        if (now.ids != before.ids) {
            out.trajectory.push_back({t, now});
            for (auto i : now.ids) rejected[i] = true;
        }
    }

    out.stop_round = t;
    out.rejections = pool.rejections();
    out.final_log_aggregate = pool.log_aggregate();
    const auto ft = compute_fdp_tpp(out.rejections, c.hypotheses.non_null);
    out.fdp = ft.fdp;
    out.tpp = ft.tpp;
    return out;
}

}  // namespace bmt
