#include "bmt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bmt {

std::string_view to_string(EnvironmentKind kind) {
    switch (kind) {
    case EnvironmentKind::STANDARD_GAUSSIAN: return "standard_gaussian";
    case EnvironmentKind::CLIQUE_GRAPH: return "clique_graph";
    case EnvironmentKind::STREAMING: return "streaming";
    case EnvironmentKind::DRIFTING_NULL: return "drifting_null";
    }
    return "?";
}

std::string_view to_string(NoiseModel noise) {
    return noise == NoiseModel::INDEPENDENT ? "independent" : "shared_noise";
}

EnvironmentKind environment_kind_from_string(std::string_view name) {
    for (auto k : {EnvironmentKind::STANDARD_GAUSSIAN, EnvironmentKind::CLIQUE_GRAPH,
                   EnvironmentKind::STREAMING, EnvironmentKind::DRIFTING_NULL})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

NoiseModel noise_model_from_string(std::string_view name) {
    if (name == "independent") return NoiseModel::INDEPENDENT;
    if (name == "shared_noise") return NoiseModel::SHARED_NOISE;
    throw std::invalid_argument("unknown noise model '" + std::string(name) + "'");
}

std::string_view to_string(StopKind kind) {
    switch (kind) {
    case StopKind::FIXED_HORIZON: return "fixed_horizon";
    case StopKind::ALL_NONNULLS_ORACLE: return "all_nonnulls_oracle";
    case StopKind::REJECTION_COUNT: return "rejection_count";
    case StopKind::STREAMING_GAP: return "streaming_gap";
    }
    return "?";
}

StopKind stop_kind_from_string(std::string_view name) {
    for (auto k : {StopKind::FIXED_HORIZON, StopKind::ALL_NONNULLS_ORACLE, StopKind::REJECTION_COUNT,
                   StopKind::STREAMING_GAP})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown stopping rule '" + std::string(name) + "'");
}

std::string_view to_string(Retention r) { return r == Retention::ALL ? "all" : "single_uniform"; }

Retention retention_from_string(std::string_view name) {
    if (name == "all") return Retention::ALL;
    if (name == "single_uniform") return Retention::SINGLE_UNIFORM;
    throw std::invalid_argument("unknown retention '" + std::string(name) + "'");
}

Environment make_standard_environment(Eigen::VectorXd means, NoiseModel noise) {
    Environment env;
    env.kind = EnvironmentKind::STANDARD_GAUSSIAN;
    env.noise = noise;
    for (std::size_t i = 0; i < static_cast<std::size_t>(means.size()); ++i) env.superarms.push_back({i});
    env.means = std::move(means);
    return env;
}

Environment make_clique_environment(Eigen::VectorXd means, std::size_t cliques, NoiseModel noise) {
    const auto n = static_cast<std::size_t>(means.size());
    if (cliques == 0 || n == 0 || n % cliques != 0)
        throw std::invalid_argument("clique environment needs n to be a positive multiple of the clique count");
    Environment env;
    env.kind = EnvironmentKind::CLIQUE_GRAPH;
    env.noise = noise;
    for (std::size_t i = 0; i < cliques; ++i) {
        ArmSet s;
        for (std::size_t a = i; a < n; a += cliques) s.push_back(a);
        env.superarms.push_back(std::move(s));
    }
    env.means = std::move(means);
    return env;
}

Environment make_streaming_environment(Eigen::VectorXd means, NoiseModel noise) {
    Environment env;
    env.kind = EnvironmentKind::STREAMING;
    env.noise = noise;
    env.means = std::move(means);
    return env;
}

Environment make_drifting_null_environment(std::size_t n_arms) {
    Environment env = make_standard_environment(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_arms)));
    env.kind = EnvironmentKind::DRIFTING_NULL;
    return env;
}

RewardSource::RewardSource(const Environment& env, std::mt19937_64 rng)
    : env_(&env), rng_(std::move(rng)), drift_index_(env.n_arms(), 0) {}

void RewardSource::draw(const ArmSet& arms, std::vector<double>& out) {
    out.resize(arms.size());
    const bool shared = env_->noise == NoiseModel::SHARED_NOISE;
    const double z = shared ? normal_(rng_) : 0.0;
    for (std::size_t j = 0; j < arms.size(); ++j) {
        const auto a = arms[j];
        double mean = env_->means(static_cast<Eigen::Index>(a));
        if (env_->kind == EnvironmentKind::DRIFTING_NULL) mean = ++drift_index_[a] % 2 == 1 ? -1.0 : 1.0;
        const double noise = shared ? (z + normal_(rng_)) / std::numbers::sqrt2 : normal_(rng_);
        out[j] = mean + noise;
    }
}

std::size_t HypothesisConfig::h1_size() const {
    return static_cast<std::size_t>(std::count(non_null.begin(), non_null.end(), true));
}

HypothesisConfig standard_hypotheses(std::size_t k, std::size_t h1_count, double mu0) {
    if (h1_count > k) throw std::invalid_argument("more non-nulls than hypotheses");
    HypothesisConfig h;
    for (std::size_t i = 0; i < k; ++i) {
        h.arms.push_back({i});
        h.non_null.push_back(i >= k - h1_count);
    }
    h.mu0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), mu0);
    return h;
}

Eigen::VectorXd planted_means(std::size_t k, std::size_t h1_count, double mu1, double mu0) {
    Eigen::VectorXd m = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), mu0);
    for (std::size_t i = k - std::min(h1_count, k); i < k; ++i) m(static_cast<Eigen::Index>(i)) = mu1;
    return m;
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

FdpTpp compute_fdp_tpp(const RejectionSet& rejections, const std::vector<bool>& non_null) {
    std::size_t false_rej = 0;
    std::size_t true_rej = 0;
    for (auto i : rejections.ids) (non_null.at(i) ? true_rej : false_rej) += 1;
    const auto h1 = static_cast<std::size_t>(std::count(non_null.begin(), non_null.end(), true));
    const double fdp = static_cast<double>(false_rej) / static_cast<double>(std::max<std::size_t>(rejections.size(), 1));
    const double tpp = h1 == 0 ? 1.0 : static_cast<double>(true_rej) / static_cast<double>(h1);
    return {fdp, tpp};
}

void validate(const TrialConfig& c) {
    const std::size_t n = c.env.n_arms();
    const std::size_t k = c.hypotheses.k();
    if (n == 0) throw std::invalid_argument("environment has no arms");
    if (k == 0) throw std::invalid_argument("no hypotheses");
    if (static_cast<std::size_t>(c.hypotheses.mu0.size()) != k || c.hypotheses.non_null.size() != k)
        throw std::invalid_argument("hypothesis fields disagree on k");
    for (const auto& arms : c.hypotheses.arms) {
        if (arms.empty()) throw std::invalid_argument("hypothesis without arms");
        for (auto a : arms)
            if (a >= n) throw std::invalid_argument("hypothesis references a missing arm");
    }
    for (const auto& s : c.env.superarms) {
        if (s.empty()) throw std::invalid_argument("empty superarm");
        for (auto a : s)
            if (a >= n) throw std::invalid_argument("superarm references a missing arm");
    }
    if (c.env.kind != EnvironmentKind::STREAMING && c.env.superarms.empty())
        throw std::invalid_argument("environment has no feasible superarms");
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (c.dag && c.dag->size() != k) throw std::invalid_argument("DAG size differs from k");
}

namespace {

bool stop_now(const StoppingRule& rule, std::uint64_t t, std::uint64_t last_rejection_round,
              const RejectionSet& r, const HypothesisConfig& h) {
    switch (rule.kind) {
    case StopKind::FIXED_HORIZON: return t >= rule.max_rounds;
    case StopKind::ALL_NONNULLS_ORACLE: {
        if (t >= rule.max_rounds) return true;
        for (std::size_t i = 0; i < h.k(); ++i)
            if (h.non_null[i] && !r.contains(i)) return false;
        return true;
    }
    case StopKind::REJECTION_COUNT: return t >= rule.max_rounds || r.size() >= rule.count;
    case StopKind::STREAMING_GAP: return t >= rule.max_rounds || t - last_rejection_round > rule.gap;
    }
    return true;
}

TrialResult run_loop(const TrialConfig& c, std::uint64_t seed, bool full_feedback,
                     const std::optional<Eigen::VectorXd>& initial_log_e) {
    validate(c);
    const std::size_t n = c.env.n_arms();
    const std::size_t k = c.hypotheses.k();
    const TestMode mode = mode_of(c.evidence.kind);

    TrialResult out;
    out.seed = seed;
    out.level = corrected_level_detail(c.delta, c.setting, mode, k);
    out.pulls = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(n));

    std::vector<Evidence> evidence;
    evidence.reserve(k);
    Eigen::VectorXd logs(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        evidence.push_back(make_evidence(c.evidence, c.hypotheses.mu0(static_cast<Eigen::Index>(i))));
        if (initial_log_e) {
            auto* e = std::get_if<EProcessState>(&evidence.back());
            if (!e) throw std::invalid_argument("initial evidence requires an e-process");
            e->log_offset = (*initial_log_e)(static_cast<Eigen::Index>(i));
            e->log_e = compute_log_e(*e);
        }
        logs(static_cast<Eigen::Index>(i)) = evidence_log_value(evidence.back());
    }

    std::vector<std::vector<std::size_t>> arm_to_hyp(n);
    for (std::size_t i = 0; i < k; ++i)
        for (auto a : c.hypotheses.arms[i]) arm_to_hyp[a].push_back(i);

    PolicyState policy = make_policy(c.policy, n, Boundary{BoundaryKind::PHIJJ}, std::min(c.delta, 0.1), 0);
    policy.rng = trial_stream(seed, 1);
    RewardSource rewards(c.env, trial_stream(seed, 0));
    std::mt19937_64 retention_rng = trial_stream(seed, 2);

    auto rejection_step = [&]() {
        return c.dag ? largest_constrained_self_consistent(logs, out.level.level, mode, *c.dag)
                     : step_up_log(logs, out.level.level, mode);
    };

    RejectionSet current;
    current.level = out.level.level;
    current.procedure = c.dag ? (mode == TestMode::P ? Procedure::CONSTRAINED_P : Procedure::CONSTRAINED_E)
                              : (mode == TestMode::P ? Procedure::BH : Procedure::EBH);
    out.trajectory.push_back({0, current});

    std::vector<bool> rejected(k, false);
    std::vector<bool> active(n, false);
    auto refresh_masks = [&]() {
        std::fill(rejected.begin(), rejected.end(), false);
        for (auto i : current.ids) rejected[i] = true;
        std::fill(active.begin(), active.end(), false);
        for (std::size_t i = 0; i < k; ++i)
            if (!rejected[i])
                for (auto a : c.hypotheses.arms[i]) active[a] = true;
    };
    refresh_masks();

    std::uint64_t t = 0;
    std::uint64_t last_rejection = 0;
    std::vector<double> drawn;
    Eigen::VectorXd strengths(static_cast<Eigen::Index>(k));

    while (current.size() < k && !stop_now(c.stop, t, last_rejection, current, c.hypotheses)) {
        ++t;
        std::optional<ArmSet> chosen;
        if (full_feedback) {
            ArmSet all;
            for (std::size_t a = 0; a < n; ++a)
                if (active[a]) all.push_back(a);
            if (!all.empty()) chosen = std::move(all);
        } else {
            switch (c.policy) {
            case PolicyKind::UNIFORM: chosen = select_uniform(policy, c.env.superarms); break;
            case PolicyKind::UCB: chosen = select_ucb(policy, active, c.env.superarms); break;
            case PolicyKind::BAI_REDUCTION: chosen = select_bai(policy, active, c.env.superarms); break;
            case PolicyKind::BEST_EVIDENCE:
                for (std::size_t i = 0; i < k; ++i)
                    strengths(static_cast<Eigen::Index>(i)) = strength(logs(static_cast<Eigen::Index>(i)), mode);
                chosen = select_best_evidence(policy, strengths, rejected, c.hypotheses.arms, t,
                                              c.env.superarms);
                break;
            }
        }
        if (!chosen) {
            --t;
            break;
        }

        rewards.draw(*chosen, drawn);
        for (auto a : *chosen) out.pulls(static_cast<Eigen::Index>(a)) += 1;

        std::size_t first = 0;
        std::size_t last = chosen->size();
        if (c.retention == Retention::SINGLE_UNIFORM && chosen->size() > 1) {
            std::uniform_int_distribution<std::size_t> pick(0, chosen->size() - 1);
            first = pick(retention_rng);
            last = first + 1;
        }
        for (std::size_t j = first; j < last; ++j) {
            const auto a = (*chosen)[j];
            const double x = drawn[j];
            observe(policy, a, x);
            for (auto h : arm_to_hyp[a]) {
                if (rejected[h]) continue;
                evidence[h] = evidence_update(std::move(evidence[h]), x);
                logs(static_cast<Eigen::Index>(h)) = evidence_log_value(evidence[h]);
            }
        }

        RejectionSet next = rejection_step();
        if (next.ids != current.ids) {
            if (next.size() > current.size()) last_rejection = t;
            current = std::move(next);
            out.trajectory.push_back({t, current});
            refresh_masks();
        }
        if (c.snapshot_stride > 0 && t % c.snapshot_stride == 0) out.snapshots.push_back({t, logs});
    }

    out.stop_round = t;
    out.all_rejected = current.size() == k;
    out.rejections = current;
    out.final_log_values = logs;
    const auto ft = compute_fdp_tpp(current, c.hypotheses.non_null);
    out.fdp = ft.fdp;
    out.tpp = ft.tpp;
    return out;
}

}  // namespace

TrialResult run_trial(const TrialConfig& config, std::uint64_t seed) {
    return run_loop(config, seed, config.env.kind == EnvironmentKind::STREAMING, std::nullopt);
}

TrialResult run_streaming(TrialConfig config, std::uint64_t t_gap, std::uint64_t t_max, std::uint64_t seed,
                          const std::optional<Eigen::VectorXd>& initial_log_e) {
    config.stop = StoppingRule::streaming(t_gap, t_max);
    if (initial_log_e && static_cast<std::size_t>(initial_log_e->size()) != config.hypotheses.k())
        throw std::invalid_argument("initial evidence size differs from k");
    return run_loop(config, seed, true, initial_log_e);
}

}  // namespace bmt
