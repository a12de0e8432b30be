#include "bmt/harness.hpp"
#include "bmt/parallel.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <type_traits>
#include <limits>
#include <stdexcept>

namespace bmt {

ValidityCheck band_check(std::string name, const std::vector<double>& per_trial, double bound) {
    ValidityCheck c;
    c.name = std::move(name);
    double s = 0.0;
    for (double x : per_trial) s += x;
    c.estimate = per_trial.empty() ? 0.0 : s / static_cast<double>(per_trial.size());
    c.bound = bound;
    c.se = standard_error(per_trial);
    c.pass = c.estimate <= c.bound + 3.0 * c.se;
    return c;
}

ValiditySpec parse_validity_spec(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("validity spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("validity spec: expected an object");
    ValiditySpec s;
    for (const auto& [key, v] : j.items()) {
        auto count = [&](auto& field) {
            if (!v.is_number_unsigned())
                throw std::invalid_argument("validity spec $." + key + ": expected a non-negative integer");
            field = v.get<std::remove_reference_t<decltype(field)>>();
        };
        if (key == "replications") count(s.replications);
        else if (key == "steps") count(s.steps);
        else if (key == "seed") count(s.seed);
        else if (key == "workers") count(s.workers);
        else if (key == "k") count(s.k);
        else if (key == "fdr_horizon") count(s.fdr_horizon);
        else if (key == "delta") {
            if (!v.is_number()) throw std::invalid_argument("validity spec $.delta: expected a number");
            s.delta = v.get<double>();
        } else {
            throw std::invalid_argument("validity spec $." + key + ": unknown key");
        }
    }
    if (s.replications == 0) throw std::invalid_argument("validity spec: replications must be positive");
    if (!(s.delta > 0.0 && s.delta < 1.0)) throw std::invalid_argument("validity spec: delta must lie in (0, 1)");
    return s;
}

ValidityCheck ville_check(std::string name, const EvidenceConfig& evidence, NullStream stream,
                          const ValiditySpec& spec, double alpha) {
    if (mode_of(evidence.kind) != TestMode::E) throw std::invalid_argument("ville_check needs an e-process");
    const Environment env = stream == NullStream::IID ? make_standard_environment(Eigen::VectorXd::Zero(1))
                                                      : make_drifting_null_environment(1);
    const double log_level = std::log(1.0 / alpha);
    std::vector<double> crossed(spec.replications, 0.0);
    parallel_for(spec.replications, spec.workers, [&](std::size_t r) {
        RewardSource source(env, trial_stream(spec.seed + 1 + r, 0));
        Evidence ev = make_evidence(evidence, 0.0);
        const ArmSet arm{0};
        std::vector<double> x;
        for (std::uint64_t t = 0; t < spec.steps; ++t) {
            source.draw(arm, x);
            ev = evidence_update(std::move(ev), x[0]);
            if (evidence_log_value(ev) >= log_level) {
                crossed[r] = 1.0;
                return;
            }
        }
    });
    return band_check(std::move(name), crossed, alpha);
}

std::vector<ValidityCheck> superuniformity_check(BoundaryKind boundary, const std::vector<double>& alphas,
                                                 const ValiditySpec& spec) {
    if (alphas.empty()) return {};
    double smallest = alphas.front();
    for (double a : alphas) smallest = std::min(smallest, a);
    const Environment env = make_standard_environment(Eigen::VectorXd::Zero(1));
    std::vector<double> inf_p(spec.replications, 1.0);
    parallel_for(spec.replications, spec.workers, [&](std::size_t r) {
        RewardSource source(env, trial_stream(spec.seed + 1 + r, 0));
        PProcessState p = make_boundary_p_process(Boundary{boundary}, 0.0);
        const ArmSet arm{0};
        std::vector<double> x;
        for (std::uint64_t t = 0; t < spec.steps; ++t) {
            source.draw(arm, x);
            p = p_update(std::move(p), x[0]);
            if (p.running_inf_p() <= smallest) break;
        }
        inf_p[r] = p.running_inf_p();
    });
    std::vector<ValidityCheck> out;
    for (double a : alphas) {
        std::vector<double> hit(inf_p.size());
        for (std::size_t r = 0; r < inf_p.size(); ++r) hit[r] = inf_p[r] <= a ? 1.0 : 0.0;
        char label[64];
        std::snprintf(label, sizeof label, "superuniform %s alpha=%g", std::string(to_string(boundary)).c_str(), a);
        out.push_back(band_check(label, hit, a));
    }
    return out;
}

ValidityCheck fdr_check(std::string name, const TrialConfig& trial, const ValiditySpec& spec) {
    TrialConfig t = trial;
    t.snapshot_stride = 0;
    validate(t);
    std::vector<double> fdp(spec.replications, 0.0);
    parallel_for(spec.replications, spec.workers,
                 [&](std::size_t r) { fdp[r] = run_trial(t, spec.seed + 1 + r).fdp; });
    return band_check(std::move(name), fdp, t.delta);
}

ValidityCheck multiagent_check(std::string name, const MultiAgentConfig& config, const ValiditySpec& spec,
                               double alpha) {
    const double log_level = std::log(1.0 / alpha);
    std::vector<double> crossed(spec.replications, 0.0);
    parallel_for(spec.replications, spec.workers, [&](std::size_t r) {
        const auto res = run_multiagent(config, spec.seed + 1 + r);
        crossed[r] = res.sup_log_aggregate.maxCoeff() >= log_level ? 1.0 : 0.0;
    });
    return band_check(std::move(name), crossed, alpha);
}

ValidityCheck adversarial_pmh_check() {
    EProcessState s = make_pmh(LambdaStrategy::fixed(0.0), 0.0);
    for (std::uint64_t t = 1; t <= 10; ++t) {
        const bool odd = t % 2 == 1;
        s = pmh_update(std::move(s), odd ? -1.0 : 1.0, odd ? 0.0 : 1.0);
    }
    ValidityCheck c;
    c.name = "adversarial PMH E_10 == exp(5)";
    c.estimate = std::exp(s.log_e);
    c.bound = std::exp(5.0);
    c.se = 0.0;
    c.pass = std::abs(c.estimate - c.bound) <= 1e-9 * c.bound;
    return c;
}

std::vector<FdrCell> table1_cells(std::size_t k, std::size_t h1, double delta, std::uint64_t horizon) {
    const Eigen::VectorXd means = planted_means(k, h1, 0.5);
    const EvidenceConfig p_jj{EvidenceKind::P_BOUNDARY, {}, {BoundaryKind::PHIJJ}};
    const EvidenceConfig pmh{EvidenceKind::E_PMH, LambdaStrategy::default_wsr(delta), {}};

    std::vector<FdrCell> cells;
    for (auto adaptivity : {Adaptivity::NON_ADAPTIVE, Adaptivity::ADAPTIVE}) {
        for (auto dependence : {Dependence::INDEPENDENT, Dependence::ARBITRARY}) {
            TrialConfig t;
            t.env = dependence == Dependence::INDEPENDENT
                        ? make_standard_environment(means)
                        : make_clique_environment(means, 10, NoiseModel::SHARED_NOISE);
            t.hypotheses = standard_hypotheses(k, h1);
            t.delta = delta;
            t.setting = {adaptivity, dependence, OutputKind::STEP_UP, false};
            t.snapshot_stride = 0;
            if (adaptivity == Adaptivity::NON_ADAPTIVE) {
                t.policy = PolicyKind::UNIFORM;
                t.stop = StoppingRule::fixed(horizon);
            } else {
                t.policy = dependence == Dependence::INDEPENDENT ? PolicyKind::UCB : PolicyKind::BEST_EVIDENCE;
                t.stop = StoppingRule::rejections(h1 + 1, horizon);
            }
            const std::string base = std::string(to_string(adaptivity)) + "/" + std::string(to_string(dependence)) +
                                     " |H1|=" + std::to_string(h1);
            t.evidence = p_jj;
            cells.push_back({base + " bh", t});
            t.evidence = pmh;
            cells.push_back({base + " ebh", t});
        }
    }
    return cells;
}

std::vector<ValidityCheck> validity_suite(const ValiditySpec& spec) {
    std::vector<ValidityCheck> out;
    const double alpha = spec.delta;
    const EvidenceConfig dm{EvidenceKind::E_DM, {}, {}};
    const EvidenceConfig wsr{EvidenceKind::E_PMH, LambdaStrategy::default_wsr(alpha), {}};
    const EvidenceConfig betting{EvidenceKind::E_PMH, LambdaStrategy::betting_half_mean(), {}};

    out.push_back(ville_check("ville dm", dm, NullStream::IID, spec, alpha));
    out.push_back(ville_check("ville pmh default_wsr", wsr, NullStream::IID, spec, alpha));
    out.push_back(ville_check("ville pmh betting_half_mean", betting, NullStream::IID, spec, alpha));
    out.push_back(ville_check("ville dm drifting null", dm, NullStream::DRIFTING, spec, alpha));
    out.push_back(adversarial_pmh_check());

    for (auto b : {BoundaryKind::PHIJJ, BoundaryKind::PHIIS})
        for (auto& c : superuniformity_check(b, {0.01, 0.05, 0.1}, spec)) out.push_back(std::move(c));

    for (std::size_t h1 : {std::size_t{0}, std::size_t{2}})
        for (const auto& cell : table1_cells(spec.k, h1, spec.delta, spec.fdr_horizon))
            out.push_back(fdr_check("fdr " + cell.name, cell.trial, spec));

    for (auto coupling : {Coupling::SHARED, Coupling::INDEPENDENT}) {
        MultiAgentConfig m;
        m.env = make_standard_environment(Eigen::VectorXd::Zero(1));
        m.hypotheses = standard_hypotheses(1, 0);
        m.agents = {{1, wsr}, {spec.fdr_horizon / 10 + 1, dm}};
        m.coupling = coupling;
        m.delta = alpha;
        m.horizon = spec.fdr_horizon;
        out.push_back(multiagent_check("multiagent " + std::string(to_string(coupling)), m, spec, alpha));
    }
    return out;
}

}  // namespace bmt
