// Acceptance suite. One PASS/FAIL line per criterion; detail lines are indented.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only (exit code 1 on FAIL)

#include "bmt/dag.hpp"
#include "bmt/harness.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

using namespace bmt;

namespace {

// Pinned parameters and tolerances.
constexpr double kDelta = 0.05;
constexpr std::size_t kFdrReps = 2000;
constexpr std::size_t kFdrK = 20;
constexpr std::uint64_t kFdrHorizon = 1000;
constexpr double kMaxFdrSe = 0.012;

constexpr std::size_t kVilleReps = 2000;
constexpr std::uint64_t kVilleSteps = 10000;
constexpr double kVilleAlpha = 0.05;  // threshold 1 / alpha = 20
constexpr double kAdversarialRelTol = 1e-9;

constexpr std::size_t kSuperReps = 2000;
constexpr std::uint64_t kSuperSteps = 10000;

constexpr std::size_t kOracleInputs = 1000;
constexpr std::size_t kOracleMaxK = 10;
constexpr std::size_t kDagInputs = 500;
constexpr std::size_t kDagMaxK = 12;
constexpr std::size_t kDualityInputs = 1000;

constexpr std::size_t kEbhVsBhK = 32;
constexpr std::size_t kEbhVsBhReps = 500;
constexpr double kEbhVsBhBand = 1.15;

constexpr std::size_t kGraphK = 50;
constexpr std::size_t kGraphReps = 300;
constexpr double kGraphSlowdown = 2.0;
constexpr double kGraphSlack = 1.05;

constexpr std::size_t kScalingReps = 500;
constexpr double kScalingLo = 2.0;
constexpr double kScalingHi = 8.0;

constexpr std::size_t kAgentReps = 2000;
constexpr std::uint64_t kAgentHorizon = 1000;
constexpr std::uint64_t kLateArrival = 100;
constexpr double kWorkedTol = 1e-12;

constexpr std::uint64_t kCapRounds = 400000;
constexpr std::uint64_t kSeed = 20240101;

std::size_t g_workers = 1;

void detail(const std::string& line) { std::printf("    %s\n", line.c_str()); }

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool report(const ValidityCheck& c) {
    detail(std::string(c.pass ? "ok   " : "FAIL ") + c.name + ": estimate " + num(c.estimate) + ", bound " +
           num(c.bound) + ", se " + num(c.se));
    return c.pass;
}

ValiditySpec spec(std::size_t reps, std::uint64_t steps) {
    ValiditySpec s;
    s.replications = reps;
    s.steps = steps;
    s.seed = kSeed;
    s.workers = g_workers;
    s.delta = kDelta;
    s.k = kFdrK;
    s.fdr_horizon = kFdrHorizon;
    return s;
}

MethodSpec method(std::string id, EvidenceKind kind, PolicyKind policy) {
    MethodSpec m;
    m.id = std::move(id);
    m.evidence.kind = kind;
    m.evidence.lambda = LambdaStrategy::default_wsr(kDelta);
    m.evidence.boundary = {BoundaryKind::PHIJJ};
    m.policy = policy;
    m.setting = {Adaptivity::ADAPTIVE, Dependence::INDEPENDENT, OutputKind::STEP_UP, false};
    return m;
}

// Random inputs for the oracle criteria.
Eigen::VectorXd random_p(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd p(static_cast<Eigen::Index>(k));
    for (auto& x : p) x = u(rng) < 0.4 ? std::max(1e-12, 0.05 * u(rng)) : std::max(1e-12, u(rng));
    if (k > 1 && u(rng) < 0.3) p(1) = p(0);
    return p;
}

Eigen::VectorXd random_e(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> ex(0.5);
    Eigen::VectorXd e(static_cast<Eigen::Index>(k));
    for (auto& x : e) {
        const double r = u(rng);
        x = r < 0.15 ? 0.0 : r < 0.6 ? 3.0 * u(rng) : std::exp(2.0 * ex(rng));
    }
    if (k > 1 && u(rng) < 0.3) e(1) = e(0);
    return e;
}

DagConstraint random_dag(std::mt19937_64& rng, std::size_t k) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double density = 0.4 * u(rng);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (u(rng) < density) edges.emplace_back(perm[a], perm[b]);
    return DagConstraint(k, edges);
}

// ---------------------------------------------------------------------------

bool criterion_1() {
    bool ok = true;
    const auto s = spec(kFdrReps, 0);
    for (std::size_t h1 : {std::size_t{0}, std::size_t{2}}) {
        for (const auto& cell : table1_cells(kFdrK, h1, kDelta, kFdrHorizon)) {
            const auto c = fdr_check("fdr " + cell.name, cell.trial, s);
            ok &= report(c);
            if (c.se > kMaxFdrSe) {
                detail("FAIL se " + num(c.se) + " exceeds " + num(kMaxFdrSe));
                ok = false;
            }
        }
    }
    return ok;
}

bool criterion_2() {
    const auto s = spec(kVilleReps, kVilleSteps);
    const EvidenceConfig dm{EvidenceKind::E_DM, {}, {}};
    const EvidenceConfig wsr{EvidenceKind::E_PMH, LambdaStrategy::default_wsr(kDelta), {}};
    const EvidenceConfig betting{EvidenceKind::E_PMH, LambdaStrategy::betting_half_mean(), {}};
    bool ok = true;
    ok &= report(ville_check("ville dm", dm, NullStream::IID, s, kVilleAlpha));
    ok &= report(ville_check("ville pmh default_wsr", wsr, NullStream::IID, s, kVilleAlpha));
    ok &= report(ville_check("ville pmh betting_half_mean", betting, NullStream::IID, s, kVilleAlpha));
    ok &= report(ville_check("ville dm drifting null", dm, NullStream::DRIFTING, s, kVilleAlpha));
    auto adv = adversarial_pmh_check();
    adv.pass = std::abs(adv.estimate - adv.bound) <= kAdversarialRelTol * adv.bound;
    ok &= report(adv);
    return ok;
}

bool criterion_3() {
    const auto s = spec(kSuperReps, kSuperSteps);
    bool ok = true;
    for (auto b : {BoundaryKind::PHIJJ, BoundaryKind::PHIIS})
        for (const auto& c : superuniformity_check(b, {0.01, 0.05, 0.1}, s)) ok &= report(c);
    return ok;
}

bool criterion_4() {
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<std::size_t> kd(1, kOracleMaxK);
    std::uniform_real_distribution<double> ad(0.01, 0.3);
    std::size_t bh_bad = 0, ebh_bad = 0, dag_bad = 0;
    for (std::size_t n = 0; n < kOracleInputs; ++n) {
        const auto p = random_p(rng, kd(rng));
        const double a = ad(rng);
        if (bh(p, a).ids != brute_force_largest_self_consistent(p, a, TestMode::P).ids) ++bh_bad;
    }
    for (std::size_t n = 0; n < kOracleInputs; ++n) {
        const auto e = random_e(rng, kd(rng));
        const double a = ad(rng);
        if (ebh(e, a).ids != brute_force_largest_self_consistent(e, a, TestMode::E).ids) ++ebh_bad;
    }
    std::uniform_int_distribution<std::size_t> kdag(1, kDagMaxK);
    for (std::size_t n = 0; n < kDagInputs; ++n) {
        const std::size_t k = kdag(rng);
        const auto dag = random_dag(rng, k);
        const bool e_mode = n % 2 == 0;
        const auto logs = to_log(e_mode ? random_e(rng, k) : random_p(rng, k));
        const auto mode = e_mode ? TestMode::E : TestMode::P;
        const double a = ad(rng);
        if (largest_constrained_self_consistent(logs, a, mode, dag).ids != brute_force_constrained(logs, a, mode, dag).ids)
            ++dag_bad;
    }
    detail("bh mismatches " + std::to_string(bh_bad) + " / " + std::to_string(kOracleInputs));
    detail("ebh mismatches " + std::to_string(ebh_bad) + " / " + std::to_string(kOracleInputs));
    detail("dag mismatches " + std::to_string(dag_bad) + " / " + std::to_string(kDagInputs));
    return bh_bad == 0 && ebh_bad == 0 && dag_bad == 0;
}

bool criterion_5() {
    std::mt19937_64 rng(kSeed + 5);
    std::uniform_int_distribution<std::size_t> kd(1, 40);
    std::uniform_real_distribution<double> ad(0.01, 0.3);
    std::size_t bad = 0;
    for (std::size_t n = 0; n < kDualityInputs; ++n) {
        const auto e = random_e(rng, kd(rng));
        const double a = ad(rng);
        Eigen::VectorXd p(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) p(i) = e(i) > 0.0 ? std::min(1.0, 1.0 / e(i)) : 1.0;
        if (ebh(e, a).ids != bh(p, a).ids) ++bad;
    }
    detail("duality mismatches " + std::to_string(bad) + " / " + std::to_string(kDualityInputs));
    return bad == 0;
}

ExperimentConfig ebh_vs_bh_config() {
    ExperimentConfig c;
    c.hypotheses.k = kEbhVsBhK;
    c.hypotheses.h1_rule = H1Rule::FLOOR_LOG_K;
    c.hypotheses.mu1 = 0.5;
    c.methods = {method("uni_bh", EvidenceKind::P_BOUNDARY, PolicyKind::UNIFORM),
                 method("uni_ebh", EvidenceKind::E_PMH, PolicyKind::UNIFORM),
                 method("ucb_bh", EvidenceKind::P_BOUNDARY, PolicyKind::UCB),
                 method("ucb_ebh", EvidenceKind::E_PMH, PolicyKind::UCB)};
    c.baseline = "ucb_ebh";
    c.stopping = StoppingRule::oracle(kCapRounds);
    c.delta = kDelta;
    c.replications = kEbhVsBhReps;
    c.seed = kSeed;
    c.workers = g_workers;
    return c;
}

void print_rows(const MetricsTable& t) {
    for (const auto& m : t.rows)
        detail(m.method + ": mean T* " + num(m.mean_t_star) + ", median " + num(m.median_t_star) + ", censored " +
               std::to_string(m.censored) + ", fdr " + num(m.fdr) + ", tpr " + num(m.tpr));
}

bool criterion_6() {
    const auto t = run_experiment(ebh_vs_bh_config()).metrics;
    print_rows(t);
    const double ucb = t.row("ucb_ebh").mean_t_star / t.row("ucb_bh").mean_t_star;
    const double uni = t.row("uni_ebh").mean_t_star / t.row("uni_bh").mean_t_star;
    const bool ok_ucb = ucb <= kEbhVsBhBand, ok_uni = uni <= kEbhVsBhBand;
    detail(std::string(ok_ucb ? "ok   " : "FAIL ") + "ucb e-BH / BH = " + num(ucb) + " (<= " + num(kEbhVsBhBand) + ")");
    detail(std::string(ok_uni ? "ok   " : "FAIL ") + "uni e-BH / BH = " + num(uni) + " (<= " + num(kEbhVsBhBand) + ")");
    return ok_ucb && ok_uni;
}

bool criterion_7() {
    ExperimentConfig base;
    base.environment.cliques = 10;
    base.hypotheses.k = kGraphK;
    base.hypotheses.h1_rule = H1Rule::FLOOR_LOG_K;
    base.stopping = StoppingRule::oracle(kCapRounds);
    base.delta = kDelta;
    base.replications = kGraphReps;
    base.seed = kSeed;
    base.workers = g_workers;
    const auto t = graph_experiment(base);
    print_rows(t);
    const double e = t.row("ebh").mean_t_star;
    const double single = t.row("single_arm_bh").mean_t_star;
    const double full = t.row("full_bh").mean_t_star;
    const bool a = single >= kGraphSlowdown * e, b = e <= kGraphSlack * full;
    detail(std::string(a ? "ok   " : "FAIL ") + "single-arm BH / e-BH = " + num(single / e) + " (>= " +
           num(kGraphSlowdown) + ")");
    detail(std::string(b ? "ok   " : "FAIL ") + "e-BH / full BH = " + num(e / full) + " (<= " + num(kGraphSlack) + ")");
    return a && b;
}

bool criterion_8() {
    auto run = [](double gap) {
        ExperimentConfig c;
        c.hypotheses.k = 10;
        c.hypotheses.h1_count = 2;
        c.hypotheses.mu1 = gap;
        MethodSpec m = method("ucb_dm", EvidenceKind::E_DM, PolicyKind::UCB);
        c.methods = {m};
        c.stopping = StoppingRule::oracle(kCapRounds);
        c.delta = kDelta;
        c.replications = kScalingReps;
        c.seed = kSeed;
        c.workers = g_workers;
        return run_experiment(c).metrics.row("ucb_dm");
    };
    // Trials where a non-null arm is starved by the UCB rule never reach the
    // target; the sample complexity claims hold with probability 1 - delta, so
    // the ratio uses completed trials and the censored share is bounded by delta.
    const auto wide = run(0.5), narrow = run(0.25);
    auto line = [](const char* name, const MethodMetrics& m) {
        detail(std::string(name) + ": mean T* (completed) " + num(m.mean_t_star_completed) + ", median " +
               num(m.median_t_star) + ", censored " + std::to_string(m.censored) + " / " +
               std::to_string(m.replications));
    };
    line("gap 0.5", wide);
    line("gap 0.25", narrow);
    const double ratio = narrow.mean_t_star_completed / wide.mean_t_star_completed;
    const double max_censored = kDelta * static_cast<double>(kScalingReps);
    const bool cens_ok = static_cast<double>(wide.censored) <= max_censored &&
                         static_cast<double>(narrow.censored) <= max_censored;
    const bool ratio_ok = ratio >= kScalingLo && ratio <= kScalingHi;
    detail(std::string(cens_ok ? "ok   " : "FAIL ") + "censored share <= " + num(kDelta));
    detail(std::string(ratio_ok ? "ok   " : "FAIL ") + "ratio " + num(ratio) + " in [" + num(kScalingLo) + ", " +
           num(kScalingHi) + "]");
    return cens_ok && ratio_ok;
}

bool criterion_9() {
    bool ok = true;
    const auto s = spec(kAgentReps, 0);
    const EvidenceConfig wsr{EvidenceKind::E_PMH, LambdaStrategy::default_wsr(kDelta), {}};
    const EvidenceConfig dm{EvidenceKind::E_DM, {}, {}};
    for (auto coupling : {Coupling::SHARED, Coupling::INDEPENDENT}) {
        MultiAgentConfig m;
        m.env = make_standard_environment(Eigen::VectorXd::Zero(1));
        m.hypotheses = standard_hypotheses(1, 0);
        m.agents = {{1, wsr}, {kLateArrival, dm}};
        m.coupling = coupling;
        m.delta = kDelta;
        m.horizon = kAgentHorizon;
        ok &= report(multiagent_check("multiagent " + std::string(to_string(coupling)), m, s, kVilleAlpha));
    }
    AgentPool pool(1);
    pool.register_agent(0, 1, 1);
    pool.aggregate_step(1, {{0, 1, std::log(4.0)}}, kDelta);
    pool.register_agent(0, 2, 2);
    pool.aggregate_step(2, {{0, 1, std::log(8.0)}, {0, 2, std::log(2.0)}}, kDelta);
    const double worked = std::exp(pool.log_aggregate()(0));
    const bool w = std::abs(worked - 8.0) <= kWorkedTol * 8.0;
    detail(std::string(w ? "ok   " : "FAIL ") + "worked example: (1 * 8 + 4 * 2) / 2 = " + num(worked));
    return ok && w;
}

bool criterion_10() {
    const auto dir = std::filesystem::temp_directory_path() / "bmt_acceptance_replay";
    std::filesystem::remove_all(dir);

    ExperimentConfig c = ebh_vs_bh_config();
    c.replications = 25;
    c.agents = AgentsSpec{Coupling::INDEPENDENT,
                          {{1, {EvidenceKind::E_DM, {}, {}}}, {20, {EvidenceKind::E_PMH, LambdaStrategy::default_wsr(kDelta), {}}}}};
    std::size_t rows = 0, mismatched = 0;
    const auto result = run_experiment(c);
    for (const auto& r : result.records) {
        ++rows;
        if (csv_row(run_trial_record(c, r.method, r.seed)) != csv_row(r)) ++mismatched;
    }
    detail("replayed rows " + std::to_string(rows) + ", mismatches " + std::to_string(mismatched));

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    };
    c.output_dir = (dir / "a").string();
    write_outputs(c, result);
    c.output_dir = (dir / "b").string();
    c.workers = g_workers + 1;
    write_outputs(c, run_experiment(c));
    bool same = true;
    for (const char* f : {"trials.csv", "metrics.csv"})
        if (slurp(dir / "a" / f) != slurp(dir / "b" / f)) same = false;
    detail(std::string(same ? "ok   " : "FAIL ") + "trials.csv and metrics.csv identical across runs and worker counts");
    std::filesystem::remove_all(dir);
    return mismatched == 0 && rows > 0 && same;
}

struct Criterion {
    int id;
    const char* title;
    std::function<bool()> run;
};

const std::vector<Criterion> kCriteria = {
    {1, "FDR control in every dependence cell", criterion_1},
    {2, "e-process validity (Ville) and adversarial PMH stream", criterion_2},
    {3, "p-process superuniformity", criterion_3},
    {4, "oracle equivalence for step-up and DAG search", criterion_4},
    {5, "reciprocal duality of BH and e-BH", criterion_5},
    {6, "e-BH vs BH time to target, k = 32", criterion_6},
    {7, "clique graph ordering, k = 50", criterion_7},
    {8, "sample complexity scaling in the gap", criterion_8},
    {9, "multi-agent validity and worked example", criterion_9},
    {10, "deterministic replay", criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion")->check(CLI::Range(1, 10));
    app.add_option("--workers", g_workers, "worker threads (0 = all cores)");
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        try {
            pass = c.run();
        } catch (const std::exception& e) {
            detail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", c.id, c.title, secs);
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
