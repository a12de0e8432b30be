// Command-line front end: run, validity, graph, oracle-selfconsistent.

#include "bmt/harness.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace bmt;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> workers;
    std::optional<std::uint64_t> stride;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--reps", o.reps, "replications");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    cmd->add_option("--stride", o.stride, "evidence snapshot stride for the first replication");
}

void apply(ExperimentConfig& c, const Overrides& o) {
    if (o.reps) c.replications = *o.reps;
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output_dir = *o.out;
    if (o.workers) c.workers = *o.workers;
    if (o.stride) c.snapshot_stride = *o.stride;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void print_metrics(const MetricsTable& t) {
    std::cout << "config " << t.config_hash << (t.baseline.empty() ? "" : ", baseline " + t.baseline) << "\n";
    std::printf("%-20s %6s %16s %16s %12s %12s %8s %8s\n", "method", "reps", "fdr +- se", "tpr +- se", "mean T*",
                "median T*", "cens", "ratio");
    for (const auto& m : t.rows) {
        std::printf("%-20s %6zu %16s %16s %12s %12s %8zu %8s\n", m.method.c_str(), m.replications,
                    (fmt(m.fdr) + " +- " + fmt(m.fdr_se)).c_str(), (fmt(m.tpr) + " +- " + fmt(m.tpr_se)).c_str(),
                    fmt(m.mean_t_star).c_str(), fmt(m.median_t_star).c_str(), m.censored,
                    fmt(m.ratio_to_baseline).c_str());
    }
}

int run_command(const Overrides& o) {
    auto c = load_config(o.config);
    apply(c, o);
    validate(c);
    const auto result = run_experiment(c);
    write_outputs(c, result);
    print_metrics(result.metrics);
    std::cout << "wrote " << c.output_dir << "\n";
    return 0;
}

ExperimentConfig default_graph_base() {
    ExperimentConfig c;
    c.hypotheses.k = 50;
    c.hypotheses.h1_rule = H1Rule::FLOOR_LOG_K;
    c.environment.cliques = 10;
    c.stopping = StoppingRule::oracle(200000);
    c.replications = 300;
    c.output_dir = "results/graph";
    return c;
}

int graph_command(const Overrides& o) {
    ExperimentConfig base = o.config.empty() ? default_graph_base() : load_config(o.config);
    apply(base, o);
    const auto c = graph_config(base);
    validate(c);
    const auto result = run_experiment(c);
    write_outputs(c, result);
    print_metrics(result.metrics);
    std::cout << "wrote " << c.output_dir << "\n";
    return 0;
}

int validity_command(const Overrides& o, std::optional<std::uint64_t> steps) {
    ValiditySpec s;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw std::invalid_argument("cannot open " + o.config);
        std::stringstream buf;
        buf << in.rdbuf();
        s = parse_validity_spec(buf.str());
    }
    if (o.reps) s.replications = *o.reps;
    if (o.seed) s.seed = *o.seed;
    if (o.workers) s.workers = *o.workers;
    if (steps) s.steps = *steps;

    std::string csv = "check,estimate,bound,se,pass\n";
    int failures = 0;
    for (const auto& c : validity_suite(s)) {
        std::printf("%s %-45s estimate=%.5g bound=%.5g se=%.3g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.estimate, c.bound, c.se);
        csv += c.name + ',' + std::to_string(c.estimate) + ',' + std::to_string(c.bound) + ',' +
               std::to_string(c.se) + ',' + (c.pass ? "1" : "0") + "\n";
        if (!c.pass) ++failures;
    }
    if (o.out) {
        std::filesystem::create_directories(*o.out);
        std::ofstream(std::filesystem::path(*o.out) / "validity.csv") << csv;
    }
    std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

int oracle_command(const Overrides& o, std::size_t max_k) {
    const std::size_t inputs = o.reps.value_or(1000);
    std::mt19937_64 rng(o.seed.value_or(1));
    std::uniform_int_distribution<std::size_t> k_dist(1, max_k);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t mismatches = 0;
    for (std::size_t n = 0; n < inputs; ++n) {
        const std::size_t k = k_dist(rng);
        const double alpha = 0.01 + 0.3 * u(rng);
        Eigen::VectorXd p(static_cast<Eigen::Index>(k)), e(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            p(static_cast<Eigen::Index>(i)) = std::pow(u(rng), 3.0);
            e(static_cast<Eigen::Index>(i)) = std::exp(6.0 * u(rng) - 2.0);
        }
        const auto bh_set = bh(p, alpha);
        const auto ebh_set = ebh(e, alpha);
        if (bh_set.ids != brute_force_largest_self_consistent(p, alpha, TestMode::P).ids) ++mismatches;
        if (ebh_set.ids != brute_force_largest_self_consistent(e, alpha, TestMode::E).ids) ++mismatches;
    }
    std::printf("%zu random inputs, k <= %zu: %zu mismatch(es)\n", inputs, max_k, mismatches);
    return mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandit multiple testing experiments"};
    app.require_subcommand(1);

    Overrides run_o, graph_o, validity_o, oracle_o;
    std::optional<std::uint64_t> steps;
    std::size_t max_k = 10;

    auto* run = app.add_subcommand("run", "run an experiment config and write CSV outputs");
    run->add_option("--config", run_o.config, "experiment JSON")->required();
    add_common_flags(run, run_o);

    auto* graph = app.add_subcommand("graph", "clique-graph comparison of single-arm BH, full BH and e-BH");
    graph->add_option("--config", graph_o.config, "base experiment JSON (methods are replaced)");
    add_common_flags(graph, graph_o);

    auto* validity = app.add_subcommand("validity", "Monte Carlo validity oracles");
    validity->add_option("--config", validity_o.config, "validity spec JSON");
    validity->add_option("--steps", steps, "null stream length");
    add_common_flags(validity, validity_o);

    auto* oracle = app.add_subcommand("oracle-selfconsistent", "bh / e-BH against exhaustive search");
    oracle->add_option("--max-k", max_k, "largest k")->check(CLI::Range(1, 16));
    add_common_flags(oracle, oracle_o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return run_command(run_o);
        if (graph->parsed()) return graph_command(graph_o);
        if (validity->parsed()) return validity_command(validity_o, steps);
        if (oracle->parsed()) return oracle_command(oracle_o, max_k);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
