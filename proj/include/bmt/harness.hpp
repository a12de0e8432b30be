#pragma once

// Monte Carlo experiments: configuration, replication, metrics, validity
// oracles and file output.

#include "bmt/engine.hpp"
#include "bmt/multiagent.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bmt {

inline constexpr int kSchemaVersion = 1;
std::string_view software_version();

// ---------------------------------------------------------------------------
// Configuration

enum class H1Rule { CONST, FLOOR_LOG_K, FLOOR_SQRT_K };

std::string_view to_string(H1Rule rule);
H1Rule h1_rule_from_string(std::string_view name);

struct EnvironmentSpec {
    EnvironmentKind kind = EnvironmentKind::STANDARD_GAUSSIAN;
    NoiseModel noise = NoiseModel::INDEPENDENT;
    std::size_t cliques = 10;
};

struct HypothesisSpec {
    std::size_t k = 10;
    H1Rule h1_rule = H1Rule::CONST;
    std::size_t h1_count = 2;  ///< used by CONST
    double mu1 = 0.5;
    double mu0 = 0.0;
};

/// |H1| for k under `rule`; FLOOR_LOG_K uses the natural log.
std::size_t h1_size(const HypothesisSpec& spec);

struct MethodSpec {
    std::string id;
    EvidenceConfig evidence{};
    PolicyKind policy = PolicyKind::UCB;
    DependenceSetting setting{};
    Retention retention = Retention::ALL;
};

struct AgentsSpec {
    Coupling coupling = Coupling::SHARED;
    std::vector<AgentSpec> members;
};

struct ExperimentConfig {
    EnvironmentSpec environment{};
    HypothesisSpec hypotheses{};
    std::vector<MethodSpec> methods;
    std::string baseline;
    StoppingRule stopping = StoppingRule::oracle(100000);
    double delta = 0.05;
    std::size_t replications = 100;
    std::uint64_t seed = 0;
    std::string output_dir = "results";
    std::size_t workers = 1;
    /// Evidence snapshots of the first replication; 0 disables them.
    std::uint64_t snapshot_stride = 0;
    std::optional<AgentsSpec> agents;
};

/// Parses JSON text. Unknown keys, wrong types and invalid values throw
/// std::invalid_argument with the offending path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON with every field spelled out.
std::string dump_config(const ExperimentConfig& config, int indent = 2);
void validate(const ExperimentConfig& config);

/// FNV-1a 64 over the canonical compact dump, excluding output_dir and
/// workers; 16 lowercase hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Method spec to engine config for one replication.
TrialConfig make_trial_config(const ExperimentConfig& config, const MethodSpec& method);
MultiAgentConfig make_multiagent_config(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Trials and metrics

inline constexpr std::string_view kMultiAgentMethod = "multiagent";

struct TrialRecord {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string method;
    std::size_t k = 0;
    std::size_t h1_size = 0;
    std::optional<std::uint64_t> t_star;  ///< nullopt when censored
    double fdp_at_stop = 0.0;
    double tpp_at_stop = 0.0;
    std::uint64_t stop_round = 0;
    std::vector<std::size_t> rejections;
};

/// First round where TPP(R_t) >= 1 - delta, provided it also holds at the stop.
std::optional<std::uint64_t> time_to_target(const std::vector<RoundRejections>& trajectory,
                                            const std::vector<bool>& non_null, double delta);

std::string csv_header();
/// Fixed column order; doubles in shortest round-trip form, censored t_star as "inf".
std::string csv_row(const TrialRecord& record);

/// Runs one replication of `method` (or the multi-agent setup when `method`
/// equals kMultiAgentMethod) with the given seed.
TrialRecord run_trial_record(const ExperimentConfig& config, std::string_view method, std::uint64_t seed);

struct MethodMetrics {
    std::string method;
    std::size_t replications = 0;
    double fdr = 0.0;
    double fdr_se = 0.0;
    double tpr = 0.0;
    double tpr_se = 0.0;
    /// Censored trials enter the mean at their stop round (a lower bound).
    double mean_t_star = 0.0;
    /// Mean over uncensored trials only; NaN when every trial is censored.
    double mean_t_star_completed = 0.0;
    /// Censored trials count as +inf.
    double median_t_star = 0.0;
    std::size_t censored = 0;
    /// mean_t_star / baseline mean_t_star; NaN without a baseline.
    double ratio_to_baseline = 0.0;
};

struct MetricsTable {
    std::string config_hash;
    std::string baseline;
    std::vector<MethodMetrics> rows;

    const MethodMetrics& row(std::string_view method) const;
};

/// Sample SD / sqrt(n); 0 for n < 2.
double standard_error(const std::vector<double>& values);

MetricsTable summarize(const std::vector<TrialRecord>& records, const std::vector<std::string>& method_order,
                       std::string_view baseline, std::string_view hash);

struct ExperimentResult {
    MetricsTable metrics;
    /// Grouped by method (config order), then by seed.
    std::vector<TrialRecord> records;
    /// First-replication snapshots per method, when enabled.
    std::vector<std::pair<std::string, std::vector<EvidenceSnapshot>>> snapshots;
};

/// Seeds seed+1 .. seed+R for every method.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes trials.csv, metrics.csv, manifest.json and optional snapshot files
/// into config.output_dir.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

/// Uniform superarm sampling on the clique graph with single-arm BH, full BH
/// and e-BH; environment is forced to CLIQUE_GRAPH and methods are replaced.
ExperimentConfig graph_config(ExperimentConfig base);
MetricsTable graph_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Validity oracles

struct ValidityCheck {
    std::string name;
    double estimate = 0.0;
    double bound = 0.0;
    double se = 0.0;
    bool pass = false;
};

/// estimate <= bound + 3 se.
ValidityCheck band_check(std::string name, const std::vector<double>& per_trial, double bound);

struct ValiditySpec {
    std::size_t replications = 2000;
    std::uint64_t steps = 10000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double delta = 0.05;
    std::size_t k = 20;
    std::uint64_t fdr_horizon = 1000;
};

ValiditySpec parse_validity_spec(std::string_view json_text);

enum class NullStream { IID, DRIFTING };

/// Fraction of null runs whose e-process reaches 1/alpha within `steps`.
ValidityCheck ville_check(std::string name, const EvidenceConfig& evidence, NullStream stream,
                          const ValiditySpec& spec, double alpha);

/// P(inf_{t <= steps} P_t <= alpha) for each alpha, from one set of runs.
std::vector<ValidityCheck> superuniformity_check(BoundaryKind boundary, const std::vector<double>& alphas,
                                                 const ValiditySpec& spec);

/// Empirical FDR of `trial` over spec.replications seeds.
ValidityCheck fdr_check(std::string name, const TrialConfig& trial, const ValiditySpec& spec);

/// Sup-crossing frequency of the pooled multi-agent e-value.
ValidityCheck multiagent_check(std::string name, const MultiAgentConfig& config, const ValiditySpec& spec,
                               double alpha);

/// PMH with bets 0 / 1 on the deterministic stream -1, +1, -1, ...; compares
/// the value at t = 10 against exp(5).
ValidityCheck adversarial_pmh_check();

struct FdrCell {
    std::string name;
    TrialConfig trial;
};

/// Adaptivity x dependence x {BH at the corrected level, e-BH}.
std::vector<FdrCell> table1_cells(std::size_t k, std::size_t h1, double delta, std::uint64_t horizon);

std::vector<ValidityCheck> validity_suite(const ValiditySpec& spec);

}  // namespace bmt
