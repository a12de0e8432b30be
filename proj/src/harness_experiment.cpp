#include "bmt/harness.hpp"
#include "bmt/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#ifndef BMT_VERSION
#define BMT_VERSION "0.0.0"
#endif

namespace bmt {

std::string_view software_version() { return BMT_VERSION; }

std::optional<std::uint64_t> time_to_target(const std::vector<RoundRejections>& trajectory,
                                            const std::vector<bool>& non_null, double delta) {
    if (trajectory.empty()) return std::nullopt;
    const double target = 1.0 - delta;
    if (compute_fdp_tpp(trajectory.back().set, non_null).tpp < target) return std::nullopt;
    for (const auto& step : trajectory)
        if (compute_fdp_tpp(step.set, non_null).tpp >= target) return step.round;
    return std::nullopt;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

TrialRecord make_record(const ExperimentConfig& c, std::string_view hash, std::string_view method,
                        std::uint64_t seed, std::uint64_t stop_round, const RejectionSet& rejections,
                        const std::vector<RoundRejections>& trajectory, const std::vector<bool>& non_null) {
    TrialRecord r;
    r.config_hash = std::string(hash);
    r.seed = seed;
    r.method = std::string(method);
    r.k = non_null.size();
    r.h1_size = static_cast<std::size_t>(std::count(non_null.begin(), non_null.end(), true));
    r.t_star = time_to_target(trajectory, non_null, c.delta);
    const auto ft = compute_fdp_tpp(rejections, non_null);
    r.fdp_at_stop = ft.fdp;
    r.tpp_at_stop = ft.tpp;
    r.stop_round = stop_round;
    r.rejections = rejections.ids;
    std::sort(r.rejections.begin(), r.rejections.end());
    return r;
}

const MethodSpec& find_method(const ExperimentConfig& c, std::string_view id) {
    for (const auto& m : c.methods)
        if (m.id == id) return m;
    throw std::invalid_argument("unknown method '" + std::string(id) + "'");
}

TrialRecord run_one(const ExperimentConfig& c, std::string_view hash, std::string_view method, std::uint64_t seed,
                    std::uint64_t stride, std::vector<EvidenceSnapshot>* snapshots) {
    if (method == kMultiAgentMethod) {
        const auto mc = make_multiagent_config(c);
        const auto res = run_multiagent(mc, seed);
        return make_record(c, hash, method, seed, res.stop_round, res.rejections, res.trajectory,
                           mc.hypotheses.non_null);
    }
    TrialConfig tc = make_trial_config(c, find_method(c, method));
    tc.snapshot_stride = stride;
    auto res = run_trial(tc, seed);
    if (snapshots) *snapshots = std::move(res.snapshots);
    return make_record(c, hash, method, seed, res.stop_round, res.rejections, res.trajectory,
                       tc.hypotheses.non_null);
}

std::vector<std::string> method_order(const ExperimentConfig& c) {
    std::vector<std::string> order;
    for (const auto& m : c.methods) order.push_back(m.id);
    if (c.agents) order.emplace_back(kMultiAgentMethod);
    return order;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    const double a = v[n / 2 - 1], b = v[n / 2];
    if (std::isinf(a) || std::isinf(b)) return std::isinf(a) ? a : b;
    return 0.5 * (a + b);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string csv_header() {
    return "config_hash,seed,method,k,h1_size,t_star,fdp_at_stop,tpp_at_stop,stop_round,rejections";
}

std::string csv_row(const TrialRecord& r) {
    std::string out = r.config_hash;
    out += ',' + std::to_string(r.seed);
    out += ',' + r.method;
    out += ',' + std::to_string(r.k);
    out += ',' + std::to_string(r.h1_size);
    out += ',' + (r.t_star ? std::to_string(*r.t_star) : std::string("inf"));
    out += ',' + format_double(r.fdp_at_stop);
    out += ',' + format_double(r.tpp_at_stop);
    out += ',' + std::to_string(r.stop_round);
    out += ',';
    for (std::size_t i = 0; i < r.rejections.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(r.rejections[i]);
    }
    return out;
}

TrialRecord run_trial_record(const ExperimentConfig& config, std::string_view method, std::uint64_t seed) {
    return run_one(config, config_hash(config), method, seed, 0, nullptr);
}

const MethodMetrics& MetricsTable::row(std::string_view method) const {
    for (const auto& r : rows)
        if (r.method == method) return r;
    throw std::out_of_range("no metrics row for '" + std::string(method) + "'");
}

double standard_error(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double x : values) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

MetricsTable summarize(const std::vector<TrialRecord>& records, const std::vector<std::string>& order,
                       std::string_view baseline, std::string_view hash) {
    MetricsTable table;
    table.config_hash = std::string(hash);
    table.baseline = std::string(baseline);
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& method : order) {
        std::vector<double> fdp, tpp, lower, with_inf, completed;
        MethodMetrics m;
        m.method = method;
        for (const auto& r : records) {
            if (r.method != method) continue;
            fdp.push_back(r.fdp_at_stop);
            tpp.push_back(r.tpp_at_stop);
            if (r.t_star) {
                lower.push_back(static_cast<double>(*r.t_star));
                with_inf.push_back(static_cast<double>(*r.t_star));
                completed.push_back(static_cast<double>(*r.t_star));
            } else {
                ++m.censored;
                lower.push_back(static_cast<double>(r.stop_round));
                with_inf.push_back(inf);
            }
        }
        m.replications = fdp.size();
        m.fdr = mean_of(fdp);
        m.fdr_se = standard_error(fdp);
        m.tpr = mean_of(tpp);
        m.tpr_se = standard_error(tpp);
        m.mean_t_star = mean_of(lower);
        m.mean_t_star_completed =
            completed.empty() ? std::numeric_limits<double>::quiet_NaN() : mean_of(completed);
        m.median_t_star = median_of(with_inf);
        table.rows.push_back(m);
    }
    double base = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : table.rows)
        if (r.method == baseline) base = r.mean_t_star;
    for (auto& r : table.rows) r.ratio_to_baseline = r.mean_t_star / base;
    return table;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    const std::string hash = config_hash(config);
    const auto order = method_order(config);
    const std::size_t reps = config.replications;
    const bool snap = config.snapshot_stride > 0;

    ExperimentResult out;
    out.records.resize(order.size() * reps);
    std::vector<std::vector<EvidenceSnapshot>> snaps(order.size());
    parallel_for(out.records.size(), config.workers, [&](std::size_t idx) {
        const std::size_t m = idx / reps, r = idx % reps;
        const bool keep = snap && r == 0 && order[m] != kMultiAgentMethod;
        out.records[idx] = run_one(config, hash, order[m], config.seed + 1 + r, keep ? config.snapshot_stride : 0,
                                   keep ? &snaps[m] : nullptr);
    });
    if (snap)
        for (std::size_t m = 0; m < order.size(); ++m)
            if (order[m] != kMultiAgentMethod) out.snapshots.emplace_back(order[m], std::move(snaps[m]));
    out.metrics = summarize(out.records, order, config.baseline, hash);
    return out;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);

    std::string trials = csv_header() + "\n";
    for (const auto& r : result.records) trials += csv_row(r) + "\n";
    write_file(dir / "trials.csv", trials);

    std::string metrics =
        "config_hash,method,replications,fdr,fdr_se,tpr,tpr_se,mean_t_star,mean_t_star_completed,median_t_star,censored,ratio_to_baseline\n";
    for (const auto& m : result.metrics.rows) {
        metrics += result.metrics.config_hash + ',' + m.method + ',' + std::to_string(m.replications) + ',' +
                   format_double(m.fdr) + ',' + format_double(m.fdr_se) + ',' + format_double(m.tpr) + ',' +
                   format_double(m.tpr_se) + ',' + format_double(m.mean_t_star) + ',' +
                   format_double(m.mean_t_star_completed) + ',' + format_double(m.median_t_star) + ',' + std::to_string(m.censored) + ',' +
                   format_double(m.ratio_to_baseline) + "\n";
    }
    write_file(dir / "metrics.csv", metrics);

    nlohmann::json files = {"trials.csv", "metrics.csv"};
    for (const auto& [method, snaps] : result.snapshots) {
        std::string text = "round";
        const std::size_t k = snaps.empty() ? 0 : static_cast<std::size_t>(snaps.front().log_values.size());
        for (std::size_t i = 0; i < k; ++i) text += ",h" + std::to_string(i);
        text += "\n";
        for (const auto& s : snaps) {
            text += std::to_string(s.round);
            for (Eigen::Index i = 0; i < s.log_values.size(); ++i) text += ',' + format_double(s.log_values(i));
            text += "\n";
        }
        const std::string name = "snapshots_" + method + ".csv";
        write_file(dir / name, text);
        files.push_back(name);
    }

    nlohmann::json manifest = {
        {"schema_version", kSchemaVersion},
        {"config_hash", result.metrics.config_hash},
        {"software_version", software_version()},
        {"config", nlohmann::json::parse(dump_config(config, -1))},
        {"csv_columns", csv_header()},
        {"files", files},
    };
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

ExperimentConfig graph_config(ExperimentConfig base) {
    base.environment.kind = EnvironmentKind::CLIQUE_GRAPH;
    base.agents.reset();
    base.methods.clear();

    EvidenceConfig p_jj{EvidenceKind::P_BOUNDARY, {}, {BoundaryKind::PHIJJ}};
    DependenceSetting independent{Adaptivity::ADAPTIVE, Dependence::INDEPENDENT, OutputKind::STEP_UP, false};
    DependenceSetting arbitrary{Adaptivity::ADAPTIVE, Dependence::ARBITRARY, OutputKind::STEP_UP, false};
    EvidenceConfig pmh{EvidenceKind::E_PMH, LambdaStrategy::default_wsr(base.delta), {}};

    base.methods.push_back({"single_arm_bh", p_jj, PolicyKind::UNIFORM, independent, Retention::SINGLE_UNIFORM});
    base.methods.push_back({"full_bh", p_jj, PolicyKind::UNIFORM, arbitrary, Retention::ALL});
    base.methods.push_back({"ebh", pmh, PolicyKind::UNIFORM, independent, Retention::ALL});
    base.baseline = "ebh";
    return base;
}

MetricsTable graph_experiment(const ExperimentConfig& config) {
    return run_experiment(graph_config(config)).metrics;
}

}  // namespace bmt
