#include "bmt/harness.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bmt {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config " + path + ": " + what);
}

// Reads an object and rejects any key that was never asked for.
class StrictObject {
public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    const json* find(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        used_.insert(key);
        return &*it;
    }

    std::string at(const std::string& key) const { return path_ + "." + key; }

    std::string string(const std::string& key, std::string fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(at(key), "expected a string");
        return v->get<std::string>();
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) fail(at(key), "expected a number");
        return v->get<double>();
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_unsigned()) fail(at(key), "expected a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(at(key), "expected true or false");
        return v->get<bool>();
    }

    template <typename E, typename Parse>
    E name(const std::string& key, E fallback, Parse parse) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(at(key), "expected a string");
        try {
            return parse(v->get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(at(key), e.what());
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!used_.contains(key)) fail(at(key), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

EvidenceConfig parse_evidence(const json& j, const std::string& path) {
    StrictObject o(j, path);
    EvidenceConfig e;
    e.kind = o.name("kind", e.kind, evidence_kind_from_string);
    if (const json* l = o.find("lambda")) {
        StrictObject lo(*l, o.at("lambda"));
        e.lambda.kind = lo.name("kind", e.lambda.kind, lambda_kind_from_string);
        e.lambda.param = lo.number("param", e.lambda.param);
        lo.finish();
    }
    e.boundary.kind = o.name("boundary", e.boundary.kind, boundary_kind_from_string);
    o.finish();
    return e;
}

json dump_evidence(const EvidenceConfig& e) {
    return {{"kind", to_string(e.kind)},
            {"lambda", {{"kind", to_string(e.lambda.kind)}, {"param", e.lambda.param}}},
            {"boundary", to_string(e.boundary.kind)}};
}

DependenceSetting parse_setting(const json& j, const std::string& path) {
    StrictObject o(j, path);
    DependenceSetting s;
    s.adaptivity = o.name("adaptivity", s.adaptivity, adaptivity_from_string);
    s.dependence = o.name("dependence", s.dependence, dependence_from_string);
    s.output_kind = o.name("output_kind", s.output_kind, output_kind_from_string);
    s.multi_arm_hypotheses = o.boolean("multi_arm_hypotheses", s.multi_arm_hypotheses);
    o.finish();
    return s;
}

json to_json(const ExperimentConfig& c, bool with_local_fields) {
    json methods = json::array();
    for (const auto& m : c.methods) {
        methods.push_back({{"id", m.id},
                           {"evidence", dump_evidence(m.evidence)},
                           {"policy", to_string(m.policy)},
                           {"setting",
                            {{"adaptivity", to_string(m.setting.adaptivity)},
                             {"dependence", to_string(m.setting.dependence)},
                             {"output_kind", to_string(m.setting.output_kind)},
                             {"multi_arm_hypotheses", m.setting.multi_arm_hypotheses}}},
                           {"retention", to_string(m.retention)}});
    }
    json j = {
        {"environment",
         {{"kind", to_string(c.environment.kind)},
          {"noise", to_string(c.environment.noise)},
          {"cliques", c.environment.cliques}}},
        {"hypotheses",
         {{"k", c.hypotheses.k},
          {"h1_rule", to_string(c.hypotheses.h1_rule)},
          {"h1_count", c.hypotheses.h1_count},
          {"mu1", c.hypotheses.mu1},
          {"mu0", c.hypotheses.mu0}}},
        {"methods", methods},
        {"baseline", c.baseline},
        {"stopping",
         {{"kind", to_string(c.stopping.kind)},
          {"max_rounds", c.stopping.max_rounds},
          {"count", c.stopping.count},
          {"gap", c.stopping.gap}}},
        {"delta", c.delta},
        {"replications", c.replications},
        {"seed", c.seed},
        {"snapshot_stride", c.snapshot_stride},
    };
    if (c.agents) {
        json members = json::array();
        for (const auto& a : c.agents->members)
            members.push_back({{"arrival_round", a.arrival_round}, {"evidence", dump_evidence(a.evidence)}});
        j["agents"] = {{"coupling", to_string(c.agents->coupling)}, {"members", members}};
    }
    if (with_local_fields) {
        j["output_dir"] = c.output_dir;
        j["workers"] = c.workers;
    }
    return j;
}

}  // namespace

std::string_view to_string(H1Rule rule) {
    switch (rule) {
    case H1Rule::CONST: return "const";
    case H1Rule::FLOOR_LOG_K: return "floor_log_k";
    case H1Rule::FLOOR_SQRT_K: return "floor_sqrt_k";
    }
    return "?";
}

H1Rule h1_rule_from_string(std::string_view name) {
    for (auto r : {H1Rule::CONST, H1Rule::FLOOR_LOG_K, H1Rule::FLOOR_SQRT_K})
        if (to_string(r) == name) return r;
    throw std::invalid_argument("unknown h1 rule '" + std::string(name) + "'");
}

std::size_t h1_size(const HypothesisSpec& spec) {
    switch (spec.h1_rule) {
    case H1Rule::CONST: return spec.h1_count;
    case H1Rule::FLOOR_LOG_K:
        return spec.k == 0 ? 0 : static_cast<std::size_t>(std::floor(std::log(static_cast<double>(spec.k))));
    case H1Rule::FLOOR_SQRT_K: {
        std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(spec.k)));
        while (r * r > spec.k) --r;
        while ((r + 1) * (r + 1) <= spec.k) ++r;
        return r;
    }
    }
    return 0;
}

ExperimentConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    StrictObject root(j, "$");
    ExperimentConfig c;

    if (const json* env = root.find("environment")) {
        StrictObject o(*env, root.at("environment"));
        c.environment.kind = o.name("kind", c.environment.kind, environment_kind_from_string);
        c.environment.noise = o.name("noise", c.environment.noise, noise_model_from_string);
        c.environment.cliques = o.count("cliques", c.environment.cliques);
        o.finish();
    }
    if (const json* hyp = root.find("hypotheses")) {
        StrictObject o(*hyp, root.at("hypotheses"));
        c.hypotheses.k = o.count("k", c.hypotheses.k);
        c.hypotheses.h1_rule = o.name("h1_rule", c.hypotheses.h1_rule, h1_rule_from_string);
        c.hypotheses.h1_count = o.count("h1_count", c.hypotheses.h1_count);
        c.hypotheses.mu1 = o.number("mu1", c.hypotheses.mu1);
        c.hypotheses.mu0 = o.number("mu0", c.hypotheses.mu0);
        o.finish();
    }
    if (const json* methods = root.find("methods")) {
        if (!methods->is_array()) fail(root.at("methods"), "expected an array");
        for (std::size_t i = 0; i < methods->size(); ++i) {
            const std::string path = root.at("methods") + "[" + std::to_string(i) + "]";
            StrictObject o((*methods)[i], path);
            MethodSpec m;
            m.id = o.string("id", "");
            if (const json* e = o.find("evidence")) m.evidence = parse_evidence(*e, o.at("evidence"));
            m.policy = o.name("policy", m.policy, policy_kind_from_string);
            if (const json* s = o.find("setting")) m.setting = parse_setting(*s, o.at("setting"));
            m.retention = o.name("retention", m.retention, retention_from_string);
            o.finish();
            c.methods.push_back(std::move(m));
        }
    }
    c.baseline = root.string("baseline", c.baseline);
    if (const json* stop = root.find("stopping")) {
        StrictObject o(*stop, root.at("stopping"));
        c.stopping.kind = o.name("kind", c.stopping.kind, stop_kind_from_string);
        c.stopping.max_rounds = o.count("max_rounds", c.stopping.max_rounds);
        c.stopping.count = o.count("count", c.stopping.count);
        c.stopping.gap = o.count("gap", c.stopping.gap);
        o.finish();
    }
    c.delta = root.number("delta", c.delta);
    c.replications = root.count("replications", c.replications);
    c.seed = root.count("seed", c.seed);
    c.output_dir = root.string("output_dir", c.output_dir);
    c.workers = root.count("workers", c.workers);
    c.snapshot_stride = root.count("snapshot_stride", c.snapshot_stride);
    if (const json* agents = root.find("agents")) {
        StrictObject o(*agents, root.at("agents"));
        AgentsSpec a;
        a.coupling = o.name("coupling", a.coupling, coupling_from_string);
        if (const json* members = o.find("members")) {
            if (!members->is_array()) fail(o.at("members"), "expected an array");
            for (std::size_t i = 0; i < members->size(); ++i) {
                const std::string path = o.at("members") + "[" + std::to_string(i) + "]";
                StrictObject mo((*members)[i], path);
                AgentSpec s;
                s.arrival_round = mo.count("arrival_round", s.arrival_round);
                if (const json* e = mo.find("evidence")) s.evidence = parse_evidence(*e, mo.at("evidence"));
                mo.finish();
                a.members.push_back(s);
            }
        }
        o.finish();
        c.agents = std::move(a);
    }
    root.finish();
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& config, int indent) {
    return to_json(config, true).dump(indent);
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = to_json(config, false).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

namespace {

Environment build_environment(const ExperimentConfig& c) {
    const auto& hs = c.hypotheses;
    const std::size_t h1 = h1_size(hs);
    Eigen::VectorXd means = planted_means(hs.k, h1, hs.mu1, hs.mu0);
    switch (c.environment.kind) {
    case EnvironmentKind::STANDARD_GAUSSIAN: return make_standard_environment(means, c.environment.noise);
    case EnvironmentKind::CLIQUE_GRAPH:
        return make_clique_environment(means, c.environment.cliques, c.environment.noise);
    case EnvironmentKind::STREAMING: return make_streaming_environment(means, c.environment.noise);
    case EnvironmentKind::DRIFTING_NULL: return make_drifting_null_environment(hs.k);
    }
    throw std::invalid_argument("unknown environment kind");
}

}  // namespace

TrialConfig make_trial_config(const ExperimentConfig& c, const MethodSpec& m) {
    TrialConfig t;
    t.env = build_environment(c);
    t.hypotheses = standard_hypotheses(c.hypotheses.k, h1_size(c.hypotheses), c.hypotheses.mu0);
    t.policy = m.policy;
    t.evidence = m.evidence;
    t.setting = m.setting;
    t.delta = c.delta;
    t.retention = m.retention;
    t.stop = c.stopping;
    t.snapshot_stride = 0;
    return t;
}

MultiAgentConfig make_multiagent_config(const ExperimentConfig& c) {
    if (!c.agents) throw std::invalid_argument("config has no agents section");
    MultiAgentConfig m;
    m.env = build_environment(c);
    m.hypotheses = standard_hypotheses(c.hypotheses.k, h1_size(c.hypotheses), c.hypotheses.mu0);
    m.agents = c.agents->members;
    m.coupling = c.agents->coupling;
    m.delta = c.delta;
    m.horizon = c.stopping.max_rounds;
    m.oracle_stop = c.stopping.kind == StopKind::ALL_NONNULLS_ORACLE;
    return m;
}

void validate(const ExperimentConfig& c) {
    if (c.hypotheses.k == 0) fail("$.hypotheses.k", "must be positive");
    if (h1_size(c.hypotheses) > c.hypotheses.k) fail("$.hypotheses", "|H1| exceeds k");
    if (c.environment.kind == EnvironmentKind::DRIFTING_NULL && h1_size(c.hypotheses) != 0)
        fail("$.hypotheses", "the drifting null environment has no non-nulls");
    if (!(c.delta > 0.0 && c.delta < 1.0)) fail("$.delta", "must lie in (0, 1)");
    if (c.replications == 0) fail("$.replications", "must be positive");
    if (c.methods.empty() && !c.agents) fail("$.methods", "at least one method or an agents section is required");

    std::set<std::string> ids;
    for (std::size_t i = 0; i < c.methods.size(); ++i) {
        const auto& m = c.methods[i];
        const std::string path = "$.methods[" + std::to_string(i) + "]";
        if (m.id.empty()) fail(path + ".id", "must be non-empty");
        if (m.id == kMultiAgentMethod) fail(path + ".id", "is reserved");
        if (m.id.find_first_of(",;\"\n") != std::string::npos) fail(path + ".id", "contains a CSV delimiter");
        if (!ids.insert(m.id).second) fail(path + ".id", "duplicate method id");
        try {
            validate(make_trial_config(c, m));
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    if (!c.baseline.empty() && !ids.contains(c.baseline) &&
        !(c.agents && c.baseline == kMultiAgentMethod))
        fail("$.baseline", "does not name a method");
    if (c.agents) {
        if (c.agents->members.empty()) fail("$.agents.members", "must be non-empty");
        if (c.stopping.kind != StopKind::FIXED_HORIZON && c.stopping.kind != StopKind::ALL_NONNULLS_ORACLE)
            fail("$.stopping.kind", "agents support fixed_horizon and all_nonnulls_oracle only");
        for (std::size_t l = 0; l < c.agents->members.size(); ++l) {
            const auto& a = c.agents->members[l];
            const std::string path = "$.agents.members[" + std::to_string(l) + "]";
            if (a.arrival_round == 0) fail(path + ".arrival_round", "rounds start at 1");
            if (mode_of(a.evidence.kind) != TestMode::E) fail(path + ".evidence", "agents need e-processes");
        }
        try {
            const auto m = make_multiagent_config(c);
            TrialConfig check;
            check.env = m.env;
            check.hypotheses = m.hypotheses;
            check.delta = m.delta;
            validate(check);
        } catch (const std::invalid_argument& e) {
            fail("$.agents", e.what());
        }
    }
}

}  // namespace bmt
