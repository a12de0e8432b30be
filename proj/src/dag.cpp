#include "bmt/dag.hpp"

#include <algorithm>
#include <stdexcept>

namespace bmt {

DagConstraint::DagConstraint(std::size_t k,
                             std::vector<std::pair<std::size_t, std::size_t>> edges)
    : edges_(std::move(edges)), parents_(k), ancestors_(k) {
    std::vector<std::vector<std::size_t>> children(k);
    std::vector<std::size_t> indegree(k, 0);
    for (auto [p, c] : edges_) {
        if (p >= k || c >= k) throw std::invalid_argument("dag: edge endpoint out of range");
        if (p == c) throw std::invalid_argument("dag: self loop");
        parents_[c].push_back(p);
        children[p].push_back(c);
        ++indegree[c];
    }

    // Kahn's order; leftovers mean a cycle.
    std::vector<std::size_t> order;
    order.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        if (indegree[i] == 0) order.push_back(i);
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (std::size_t c : children[order[head]])
            if (--indegree[c] == 0) order.push_back(c);
    }
    if (order.size() != k) throw std::invalid_argument("dag: constraint graph has a cycle");

    for (std::size_t v : order) {
        auto& anc = ancestors_[v];
        for (std::size_t p : parents_[v]) {
            anc.push_back(p);
            anc.insert(anc.end(), ancestors_[p].begin(), ancestors_[p].end());
        }
        std::sort(anc.begin(), anc.end());
        anc.erase(std::unique(anc.begin(), anc.end()), anc.end());
    }
}

bool DagConstraint::is_feasible(std::span<const std::size_t> set) const {
    std::vector<char> in(size(), 0);
    for (std::size_t i : set) in[i] = 1;
    for (std::size_t i : set)
        for (std::size_t p : parents_[i])
            if (!in[p]) return false;
    return true;
}

namespace {

Procedure constrained_procedure(TestMode mode) {
    return mode == TestMode::P ? Procedure::CONSTRAINED_P : Procedure::CONSTRAINED_E;
}

/// Members of `allowed` whose ancestors are all allowed.
std::vector<std::size_t> closed_part(const std::vector<char>& allowed, const DagConstraint& dag) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        if (!allowed[i]) continue;
        const auto& anc = dag.ancestors(i);
        if (std::all_of(anc.begin(), anc.end(), [&](std::size_t a) { return allowed[a] != 0; }))
            out.push_back(i);
    }
    return out;
}

void check_dims(const Eigen::VectorXd& v, const DagConstraint& dag) {
    if (static_cast<std::size_t>(v.size()) != dag.size())
        throw std::invalid_argument("dag: size does not match number of hypotheses");
}

}  // namespace

RejectionSet largest_constrained_self_consistent(const Eigen::VectorXd& log_values, double alpha,
                                                 TestMode mode, const DagConstraint& dag) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
    check_dims(log_values, dag);
    const auto k = static_cast<std::size_t>(log_values.size());
    RejectionSet out;
    out.level = alpha;
    out.procedure = constrained_procedure(mode);

    std::vector<char> allowed(k);
    for (std::size_t m = k; m >= 1; --m) {
        const double tau = log_threshold(alpha, m, k);
        for (std::size_t i = 0; i < k; ++i)
            allowed[i] = strength(log_values(static_cast<Eigen::Index>(i)), mode) <= tau;
        auto closed = closed_part(allowed, dag);
        if (closed.size() >= m) {
            out.ids = std::move(closed);
            return out;
        }
    }
    return out;
}

RejectionSet step_up_dag_subset(const Eigen::VectorXd& log_values, double alpha, TestMode mode,
                                const DagConstraint& dag) {
    check_dims(log_values, dag);
    const auto k = static_cast<std::size_t>(log_values.size());
    const RejectionSet base = step_up_log(log_values, alpha, mode);

    std::vector<char> allowed(k, 0);
    for (std::size_t i : base.ids) allowed[i] = 1;

    RejectionSet out;
    out.level = alpha;
    out.procedure = constrained_procedure(mode);
    out.exact = false;
    while (true) {
        auto closed = closed_part(allowed, dag);
        if (is_self_consistent_log(log_values, closed, alpha, mode)) {
            out.ids = std::move(closed);
            return out;
        }
        // Drop the weakest closed member and try again.
        auto weakest = std::max_element(closed.begin(), closed.end(), [&](auto a, auto b) {
            return strength(log_values(static_cast<Eigen::Index>(a)), mode) <
                   strength(log_values(static_cast<Eigen::Index>(b)), mode);
        });
        allowed[*weakest] = 0;
    }
}

RejectionSet brute_force_constrained(const Eigen::VectorXd& log_values, double alpha,
                                     TestMode mode, const DagConstraint& dag) {
    check_dims(log_values, dag);
    const auto k = static_cast<std::size_t>(log_values.size());
    if (k > 20) throw std::invalid_argument("brute force oracle limited to k <= 20");
    RejectionSet best;
    best.level = alpha;
    best.procedure = constrained_procedure(mode);
    std::vector<std::size_t> members;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        members.clear();
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1u << i)) members.push_back(i);
        if (members.size() < best.ids.size()) continue;
        if (!dag.is_feasible(members)) continue;
        if (!is_self_consistent_log(log_values, members, alpha, mode)) continue;
        if (members.size() > best.ids.size() || members < best.ids) best.ids = members;
    }
    return best;
}

}  // namespace bmt
