#pragma once

// Rejection sets constrained by a DAG: a hypothesis may only be rejected
// together with all of its ancestors.

#include "bmt/multiple_testing.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace bmt {

class DagConstraint {
public:
    DagConstraint() = default;
    /// Throws std::invalid_argument if `edges` contains a cycle or an
    /// out-of-range endpoint. Edges are (parent, child).
    DagConstraint(std::size_t k, std::vector<std::pair<std::size_t, std::size_t>> edges);

    std::size_t size() const { return parents_.size(); }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
    const std::vector<std::size_t>& parents(std::size_t i) const { return parents_[i]; }
    /// Transitive predecessors of i, ascending.
    const std::vector<std::size_t>& ancestors(std::size_t i) const { return ancestors_[i]; }

    /// True iff `set` contains every parent of each member.
    bool is_feasible(std::span<const std::size_t> set) const;

private:
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> ancestors_;
};

/// Largest DAG-feasible self-consistent set (exact, any k).
///
/// For a size m, every feasible self-consistent set lies inside the
/// ancestor-closed part C_m of {i : i passes the size-m threshold}. Scanning m
/// downward, the first m with |C_m| >= m has |C_m| = m and C_m is the unique
/// maximum-cardinality answer.
RejectionSet largest_constrained_self_consistent(const Eigen::VectorXd& log_values, double alpha,
                                                 TestMode mode, const DagConstraint& dag);

/// Subset-of-step-up construction: the ancestor-closed part of the BH / e-BH
/// output, shrunk (weakest member first) until it is self-consistent again.
/// Marked `exact = false`.
RejectionSet step_up_dag_subset(const Eigen::VectorXd& log_values, double alpha, TestMode mode,
                                const DagConstraint& dag);

/// Oracle: enumerates all subsets (k <= 20), keeping DAG-feasible
/// self-consistent ones; lexicographically smallest on cardinality ties.
RejectionSet brute_force_constrained(const Eigen::VectorXd& log_values, double alpha,
                                     TestMode mode, const DagConstraint& dag);

}  // namespace bmt
