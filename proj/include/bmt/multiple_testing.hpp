#pragma once

// BH / e-BH step-up procedures and the self-consistency predicates behind them.
//
// A set R of k hypotheses is
//   p-self-consistent at level a  iff  max_{i in R} p_i <= |R| a / k,
//   e-self-consistent at level a  iff  min_{i in R} e_i >= k / (a |R|).
// BH and e-BH return the largest such set. Both are evaluated in log space
// through a shared "strength" s_i (log p_i, or -log e_i) and threshold
// tau_m = log(a m / k); i passes at size m iff s_i <= tau_m. Feeding
// log p = -log e therefore gives bit-identical BH and e-BH decisions.

#include "bmt/evidence.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bmt {

enum class Procedure { BH, EBH, CONSTRAINED_P, CONSTRAINED_E };

std::string_view to_string(Procedure p);

struct RejectionSet {
    std::vector<std::size_t> ids;  ///< ascending hypothesis indices
    double level = 0.0;
    Procedure procedure = Procedure::EBH;
    /// False only for the heuristic DAG path, which is not guaranteed maximal.
    bool exact = true;

    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
    bool contains(std::size_t id) const;

    friend bool operator==(const RejectionSet&, const RejectionSet&) = default;
};

/// log(alpha * m / k).
double log_threshold(double alpha, std::size_t set_size, std::size_t k);

/// Strength of a log-domain value; smaller is stronger in both modes.
inline double strength(double log_value, TestMode mode) {
    return mode == TestMode::P ? log_value : -log_value;
}

/// Step-up on log-domain values (log p for P, log e for E).
RejectionSet step_up_log(const Eigen::VectorXd& log_values, double alpha, TestMode mode);

RejectionSet bh(const Eigen::VectorXd& pvals, double alpha);
RejectionSet ebh(const Eigen::VectorXd& evals, double alpha);
RejectionSet bh_log(const Eigen::VectorXd& log_p, double alpha);
RejectionSet ebh_log(const Eigen::VectorXd& log_e, double alpha);

/// Linear-domain predicate; the empty set is always self-consistent.
bool is_self_consistent(const Eigen::VectorXd& values, std::span<const std::size_t> set,
                        double alpha, TestMode mode);
bool is_self_consistent_log(const Eigen::VectorXd& log_values, std::span<const std::size_t> set,
                            double alpha, TestMode mode);

/// Exhaustive oracle over all 2^k subsets (k <= 16). Returns the
/// maximum-cardinality self-consistent set, lexicographically smallest on ties.
RejectionSet brute_force_largest_self_consistent(const Eigen::VectorXd& values, double alpha,
                                                 TestMode mode);

/// Converts linear p- or e-values to log space (log 0 = -inf).
Eigen::VectorXd to_log(const Eigen::VectorXd& values);

}  // namespace bmt
