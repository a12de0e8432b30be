#pragma once

// Level corrections delta' that keep FDR <= delta for p-variable procedures
// under each adaptivity / dependence / output-kind combination. e-variable
// procedures never need a correction.

#include "bmt/evidence.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace bmt {

enum class Adaptivity { ADAPTIVE, NON_ADAPTIVE };
enum class Dependence { INDEPENDENT, ARBITRARY };
enum class OutputKind { STEP_UP, SELF_CONSISTENT_ONLY };

struct DependenceSetting {
    Adaptivity adaptivity = Adaptivity::ADAPTIVE;
    Dependence dependence = Dependence::INDEPENDENT;
    OutputKind output_kind = OutputKind::STEP_UP;
    /// Hypotheses sharing arms; forces the delta / l_k correction for p-values.
    bool multi_arm_hypotheses = false;

    friend bool operator==(const DependenceSetting&, const DependenceSetting&) = default;
};

std::string_view to_string(Adaptivity a);
std::string_view to_string(Dependence d);
std::string_view to_string(OutputKind o);
Adaptivity adaptivity_from_string(std::string_view s);
Dependence dependence_from_string(std::string_view s);
OutputKind output_kind_from_string(std::string_view s);

/// l_k = sum_{i=1}^k 1/i.
double harmonic(std::size_t k);

/// Root of c (1 + log(1/c)) = delta on (0, delta], by bisection.
double solve_c_delta(double delta);

struct CorrectedLevel {
    double level;
    /// Which formula produced `level`, e.g. "max(c_delta, delta/l_k)".
    std::string family;
};

CorrectedLevel corrected_level_detail(double delta, const DependenceSetting& setting,
                                      TestMode mode, std::size_t k);

inline double corrected_level(double delta, const DependenceSetting& setting, TestMode mode,
                              std::size_t k) {
    return corrected_level_detail(delta, setting, mode, k).level;
}

}  // namespace bmt
