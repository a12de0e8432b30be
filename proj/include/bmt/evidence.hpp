#pragma once

// Per-hypothesis evidence as seen by the engine: either an e-process or a
// p-process, exposed through a single log-domain value.

#include "bmt/e_process.hpp"
#include "bmt/p_process.hpp"

#include <string_view>
#include <variant>

namespace bmt {

enum class EvidenceKind {
    E_PMH,          ///< predictably-mixed Hoeffding e-process
    E_DM,           ///< discrete mixture e-process
    P_BOUNDARY,     ///< boundary-inversion p-process
    P_INVERSE_PMH,  ///< 1 / PMH
};

/// P: smaller is stronger evidence. E: larger is stronger.
enum class TestMode { P, E };

struct EvidenceConfig {
    EvidenceKind kind = EvidenceKind::E_PMH;
    LambdaStrategy lambda{};
    Boundary boundary{};

    friend bool operator==(const EvidenceConfig&, const EvidenceConfig&) = default;
};

std::string_view to_string(EvidenceKind kind);
EvidenceKind evidence_kind_from_string(std::string_view name);

constexpr TestMode mode_of(EvidenceKind kind) {
    return kind == EvidenceKind::E_PMH || kind == EvidenceKind::E_DM ? TestMode::E : TestMode::P;
}

using Evidence = std::variant<EProcessState, PProcessState>;

Evidence make_evidence(const EvidenceConfig& config, double mu0);
Evidence evidence_update(Evidence ev, double x);
/// log e for e-processes, log p (current, not running inf) for p-processes.
double evidence_log_value(const Evidence& ev);
std::uint64_t evidence_count(const Evidence& ev);

}  // namespace bmt
