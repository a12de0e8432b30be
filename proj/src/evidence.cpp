#include "bmt/evidence.hpp"

#include <stdexcept>
#include <string>

namespace bmt {

std::string_view to_string(EvidenceKind kind) {
    switch (kind) {
    case EvidenceKind::E_PMH: return "pmh";
    case EvidenceKind::E_DM: return "dm";
    case EvidenceKind::P_BOUNDARY: return "p_boundary";
    case EvidenceKind::P_INVERSE_PMH: return "p_inverse_pmh";
    }
    return "?";
}

EvidenceKind evidence_kind_from_string(std::string_view name) {
    if (name == "pmh") return EvidenceKind::E_PMH;
    if (name == "dm") return EvidenceKind::E_DM;
    if (name == "p_boundary") return EvidenceKind::P_BOUNDARY;
    if (name == "p_inverse_pmh") return EvidenceKind::P_INVERSE_PMH;
    throw std::invalid_argument("unknown evidence kind '" + std::string(name) + "'");
}

Evidence make_evidence(const EvidenceConfig& config, double mu0) {
    switch (config.kind) {
    case EvidenceKind::E_PMH: return make_pmh(config.lambda, mu0);
    case EvidenceKind::E_DM: return make_discrete_mixture(mu0);
    case EvidenceKind::P_BOUNDARY: return make_boundary_p_process(config.boundary, mu0);
    case EvidenceKind::P_INVERSE_PMH: return make_inverse_e_p_process(config.lambda, mu0);
    }
    throw std::logic_error("unreachable evidence kind");
}

Evidence evidence_update(Evidence ev, double x) {
    if (auto* e = std::get_if<EProcessState>(&ev)) return e_update(std::move(*e), x);
    return p_update(std::move(std::get<PProcessState>(ev)), x);
}

double evidence_log_value(const Evidence& ev) {
    if (const auto* e = std::get_if<EProcessState>(&ev)) return e->log_e;
    return std::get<PProcessState>(ev).log_p;
}

std::uint64_t evidence_count(const Evidence& ev) {
    if (const auto* e = std::get_if<EProcessState>(&ev)) return e->count;
    return std::get<PProcessState>(ev).count;
}

}  // namespace bmt
