#include "bmt/boundary.hpp"

namespace bmt {

std::string_view to_string(BoundaryKind kind) {
    switch (kind) {
    case BoundaryKind::PHI0: return "phi0";
    case BoundaryKind::PHIJJ: return "jj";
    case BoundaryKind::PHIIS: return "is";
    }
    return "?";
}

BoundaryKind boundary_kind_from_string(std::string_view name) {
    if (name == "phi0") return BoundaryKind::PHI0;
    if (name == "jj") return BoundaryKind::PHIJJ;
    if (name == "is") return BoundaryKind::PHIIS;
    throw std::invalid_argument("unknown boundary '" + std::string(name) + "'");
}

}  // namespace bmt
