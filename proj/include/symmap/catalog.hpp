#pragma once

// The map specs the examples and checks are run on.

#include <string>
#include <vector>

#include "symmap/witness.hpp"

namespace symmap {

struct CatalogEntry {
    std::string name;
    std::string basis_id;
    std::size_t L = 0;
    std::string rotations = "identity";
};

/// state18: (5,4) Gell-Mann, L = 5. example2: (4,3), L = 1. example3: MUB-derived
/// (7,2), L = 4. example4: (1,5) with the 5-cycle, L = 1. theorem2_dN: M = d, L = N.
inline const std::vector<CatalogEntry>& spec_catalog() {
    static const std::vector<CatalogEntry> entries{
        {"state18", "d4_5x4", 5, "identity"},
        {"example2", "d3_4x3", 1, "identity"},
        {"example3", "d3_mub_7x2[:7]", 4, "identity"},
        {"example4", "d3_2x5[:1]", 1, "cycle5"},
        {"theorem2_d2", "mum_d2", 3, "identity"},
        {"theorem2_d3", "mum_d3", 4, "identity"},
        {"theorem2_d4", "mum_d4", 5, "identity"},
    };
    return entries;
}

inline const CatalogEntry& catalog_entry(std::string_view name) {
    for (const auto& e : spec_catalog())
        if (e.name == name) return e;
    throw ContractError("unknown spec '" + std::string(name) + "'");
}

inline MapSpec catalog_spec(const CatalogEntry& e, double z, const Tolerances& tol = default_tolerances()) {
    const auto basis = basis_by_id(e.basis_id);
    return make_spec(basis, e.L, z, parse_rotation_set(e.rotations, basis.group_count(), basis.outcomes()), tol);
}

inline MapSpec catalog_spec(std::string_view name, double z, const Tolerances& tol = default_tolerances()) {
    return catalog_spec(catalog_entry(name), z, tol);
}

} // namespace symmap
