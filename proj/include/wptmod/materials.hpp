#pragma once

#include "wptmod/eddy.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wptmod::eddy {

struct MaterialEntry {
    MetalMaterial material;
    /// Long name, e.g. "Cuprum" for "Cu".
    std::string description;
    /// Tabulated permeability range when the source gives a range instead of a value.
    double rel_permeability_min = 1.0;
    double rel_permeability_max = 1.0;

    bool permeability_is_range() const { return rel_permeability_max > rel_permeability_min; }
};

/// Material table stored as CSV:
///   name,conductivity_S_per_m,rel_permeability,rel_permeability_min,rel_permeability_max,description
/// Lines starting with '#' and blank lines are ignored.
class MaterialDatabase {
public:
    /// Cu, Al and Fe (mu_r 300 within 200..400).
    static MaterialDatabase builtin();
    static MaterialDatabase load(const std::filesystem::path& path);

    void save(const std::filesystem::path& path) const;

    /// Lookup by short or long name, case-insensitive. Throws NotFoundError.
    const MaterialEntry& find(const std::string& name) const;
    bool contains(const std::string& name) const;

    /// Throws ValidationError on invalid values or duplicate names.
    void add(MaterialEntry entry);

    const std::vector<MaterialEntry>& entries() const { return entries_; }

private:
    const MaterialEntry* lookup(const std::string& name) const;

    std::vector<MaterialEntry> entries_;
};

} // namespace wptmod::eddy
