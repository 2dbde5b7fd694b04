#include "wptmod/materials.hpp"

#include "wptmod/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wptmod::eddy {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, const std::string& context) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(field, &used);
    } catch (const std::exception&) {
        throw ValidationError("material database: bad number '" + field + "' in " + context);
    }
    if (used != field.size()) {
        throw ValidationError("material database: bad number '" + field + "' in " + context);
    }
    return value;
}

void validate_entry(const MaterialEntry& e) {
    if (e.material.name.empty()) {
        throw ValidationError("material name must not be empty");
    }
    if (e.material.name.find(',') != std::string::npos || e.description.find(',') != std::string::npos) {
        throw ValidationError("material names must not contain commas");
    }
    e.material.validate();
    if (!(e.rel_permeability_min >= 1.0) || !(e.rel_permeability_min <= e.material.rel_permeability) ||
        !(e.material.rel_permeability <= e.rel_permeability_max)) {
        throw ValidationError("material '" + e.material.name + "': permeability range must satisfy 1 <= min <= value <= max");
    }
}

} // namespace

MaterialDatabase MaterialDatabase::builtin() {
    MaterialDatabase db;
    db.add({{"Cu", 5.88e7, 1.0}, "Cuprum", 1.0, 1.0});
    db.add({{"Al", 3.44e7, 1.0}, "Aluminum", 1.0, 1.0});
    db.add({{"Fe", 1.00e7, 300.0}, "Ferrum", 200.0, 400.0});
    return db;
}

MaterialDatabase MaterialDatabase::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw NotFoundError("material database not found: " + path.string());
    }
    MaterialDatabase db;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(t);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        const std::string context = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 5 && fields.size() != 6) {
            throw ValidationError("material database: expected 5 or 6 fields in " + context);
        }
        MaterialEntry e;
        e.material.name = fields[0];
        e.material.conductivity = parse_number(fields[1], context);
        e.material.rel_permeability = parse_number(fields[2], context);
        e.rel_permeability_min = parse_number(fields[3], context);
        e.rel_permeability_max = parse_number(fields[4], context);
        if (fields.size() == 6) {
            e.description = fields[5];
        }
        db.add(std::move(e));
    }
    return db;
}

void MaterialDatabase::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write material database: " + path.string());
    }
    out << "# name,conductivity_S_per_m,rel_permeability,rel_permeability_min,rel_permeability_max,description\n";
    out << std::setprecision(17);
    for (const auto& e : entries_) {
        out << e.material.name << ',' << e.material.conductivity << ',' << e.material.rel_permeability << ','
            << e.rel_permeability_min << ',' << e.rel_permeability_max << ',' << e.description << '\n';
    }
}

const MaterialEntry* MaterialDatabase::lookup(const std::string& name) const {
    const std::string key = lower(name);
    for (const auto& e : entries_) {
        if (lower(e.material.name) == key || (!e.description.empty() && lower(e.description) == key)) {
            return &e;
        }
    }
    return nullptr;
}

const MaterialEntry& MaterialDatabase::find(const std::string& name) const {
    if (const auto* e = lookup(name)) {
        return *e;
    }
    throw NotFoundError("unknown material: " + name);
}

bool MaterialDatabase::contains(const std::string& name) const { return lookup(name) != nullptr; }

void MaterialDatabase::add(MaterialEntry entry) {
    validate_entry(entry);
    if (contains(entry.material.name) || (!entry.description.empty() && contains(entry.description))) {
        throw ValidationError("duplicate material: " + entry.material.name);
    }
    entries_.push_back(std::move(entry));
}

} // namespace wptmod::eddy
