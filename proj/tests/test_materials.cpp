#include "wptmod/errors.hpp"
#include "wptmod/materials.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace wptmod;
using namespace wptmod::eddy;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("wptmod_" + name);
}

} // namespace

TEST_CASE("built-in table") {
    const MaterialDatabase db = MaterialDatabase::builtin();
    CHECK(db.entries().size() == 3);
    CHECK(db.find("Cu").material.conductivity == 5.88e7);
    CHECK(db.find("Cu").material.rel_permeability == 1.0);
    CHECK(db.find("Al").material.conductivity == 3.44e7);
    const MaterialEntry& fe = db.find("fe");
    CHECK(fe.material.conductivity == 1.0e7);
    CHECK(fe.material.rel_permeability == 300.0);
    CHECK(fe.permeability_is_range());
    CHECK(fe.rel_permeability_min == 200.0);
    CHECK(fe.rel_permeability_max == 400.0);
    CHECK(&db.find("cuprum") == &db.find("CU"));
    CHECK_FALSE(db.find("Cu").permeability_is_range());
}

TEST_CASE("unknown material") {
    const MaterialDatabase db = MaterialDatabase::builtin();
    CHECK_FALSE(db.contains("Ti"));
    CHECK_THROWS_AS(db.find("Ti"), NotFoundError);
}

TEST_CASE("shipped table equals the built-in one") {
    const MaterialDatabase file = MaterialDatabase::load(std::filesystem::path(WPTMOD_SOURCE_DIR) / "data/materials.csv");
    const MaterialDatabase builtin = MaterialDatabase::builtin();
    REQUIRE(file.entries().size() == builtin.entries().size());
    for (const auto& e : builtin.entries()) {
        const auto& f = file.find(e.material.name);
        CHECK(f.material.conductivity == e.material.conductivity);
        CHECK(f.material.rel_permeability == e.material.rel_permeability);
        CHECK(f.rel_permeability_min == e.rel_permeability_min);
        CHECK(f.rel_permeability_max == e.rel_permeability_max);
    }
}

TEST_CASE("save, extend and reload") {
    const auto path = temp_file("materials_roundtrip.csv");
    MaterialDatabase db = MaterialDatabase::builtin();
    db.add(MaterialEntry{MetalMaterial{"SS304", 1.45e6, 1.02}, "Stainless", 1.0, 1.05});
    db.save(path);
    const MaterialDatabase back = MaterialDatabase::load(path);
    CHECK(back.entries().size() == 4);
    CHECK(back.find("stainless").material.conductivity == 1.45e6);
    CHECK(back.find("SS304").rel_permeability_max == 1.05);
    std::filesystem::remove(path);
}

TEST_CASE("rejects bad entries") {
    MaterialDatabase db = MaterialDatabase::builtin();
    CHECK_THROWS_AS(db.add(MaterialEntry{MetalMaterial{"Cu", 1e7, 1.0}, "", 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(db.add(MaterialEntry{MetalMaterial{"X", -1.0, 1.0}, "", 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(db.add(MaterialEntry{MetalMaterial{"X", 1e7, 0.5}, "", 0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(db.add(MaterialEntry{MetalMaterial{"X", 1e7, 5.0}, "", 10.0, 20.0}), ValidationError);
}

TEST_CASE("load errors") {
    CHECK_THROWS_AS(MaterialDatabase::load(temp_file("does_not_exist.csv")), NotFoundError);
    const auto path = temp_file("materials_bad.csv");
    {
        std::ofstream out(path);
        out << "# comment\nCu,abc,1,1,1\n";
    }
    CHECK_THROWS_AS(MaterialDatabase::load(path), ValidationError);
    {
        std::ofstream out(path);
        out << "Cu,5.88e7,1\n";
    }
    CHECK_THROWS_AS(MaterialDatabase::load(path), ValidationError);
    std::filesystem::remove(path);
}
