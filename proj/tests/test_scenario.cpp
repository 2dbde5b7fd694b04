#include "wptmod/errors.hpp"
#include "wptmod/scenario.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace wptmod;
using namespace wptmod::scenario;

namespace {

const std::filesystem::path source_dir{WPTMOD_SOURCE_DIR};

} // namespace

TEST_CASE("bundled scenario file equals the built-in one") {
    const Scenario file = load((source_dir / "scenarios/paper-repro.json").string());
    Scenario builtin = paper_repro();
    builtin.materials_db = file.materials_db;
    CHECK(to_json(file) == to_json(builtin));
    CHECK(std::filesystem::exists(file.materials_db));
    CHECK(load("paper-repro").materials_db.empty());
}

TEST_CASE("JSON round trip") {
    Scenario s = paper_repro();
    s.plates[0].rel_permeability = 200.0;
    s.transmitter.capacitance_f = 6.6e-6;
    s.eddy.k_max = 150.0;
    const Scenario back = from_json(to_json(s));
    CHECK(to_json(back) == to_json(s));
    CHECK(back.plates[0].rel_permeability == 200.0);
}

TEST_CASE("unknown keys and bad values are rejected") {
    auto j = to_json(paper_repro());
    j["frequency_khz"] = 20;
    CHECK_THROWS_AS(from_json(j), ValidationError);
    j = to_json(paper_repro());
    j["transmitter"]["side_m"] = 0.3;
    CHECK_THROWS_AS(from_json(j), ValidationError);
    j = to_json(paper_repro());
    j["plates"][0]["colour"] = "grey";
    CHECK_THROWS_AS(from_json(j), ValidationError);
    j = to_json(paper_repro());
    j["receiver_coil"]["distance_m"] = 0.0;
    CHECK_THROWS_AS(from_json(j), ValidationError);
    j = to_json(paper_repro());
    j["sweep"]["steps"] = "many";
    CHECK_THROWS_AS(from_json(j), ValidationError);
    j = to_json(paper_repro());
    j["plates"][1]["rel_permeability"] = 0.5;
    CHECK_THROWS_AS(from_json(j), ValidationError);
    CHECK_THROWS_AS(load("/nonexistent/scenario.json"), NotFoundError);
}

TEST_CASE("receivers of the repro scenario") {
    const Scenario s = paper_repro();
    const auto rx = build_receivers(s, load_materials(s));
    REQUIRE(rx.size() == 9);
    CHECK(rx[0].label == "coil/1.5ohm");
    CHECK(rx[2].label == "coil/10ohm");
    CHECK(rx[3].label == "metal/Fe/100mm");
    CHECK(rx[8].label == "metal/Al/200mm");
    CHECK(rx[3].truth == detection::Truth::Metal);
    // Aligned azimuth splits the coupling equally at 45 degrees.
    CHECK(rx[0].couplings.m_ac == Catch::Approx(rx[0].couplings.m_bc));
    CHECK(rx[0].couplings.magnitude() == Catch::Approx(7.16e-7).epsilon(2e-3));
    const auto& coil = std::get<circuit::CoilReceiver>(rx[1].model);
    CHECK(coil.load == 4.5);
    CHECK(coil.resistance == 0.005);
}

TEST_CASE("coupling table") {
    const auto rows = compute_couplings(paper_repro());
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].m_coil_closed_h / rows[0].m_coil_neumann_h == Catch::Approx(1.7128e-7 / 7.9562e-8).epsilon(1e-3));
    CHECK(rows[2].ratio_coil_to_plate == Catch::Approx(29.1).epsilon(0.01));
    CHECK(rows[2].m_plate_closed_h == Catch::Approx(rows[2].m_plate_numeric_h).epsilon(1e-10));

    Scenario far = paper_repro();
    far.receiver.distance_m = 50.0;
    CHECK(compute_couplings(far)[0].m_coil_neumann_h < 1e-12);
}

TEST_CASE("impedance rows keep convergence failures") {
    Scenario s = paper_repro();
    s.eddy.k_max = 5.0;
    const auto rows = compute_impedances(s, load_materials(s));
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        CHECK_FALSE(r.report);
        CHECK(r.error.find("not certified") != std::string::npos);
    }
    CHECK_THROWS_AS(build_receivers(s, load_materials(s)), ConvergenceError);
}

TEST_CASE("permeability override") {
    Scenario s = paper_repro();
    s.plates = {PlateSpec{"Fe", 0.1, 0.2, std::nullopt}, PlateSpec{"Fe", 0.1, 0.2, 400.0}};
    const auto rows = compute_impedances(s, load_materials(s));
    CHECK(rows[0].rel_permeability == 300.0);
    CHECK(rows[1].rel_permeability == 400.0);
    CHECK(rows[0].report->impedance.r_m != rows[1].report->impedance.r_m);
}

TEST_CASE("test samples are seeded") {
    const Scenario s = paper_repro();
    const auto rx = build_receivers(s, load_materials(s));
    const auto a = build_test_samples(s, rx, {3.0, 6.0}, {0.01, 5});
    const auto b = build_test_samples(s, rx, {3.0, 6.0}, {0.01, 5});
    const auto c = build_test_samples(s, rx, {3.0, 6.0}, {0.01, 6});
    REQUIRE(a.size() == 18);
    CHECK(a[1].label == "coil/1.5ohm");
    CHECK(a[1].sample.i_tx == 6.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].sample.u_tx == b[k].sample.u_tx);
    }
    CHECK(a[0].sample.u_tx != c[0].sample.u_tx);

    // Noiseless samples sit on the curves.
    const auto clean = build_test_samples(s, rx, {5.0}, {0.0, 0});
    const auto curves = build_curves(s, rx).all();
    for (std::size_t k = 0; k < rx.size(); ++k) {
        CHECK(clean[k].label == curves[k].label);
        CHECK(clean[k].sample.u_tx == Catch::Approx(curves[k].points[10].u_tx).epsilon(1e-13));
        CHECK(clean[k].sample.p_in == Catch::Approx(curves[k].points[10].p_in).epsilon(1e-13));
    }
}

TEST_CASE("curve labels split by class") {
    const Scenario s = paper_repro();
    const auto set = build_curves(s, build_receivers(s, load_materials(s)));
    CHECK(set.coil.size() == 3);
    CHECK(set.metal.size() == 6);
    const auto again = split_curves(set.all());
    CHECK(again.coil.size() == 3);
    CHECK(again.metal.size() == 6);
    CHECK_THROWS_AS(split_curves({characteristics::CharacteristicCurve{"plate/x", {}}}), ValidationError);
}
