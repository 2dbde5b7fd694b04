#include "wptmod/characteristics.hpp"
#include "wptmod/constants.hpp"
#include "wptmod/errors.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace wptmod;
using namespace wptmod::characteristics;

namespace {

const double w20k = 2.0 * constants::pi * 20e3;

SweepSpec coil_spec(double load) {
    SweepSpec s;
    s.i_min = 0.0;
    s.i_max = 10.0;
    s.steps = 21;
    s.drive = circuit::DriveSpec{w20k, 0.0, 0.7, 0.0};
    s.receiver = circuit::CoilReceiver::resonant(0.1, 1e-5, load, w20k);
    s.couplings = circuit::Couplings::aligned(7e-7, 0.7);
    s.tx = circuit::TxCoil::resonant(0.1, 1e-5, w20k);
    s.label = "coil/x";
    return s;
}

} // namespace

TEST_CASE("sweep grid and scaling") {
    const CharacteristicCurve c = sweep_curve(coil_spec(4.5));
    REQUIRE(c.points.size() == 21);
    CHECK(c.label == "coil/x");
    CHECK(c.points.front().i_tx == 0.0);
    CHECK(c.points.front().u_tx == 0.0);
    CHECK(c.points.front().p_in == 0.0);
    CHECK(c.points.back().i_tx == 10.0);
    const double u1 = c.points[2].u_tx / c.points[2].i_tx;
    const double p1 = c.points[2].p_in / (c.points[2].i_tx * c.points[2].i_tx);
    for (std::size_t k = 1; k < c.points.size(); ++k) {
        const auto& p = c.points[k];
        CHECK(p.i_tx == Catch::Approx(0.5 * k).epsilon(1e-15));
        CHECK(p.u_tx / p.i_tx == Catch::Approx(u1).epsilon(1e-12));
        CHECK(p.p_in / (p.i_tx * p.i_tx) == Catch::Approx(p1).epsilon(1e-12));
        CHECK(p.u_tx == Catch::Approx(std::hypot(p.u_a, p.u_b)).epsilon(1e-15));
    }
}

TEST_CASE("single equivalent transmitter voltage and power for a resonant coil") {
    // Aligned steering: both loops see I R plus the reflected w^2 M^2 / Z_C share.
    const SweepSpec s = coil_spec(4.5);
    const double r_in = 0.1 + w20k * w20k * 7e-7 * 7e-7 / 4.6;
    const CharacteristicCurve c = sweep_curve(s);
    CHECK(c.points[6].u_tx == Catch::Approx(3.0 * r_in).epsilon(1e-12));
    CHECK(c.points[6].p_in == Catch::Approx(9.0 * r_in).epsilon(1e-12));
}

TEST_CASE("lighter loads draw more power") {
    const auto heavy = sweep_curve(coil_spec(1.5));
    const auto light = sweep_curve(coil_spec(10.0));
    for (std::size_t k = 1; k < heavy.points.size(); ++k) {
        CHECK(heavy.points[k].p_in > light.points[k].p_in);
    }
}

TEST_CASE("sweep validation") {
    SweepSpec s = coil_spec(4.5);
    s.steps = 1;
    CHECK_THROWS_AS(sweep_curve(s), ValidationError);
    s = coil_spec(4.5);
    s.i_max = -1.0;
    CHECK_THROWS_AS(sweep_curve(s), ValidationError);
    s = coil_spec(4.5);
    s.label = "a,b";
    CHECK_THROWS_AS(sweep_curve(s), ValidationError);
    s = coil_spec(4.5);
    s.receiver = circuit::MetalReceiver{0.0, 0.0};
    CHECK_THROWS_AS(sweep_curve(s), SingularityError);
}

TEST_CASE("noise is reproducible and unbiased") {
    CharacteristicCurve flat{"coil/x", {}};
    for (int k = 0; k < 20000; ++k) {
        flat.points.push_back(CurvePoint{1.0 + k, 2.0, 3.0, 1.0, 1.0});
    }
    const double sigma = 0.01;
    const auto a = add_noise(flat, {sigma, 42});
    const auto b = add_noise(flat, {sigma, 42});
    const auto c = add_noise(flat, {sigma, 43});
    double mu = 0.0, var = 0.0, mp = 0.0;
    bool differs = false;
    for (std::size_t k = 0; k < flat.points.size(); ++k) {
        CHECK(a.points[k].u_tx == b.points[k].u_tx);
        CHECK(a.points[k].p_in == b.points[k].p_in);
        CHECK(a.points[k].i_tx == flat.points[k].i_tx);
        differs = differs || a.points[k].u_tx != c.points[k].u_tx;
        const double e = a.points[k].u_tx / 2.0 - 1.0;
        mu += e;
        var += e * e;
        mp += a.points[k].p_in / 3.0 - 1.0;
    }
    const double n = static_cast<double>(flat.points.size());
    mu /= n;
    mp /= n;
    const double sd = std::sqrt(var / n - mu * mu);
    CHECK(differs);
    CHECK(std::abs(mu) < 4.0 * sigma / std::sqrt(n));
    CHECK(std::abs(mp) < 4.0 * sigma / std::sqrt(n));
    CHECK(sd == Catch::Approx(sigma).epsilon(0.03));
}

TEST_CASE("zero noise is the identity and large noise clips at zero") {
    const auto c = sweep_curve(coil_spec(4.5));
    const auto same = add_noise(c, {0.0, 9});
    for (std::size_t k = 0; k < c.points.size(); ++k) {
        CHECK(same.points[k].u_tx == c.points[k].u_tx);
        CHECK(same.points[k].p_in == c.points[k].p_in);
    }
    const auto wild = add_noise(c, {5.0, 9});
    for (const auto& p : wild.points) {
        CHECK(p.u_tx >= 0.0);
        CHECK(p.p_in >= 0.0);
    }
    CHECK_THROWS_AS(add_noise(c, {-0.1, 1}), ValidationError);
}

TEST_CASE("CSV round trip") {
    std::vector<CharacteristicCurve> curves{sweep_curve(coil_spec(1.5)), sweep_curve(coil_spec(10.0))};
    curves[1].label = "metal/y";
    std::ostringstream out;
    write_csv(out, curves);
    CHECK(out.str().rfind("label,i_tx_A,u_tx_V,p_in_W\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[1].label == "metal/y");
    for (std::size_t c = 0; c < 2; ++c) {
        REQUIRE(back[c].points.size() == curves[c].points.size());
        for (std::size_t k = 0; k < back[c].points.size(); ++k) {
            CHECK(std::abs(back[c].points[k].u_tx - curves[c].points[k].u_tx) <= 1e-15 * 10);
            CHECK(std::abs(back[c].points[k].p_in - curves[c].points[k].p_in) <= 1e-15 * 10);
        }
    }
    std::ostringstream again;
    write_csv(again, back);
    CHECK(again.str() == out.str());
}

TEST_CASE("CSV errors") {
    std::istringstream no_header("coil/x,1,2,3\n");
    CHECK_THROWS_AS(read_csv(no_header), ValidationError);
    std::istringstream bad_number("label,i_tx_A,u_tx_V,p_in_W\ncoil/x,1,abc,3\n");
    CHECK_THROWS_AS(read_csv(bad_number), ValidationError);
    std::istringstream short_row("label,i_tx_A,u_tx_V,p_in_W\ncoil/x,1,2\n");
    CHECK_THROWS_AS(read_csv(short_row), ValidationError);
    std::istringstream decreasing("label,i_tx_A,u_tx_V,p_in_W\ncoil/x,2,2,3\ncoil/x,1,2,3\n");
    CHECK_THROWS_AS(read_csv(decreasing), ValidationError);
}
