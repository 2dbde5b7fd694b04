#include "wptmod/constants.hpp"
#include "wptmod/errors.hpp"
#include "wptmod/magnetics.hpp"

#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <random>

using namespace wptmod;
using namespace wptmod::magnetics;
using constants::mu0;
using constants::pi;

namespace {

struct P3 {
    double x, y, z;
};

// Corner-to-corner sides of a centred square, counter-clockwise.
std::array<std::array<P3, 2>, 4> sides(double s, double z) {
    const P3 c0{s, -s, z}, c1{s, s, z}, c2{-s, s, z}, c3{-s, -s, z};
    return {{{c0, c1}, {c1, c2}, {c2, c3}, {c3, c0}}};
}

// Direct 2D product Gauss-Legendre evaluation of mu0/(4 pi) oint oint dl1.dl2 / R.
double neumann_bruteforce(double a, double b, double h, int panels = 12) {
    using G = boost::math::quadrature::gauss<double, 20>;
    double total = 0.0;
    for (const auto& s1 : sides(a, 0.0)) {
        for (const auto& s2 : sides(b, h)) {
            const P3 d1{s1[1].x - s1[0].x, s1[1].y - s1[0].y, 0.0};
            const P3 d2{s2[1].x - s2[0].x, s2[1].y - s2[0].y, 0.0};
            const double dot = d1.x * d2.x + d1.y * d2.y;
            if (dot == 0.0) {
                continue;
            }
            for (int p = 0; p < panels; ++p) {
                for (int q = 0; q < panels; ++q) {
                    const double t0 = double(p) / panels, t1 = double(p + 1) / panels;
                    const double u0 = double(q) / panels, u1 = double(q + 1) / panels;
                    total += dot * G::integrate(
                                       [&](double t) {
                                           return G::integrate(
                                               [&](double u) {
                                                   const double dx = s1[0].x + t * d1.x - s2[0].x - u * d2.x;
                                                   const double dy = s1[0].y + t * d1.y - s2[0].y - u * d2.y;
                                                   return 1.0 / std::sqrt(dx * dx + dy * dy + h * h);
                                               },
                                               u0, u1);
                                       },
                                       t0, t1);
                }
            }
        }
    }
    return mu0 / (4.0 * pi) * total;
}

} // namespace

TEST_CASE("field components and angle round trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mag(1e-9, 1.0), ang(0.0, 2.0 * pi);
    for (int n = 0; n < 1000; ++n) {
        const double m = mag(rng), t = ang(rng);
        const PolarField p = field_angle(field_components(m, t));
        CHECK(p.magnitude == Catch::Approx(m).epsilon(1e-12));
        const double diff = std::remainder(p.theta - t, 2.0 * pi);
        CHECK(std::abs(diff) < 1e-12);
        CHECK(p.theta >= 0.0);
        CHECK(p.theta < 2.0 * pi);
    }
    CHECK(field_angle({0.0, -1.0}).theta == Catch::Approx(1.5 * pi));
    CHECK_THROWS_AS(field_angle({0.0, 0.0}), DomainError);
}

TEST_CASE("centre field of a square loop follows from four finite segments") {
    // A straight segment of length 2l seen from distance l at its midpoint:
    // B = mu0 I / (4 pi l) * 2 sin(45 deg); four sides add.
    const double l = 0.164, i = 2.5;
    const double per_side = mu0 * i / (4.0 * pi * l) * 2.0 * std::sin(pi / 4.0);
    const SquareLoop coil{l, 3};
    const FieldPhasor f = b_field_at_origin({i, 0.0}, {0.0, 0.0}, coil);
    CHECK(std::abs(f.bx) == 0.0);
    CHECK(std::abs(f.by) == Catch::Approx(3 * 4 * per_side).epsilon(1e-13));
    const FieldPhasor g = b_field_at_origin({0.0, 0.0}, {i, 0.0}, coil);
    CHECK(std::abs(g.by) == 0.0);
    CHECK(std::abs(g.bx) == Catch::Approx(std::abs(f.by)).epsilon(1e-15));
}

TEST_CASE("steering angle for in-phase currents is time independent") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> th(-1.5, 1.5), wt(-1.0, 1.0);
    for (int n = 0; n < 200; ++n) {
        const double theta = th(rng);
        const double got = steering_angle(std::sin(theta), std::cos(theta), 0.0, wt(rng));
        CHECK(got == Catch::Approx(theta).margin(1e-12));
    }
}

TEST_CASE("steering angle with a phase offset and at its pole") {
    const double wt = 0.3, dphi = 0.4;
    CHECK(steering_angle(2.0, 1.0, dphi, wt) == Catch::Approx(std::atan(2.0 * std::cos(wt + dphi) / std::cos(wt))));
    CHECK_THROWS_AS(steering_angle(1.0, 1.0, 0.0, pi / 2.0), DomainError);
    CHECK_THROWS_AS(steering_angle(1.0, 0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("Neumann integral matches a brute-force double quadrature") {
    for (auto [a, b, h] : {std::array{0.164, 0.164, 0.2}, std::array{0.164, 0.1, 0.2}, std::array{0.3, 0.05, 0.1},
                           std::array{0.1, 0.4, 0.6}}) {
        const NeumannResult r = mutual_inductance_neumann({SquareLoop{a, 1}, b, h, 1}, {1e-9, 1, 12});
        CHECK(r.inductance == Catch::Approx(neumann_bruteforce(a, b, h)).epsilon(1e-7));
    }
}

TEST_CASE("Neumann inductance is symmetric and scales with turns") {
    const CoaxialPair pair{SquareLoop{0.164, 3}, 0.1, 0.2, 2};
    const double m = mutual_inductance_neumann(pair, {1e-8, 1, 12}).inductance;
    CHECK(mutual_inductance_neumann(pair.swapped(), {1e-8, 1, 12}).inductance == Catch::Approx(m).epsilon(1e-9));
    const double single = mutual_inductance_neumann({SquareLoop{0.164, 1}, 0.1, 0.2, 1}, {1e-8, 1, 12}).inductance;
    CHECK(m == Catch::Approx(6.0 * single).epsilon(1e-9));
}

TEST_CASE("Neumann inductance approaches the dipole limit far away") {
    const double a = 0.1, b = 0.05, h = 5.0;
    const double dipole = mu0 * (4 * a * a) * (4 * b * b) / (2.0 * pi * h * h * h);
    CHECK(mutual_inductance_neumann({SquareLoop{a, 1}, b, h, 1}).inductance == Catch::Approx(dipole).epsilon(2e-3));
}

TEST_CASE("Neumann rejects touching or invalid geometry") {
    CHECK_THROWS_AS(mutual_inductance_neumann({SquareLoop{0.1, 1}, 0.1, 0.0, 1}), ValidationError);
    CHECK_THROWS_AS(mutual_inductance_neumann({SquareLoop{-0.1, 1}, 0.1, 0.2, 1}), ValidationError);
    CHECK_THROWS_AS(mutual_inductance_neumann({SquareLoop{0.1, 0}, 0.1, 0.2, 1}), ValidationError);
    // Nearly touching contours need many levels; two are not enough.
    CHECK_THROWS_AS(mutual_inductance_neumann({SquareLoop{0.1, 1}, 0.1, 1e-4, 1}, {1e-9, 1, 2}), ConvergenceError);
}

TEST_CASE("closed-form coil coupling formula") {
    const double a = 0.164, b = 0.1, h = 0.2;
    const double expect = 4.0 * mu0 * b / pi * std::log(std::sqrt(((a + b) * (a + b) + h * h) / ((a - b) * (a - b) + h * h)));
    CHECK(mutual_inductance_coil_coil_closed({SquareLoop{a, 1}, b, h, 1}) == Catch::Approx(expect).epsilon(1e-14));
    CHECK(mutual_inductance_coil_coil_closed({SquareLoop{a, 3}, b, h, 3}) == Catch::Approx(9 * expect).epsilon(1e-14));
    // Overestimates the exact contour integral for this geometry.
    const double neumann = mutual_inductance_neumann({SquareLoop{a, 1}, b, h, 1}, {1e-8, 1, 12}).inductance;
    CHECK(expect / neumann == Catch::Approx(1.9636).epsilon(1e-3));
}

TEST_CASE("closed-form coil coupling at zero separation") {
    CHECK(mutual_inductance_coil_coil_closed({SquareLoop{0.2, 1}, 0.1, 0.0, 1}) > 0.0);
    CHECK_THROWS_AS(mutual_inductance_coil_coil_closed({SquareLoop{0.1, 1}, 0.1, 0.0, 1}), SingularityError);
}

TEST_CASE("plate coupling closed form equals the integral over stacked loops") {
    for (double a : {0.05, 0.164, 0.5}) {
        for (double b : {0.05, 0.1, 0.3, 0.5}) {
            for (double h : {0.1, 0.2, 0.8}) {
                const SquareLoop tx{a, 2};
                CHECK(mutual_inductance_coil_plate(tx, b, h) ==
                      Catch::Approx(mutual_inductance_coil_plate_numeric(tx, b, h)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("plate coupling derivative is the loop coupling") {
    const SquareLoop tx{0.164, 1};
    const double b = 0.12, h = 0.2, db = 1e-5;
    const double slope = (mutual_inductance_coil_plate(tx, b + db, h) - mutual_inductance_coil_plate(tx, b - db, h)) / (2 * db);
    CHECK(slope == Catch::Approx(mutual_inductance_coil_coil_closed({tx, b, h, 1})).epsilon(1e-7));
    CHECK(std::abs(mutual_inductance_coil_plate(tx, 0.0, h)) < 1e-22);
}

TEST_CASE("coil-to-plate ratios at the prototype distance") {
    const SquareLoop tx{0.164, 1};
    auto ratio = [&](double b) {
        return mutual_inductance_coil_coil_closed({tx, b, 0.2, 1}) / mutual_inductance_coil_plate(tx, b, 0.2);
    };
    CHECK(ratio(0.1) == Catch::Approx(29.0).epsilon(0.02));
    CHECK(ratio(1.0) == Catch::Approx(1.3).epsilon(0.05));
}

TEST_CASE("couplings fall with distance") {
    const SquareLoop tx{0.164, 3};
    double prev_coil = INFINITY, prev_plate = INFINITY, prev_neumann = INFINITY;
    for (double h = 0.05; h <= 1.0; h += 0.05) {
        const double c = mutual_inductance_coil_coil_closed({tx, 0.1, h, 1});
        const double p = mutual_inductance_coil_plate(tx, 0.1, h);
        const double n = mutual_inductance_neumann({tx, 0.1, h, 1}).inductance;
        CHECK(c < prev_coil);
        CHECK(p < prev_plate);
        CHECK(n < prev_neumann);
        prev_coil = c;
        prev_plate = p;
        prev_neumann = n;
    }
}
