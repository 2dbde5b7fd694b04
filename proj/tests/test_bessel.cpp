#include "wptmod/bessel.hpp"

#include <catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

using wptmod::eddy::bessel_j1;

namespace {

using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;

// J1(x) = sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!), summed in 160 digits so the
// cancellation at x = 200 (terms near 1e85) leaves ample accuracy.
double j1_series(double x) {
    const Big half = Big(x) / 2;
    const Big q = -half * half;
    Big term = half;
    Big sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (Big(k) * Big(k + 1));
        sum += term;
        if (k > x && abs(term) < Big("1e-40")) {
            break;
        }
    }
    return static_cast<double>(sum);
}

} // namespace

TEST_CASE("J1 matches the extended-precision series on [0, 200]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 200.0);
    double worst = 0.0;
    for (int n = 0; n < 300; ++n) {
        const double x = u(rng);
        worst = std::max(worst, std::abs(bessel_j1(x) - j1_series(x)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("J1 across the regime switch points") {
    for (double x : {11.999, 12.0, 12.001, 24.999, 25.0, 25.001}) {
        CHECK(std::abs(bessel_j1(x) - j1_series(x)) < 1e-10);
    }
}

TEST_CASE("J1 agrees with the standard library") {
    for (double x = 0.0; x <= 200.0; x += 0.37) {
        CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) < 1e-10);
    }
}

TEST_CASE("J1 small-argument values and symmetry") {
    CHECK(bessel_j1(0.0) == 0.0);
    CHECK(bessel_j1(1e-8) == Catch::Approx(5e-9).epsilon(1e-12));
    CHECK(bessel_j1(1.0) == Catch::Approx(0.44005058574493355).epsilon(1e-13));
    for (double x : {0.3, 5.0, 17.0, 80.0}) {
        CHECK(bessel_j1(-x) == -bessel_j1(x));
    }
}

TEST_CASE("J1 first zero and maximum") {
    CHECK(std::abs(bessel_j1(3.8317059702075125)) < 1e-13);
    CHECK(bessel_j1(1.8411837813406593) == Catch::Approx(0.5818652242815964).epsilon(1e-12));
}
