#include "wptmod/bessel.hpp"

#include "wptmod/constants.hpp"

#include <cmath>

namespace wptmod::eddy {

namespace {

constexpr double kSeriesLimit = 12.0;
constexpr double kAsymptoticLimit = 25.0;

double series(double x) {
    const double half = 0.5 * x;
    const double q = -half * half;
    double term = half;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

// Miller's backward recurrence normalised by J0 + 2 * sum J_2k = 1.
double backward_recurrence(double x) {
    int start = static_cast<int>(x) + 40;
    start += start % 2;
    double next = 0.0;
    double cur = 1e-30;
    double j1 = 0.0;
    double norm = 0.0;
    for (int n = start; n > 0; --n) {
        const double prev = 2.0 * n / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{n-1}
        if (n - 1 == 1) {
            j1 = cur;
        }
        if ((n - 1) % 2 == 0) {
            norm += (n - 1 == 0) ? cur : 2.0 * cur;
        }
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            j1 *= 1e-250;
            norm *= 1e-250;
        }
    }
    return j1 / norm;
}

// Hankel expansion, mu = 4 nu^2 = 4.
double asymptotic(double x) {
    const double mu = 4.0;
    double p = 0.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 0; k < 100; ++k) {
        if (k > 0) {
            const double odd = 2.0 * k - 1.0;
            term *= (mu - odd * odd) / (k * 8.0 * x);
        }
        const double mag = std::abs(term);
        if (k > 1 && mag > last) {
            break;
        }
        last = mag;
        switch (k % 4) {
        case 0: p += term; break;
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        }
        if (mag < 1e-18) {
            break;
        }
    }
    // cos(x - 3pi/4) and sin(x - 3pi/4) without reducing x - 3pi/4 directly.
    const double s = std::sin(x);
    const double c = std::cos(x);
    const double cos_chi = (s - c) / std::sqrt(2.0);
    const double sin_chi = -(s + c) / std::sqrt(2.0);
    return std::sqrt(2.0 / (constants::pi * x)) * (p * cos_chi - q * sin_chi);
}

} // namespace

double bessel_j1(double x) {
    if (x < 0.0) {
        return -bessel_j1(-x);
    }
    if (x <= kSeriesLimit) {
        return series(x);
    }
    if (x < kAsymptoticLimit) {
        return backward_recurrence(x);
    }
    return asymptotic(x);
}

} // namespace wptmod::eddy
