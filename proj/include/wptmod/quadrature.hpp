#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature. The interval with the
// largest truncation estimate |K - G| is bisected until the summed estimate
// meets the tolerance or falls under the rounding floor 50 eps Int|f|, which
// bisection cannot lower. The schedule depends only on the integrand values,
// so results are reproducible bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

namespace wptmod::quadrature {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error, roundoff;
    bool operator<(const Interval& other) const { return error < other.error; }
};

template <class F>
Interval gk15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double absolute = std::abs(fc) * kKronrodWeights[7];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double lo = f(centre - dx);
        const double hi = f(centre + dx);
        const double sum = lo + hi;
        kronrod += kKronrodWeights[i] * sum;
        absolute += kKronrodWeights[i] * (std::abs(lo) + std::abs(hi));
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    return Interval{a, b, kronrod, std::abs(kronrod - gauss), 50.0 * 2.2e-16 * absolute * std::abs(half)};
}

} // namespace detail

/// Integrates f over the panels delimited by `breakpoints` (ascending, at
/// least two entries) to max(abs_tol, rel_tol * |I|). abs_error includes the
/// rounding floor. On hitting max_intervals the best estimate is returned
/// with converged = false.
template <class F>
Result adaptive(F&& f, const std::vector<double>& breakpoints, double rel_tol, double abs_tol = 0.0,
                std::size_t max_intervals = 4000) {
    std::priority_queue<detail::Interval> heap;
    double value = 0.0;
    double error = 0.0;
    double roundoff = 0.0;
    auto target = [&](double v, double r) { return std::max({abs_tol, rel_tol * std::abs(v), r}); };
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const detail::Interval panel = detail::gk15(f, breakpoints[i], breakpoints[i + 1]);
        value += panel.value;
        error += panel.error;
        roundoff += panel.roundoff;
        heap.push(panel);
    }
    while (!heap.empty() && error > target(value, roundoff) && heap.size() < max_intervals) {
        const detail::Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Interval left = detail::gk15(f, worst.a, mid);
        const detail::Interval right = detail::gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        roundoff += left.roundoff + right.roundoff - worst.roundoff;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum in ascending order so the result does not carry running-update rounding.
    Result result;
    result.intervals = heap.size();
    std::vector<detail::Interval> leaves;
    leaves.reserve(heap.size());
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    double truncation = 0.0;
    double floor = 0.0;
    for (const auto& leaf : leaves) {
        result.value += leaf.value;
        truncation += leaf.error;
        floor += leaf.roundoff;
    }
    result.abs_error = truncation + floor;
    result.converged = truncation <= target(result.value, floor);
    return result;
}

template <class F>
Result adaptive(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0, std::size_t max_intervals = 4000) {
    return adaptive(std::forward<F>(f), std::vector<double>{a, b}, rel_tol, abs_tol, max_intervals);
}

} // namespace wptmod::quadrature
