#include "wptmod/eddy.hpp"

#include "wptmod/constants.hpp"
#include "wptmod/errors.hpp"

#include "wptmod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace wptmod::eddy {

using constants::mu0;
using constants::pi;

namespace {

// max |J1(x)|, attained near x = 1.8412
constexpr double kJ1Max = 0.58186522428159;

struct PanelSums {
    double im = 0.0;
    double re = 0.0;
    double err_im = 0.0;
    double err_re = 0.0;
    bool converged = true;
};

} // namespace

void MetalMaterial::validate() const {
    detail::require_positive(conductivity, "conductivity");
    if (!(rel_permeability >= 1.0)) {
        throw ValidationError(detail::describe("relative permeability", ">= 1", rel_permeability));
    }
}

void EddyGeometry::validate() const {
    detail::require_positive(coil_half_side, "coil half_side");
    detail::require_positive(plate_distance, "plate distance");
    detail::require_positive(angular_frequency, "angular frequency");
    if (coil_turns < 1) {
        throw ValidationError("coil turns must be >= 1");
    }
}

std::complex<double> phi_k(double k, const EddyGeometry& geom, const MetalMaterial& mat) {
    const double alpha = geom.angular_frequency * mat.conductivity * mu0 * mat.rel_permeability;
    const std::complex<double> root = std::sqrt(std::complex<double>(k * k, alpha));
    const double km = k * mat.rel_permeability;
    // (root - km) / (root + km) rationalised; root ~ km for weak conductors.
    const std::complex<double> sum = root + km;
    return std::complex<double>(k * k - km * km, alpha) / (sum * sum);
}

double geometry_factor(double k, const EddyGeometry& geom) {
    const double v = geom.coil_turns * geom.coil_half_side * bessel_j1(k * geom.coil_half_side);
    return v * v;
}

namespace {

// Integrates Im/Re phi * exp(-2kd) * T over [lo, hi], seeded with panels no
// wider than half the Bessel period and half the decay length.
PanelSums integrate_range(double lo, double hi, const EddyGeometry& geom, const MetalMaterial& mat,
                          const EddyOptions& options) {
    const double d = geom.plate_distance;
    const double width = 0.5 * std::min(pi / geom.coil_half_side, 1.0 / d);
    std::vector<double> breaks{lo};
    while (breaks.back() < hi) {
        breaks.push_back(std::min(hi, breaks.back() + width));
    }
    auto kernel = [&](double k) { return std::exp(-2.0 * k * d) * geometry_factor(k, geom); };
    const auto im = quadrature::adaptive([&](double k) { return phi_k(k, geom, mat).imag() * kernel(k); }, breaks,
                                         options.relative_tolerance, 0.0, options.max_intervals);
    const auto re = quadrature::adaptive([&](double k) { return phi_k(k, geom, mat).real() * kernel(k); }, breaks,
                                         options.relative_tolerance, 0.0, options.max_intervals);
    return PanelSums{im.value, re.value, im.abs_error, re.abs_error, im.converged && re.converged};
}

} // namespace

EddyReport plate_impedance_report(const EddyGeometry& geom, const MetalMaterial& mat, const EddyOptions& options) {
    geom.validate();
    mat.validate();
    if (!(options.relative_tolerance > 0.0) || !(options.tail_tolerance > 0.0)) {
        throw ValidationError("eddy quadrature tolerances must be > 0");
    }

    const double d = geom.plate_distance;
    const double sup_t = std::pow(geom.coil_turns * geom.coil_half_side * kJ1Max, 2);
    // |phi| <= 1, so the neglected tail is bounded by sup T * Int_kmax^inf exp(-2kd) dk.
    auto tail_bound = [&](double k_max) { return sup_t * std::exp(-2.0 * k_max * d) / (2.0 * d); };
    auto required_k_max = [&](double integral) {
        const double target = options.tail_tolerance * std::abs(integral);
        if (target <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        return std::log(sup_t / (2.0 * d * target)) / (2.0 * d);
    };

    double k_max = options.k_max.value_or(20.0 / d);
    if (!(k_max > 0.0)) {
        throw ValidationError("k_max must be > 0");
    }
    PanelSums sums = integrate_range(0.0, k_max, geom, mat, options);

    if (!options.k_max) {
        const double cap = options.k_max_cap_times_d / d;
        for (int iter = 0; iter < 8; ++iter) {
            const double need = std::max(required_k_max(sums.im), required_k_max(sums.re));
            if (need <= k_max) {
                break;
            }
            const double next = std::min(cap, std::max(need, 1.25 * k_max));
            if (next <= k_max) {
                break;
            }
            const PanelSums extra = integrate_range(k_max, next, geom, mat, options);
            sums.im += extra.im;
            sums.re += extra.re;
            sums.err_im += extra.err_im;
            sums.err_re += extra.err_re;
            sums.converged = sums.converged && extra.converged;
            k_max = next;
        }
    }

    const double tail = tail_bound(k_max);
    const double tol_tail_im = options.tail_tolerance * std::abs(sums.im);
    const double tol_tail_re = options.tail_tolerance * std::abs(sums.re);
    if (tail > tol_tail_im || tail > tol_tail_re) {
        std::ostringstream os;
        os << "eddy integral truncation not certified at k_max = " << k_max << " 1/m: tail bound " << tail
           << " exceeds " << options.tail_tolerance << " x integral (Im " << sums.im << ", Re " << sums.re << ")";
        throw ConvergenceError(os.str());
    }
    if (!sums.converged) {
        std::ostringstream os;
        os << "eddy quadrature did not reach relative tolerance " << options.relative_tolerance
           << ": error estimates Im " << sums.err_im << " / " << sums.im << ", Re " << sums.err_re << " / "
           << sums.re;
        throw ConvergenceError(os.str());
    }

    EddyReport report;
    report.impedance.r_m = geom.angular_frequency * pi * mu0 * sums.im;
    report.impedance.l_m = pi * mu0 * sums.re;
    report.k_max = k_max;
    report.tail_bound_r = geom.angular_frequency * pi * mu0 * tail;
    report.tail_bound_l = pi * mu0 * tail;
    report.quadrature_error_r = geom.angular_frequency * pi * mu0 * sums.err_im;
    report.quadrature_error_l = pi * mu0 * sums.err_re;
    return report;
}

} // namespace wptmod::eddy
