#pragma once

// Equivalent series R_m / L_m of a conducting half-space (metal plate) under
// a flat transmitter winding, from a spatial-frequency (Hankel) integral:
//
//   R_m = w pi mu0 Int_0^inf Im phi(k) exp(-2 k d) T(k) dk
//   L_m =   pi mu0 Int_0^inf Re phi(k) exp(-2 k d) T(k) dk
//
//   phi(k) = (sqrt(k^2 + j w sigma mu0 mu_r) - k mu_r) / (sqrt(k^2 + j w sigma mu0 mu_r) + k mu_r)
//   T(k)   = (N a J1(k a))^2

#include "wptmod/bessel.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <string>

namespace wptmod::eddy {

struct MetalMaterial {
    std::string name;
    double conductivity = 0.0;     ///< [S/m]
    double rel_permeability = 1.0; ///< dimensionless, >= 1

    void validate() const;
};

struct EddyGeometry {
    double coil_half_side = 0.0;    ///< a [m]
    int coil_turns = 1;             ///< N
    double plate_distance = 0.0;    ///< d [m], winding-to-plate
    double angular_frequency = 0.0; ///< w [rad/s]

    void validate() const;
};

struct EddyImpedance {
    double r_m = 0.0; ///< [ohm]
    double l_m = 0.0; ///< [H]; sign is reported as computed
};

struct EddyOptions {
    /// Relative tolerance of each adaptive Gauss-Kronrod integral.
    double relative_tolerance = 1e-10;
    /// Required ratio of the truncated-tail bound to each integral.
    double tail_tolerance = 1e-12;
    /// Force a truncation point instead of choosing one from the tail bound.
    std::optional<double> k_max;
    /// Upper limit on automatically chosen k_max, in units of 1/d.
    double k_max_cap_times_d = 400.0;
    std::size_t max_intervals = 4000;
};

struct EddyReport {
    EddyImpedance impedance;
    double k_max = 0.0;
    double tail_bound_r = 0.0; ///< bound on the neglected part of R_m [ohm]
    double tail_bound_l = 0.0; ///< bound on the neglected part of L_m [H]
    double quadrature_error_r = 0.0;
    double quadrature_error_l = 0.0;
};

std::complex<double> phi_k(double k, const EddyGeometry& geom, const MetalMaterial& mat);

/// T(k) = (N a J1(k a))^2.
double geometry_factor(double k, const EddyGeometry& geom);

/// Throws ConvergenceError if the tail bound or the panel quadrature misses its tolerance.
EddyReport plate_impedance_report(const EddyGeometry& geom, const MetalMaterial& mat, const EddyOptions& options = {});

inline EddyImpedance plate_impedance(const EddyGeometry& geom, const MetalMaterial& mat,
                                     const EddyOptions& options = {}) {
    return plate_impedance_report(geom, mat, options).impedance;
}

} // namespace wptmod::eddy
