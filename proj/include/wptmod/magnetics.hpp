#pragma once

// Field steering for the orthogonal transmitter pair and mutual inductance
// between coaxial square loops (and between a loop and a coaxial plate).

#include <complex>

namespace wptmod::magnetics {

/// Square coil of side 2 * half_side [m] with `turns` thin turns.
struct SquareLoop {
    double half_side = 0.0;
    int turns = 1;

    void validate() const;
};

/// Two parallel, centred square loops whose planes are `separation` apart.
struct CoaxialPair {
    SquareLoop primary;
    double secondary_half_side = 0.0;
    double separation = 0.0;
    int secondary_turns = 1;

    void validate() const;
    /// Same geometry with primary and secondary exchanged.
    CoaxialPair swapped() const;
};

/// Receiver position in the transmitter plane (distance from origin, azimuth from +X).
struct ReceiverPose {
    double distance = 0.0;
    double azimuth = 0.0;
};

/// In-plane flux density [T].
struct FieldVector {
    double bx = 0.0;
    double by = 0.0;

    double magnitude() const;
};

struct PolarField {
    double magnitude = 0.0;
    double theta = 0.0; ///< [0, 2*pi)
};

/// Phasor flux density at the origin [T].
struct FieldPhasor {
    std::complex<double> bx;
    std::complex<double> by;
};

FieldVector field_components(double magnitude, double theta);

/// Inverse of field_components. Throws DomainError for the zero vector.
PolarField field_angle(const FieldVector& v);

/// Flux density at the centre of the pair. B_x is produced by coil B and
/// B_y by coil A.
FieldPhasor b_field_at_origin(std::complex<double> i_a, std::complex<double> i_b, const SquareLoop& coil);

/// Instantaneous steering angle atan(I_A cos(wt + dphi) / (I_B cos(wt))).
/// Result lies in (-pi/2, pi/2]; throws DomainError when the denominator vanishes.
double steering_angle(double i_a_amp, double i_b_amp, double delta_phi, double omega_t);

struct NeumannOptions {
    /// Stop when two successive refinements differ by less than this (relative).
    double relative_tolerance = 1e-3;
    int initial_segments = 1;
    int max_refinements = 10;
};

struct NeumannResult {
    double inductance = 0.0;
    /// Relative change between the last two refinement levels.
    double last_relative_change = 0.0;
    int segments_per_side = 0;
};

/// Neumann double line integral over both square contours, including N1*N2.
/// Throws ConvergenceError when max_refinements is exhausted.
NeumannResult mutual_inductance_neumann(const CoaxialPair& pair, const NeumannOptions& options = {});

/// Infinite-wire approximation:
///   M = N1 N2 (4 mu0 b / pi) ln( sqrt( ((a+b)^2 + h^2) / ((a-b)^2 + h^2) ) ).
/// Overestimates the Neumann value; roughly 2x for the a = 0.164, b = 0.1, h = 0.2 geometry.
double mutual_inductance_coil_coil_closed(const CoaxialPair& pair);

/// Plate modelled as a stack of single-turn square loops of half side 0..b,
/// integrated in closed form. Result carries the primary turn count. Note the
/// stack integral is taken over b itself, so the value has units of H*m.
double mutual_inductance_coil_plate(const SquareLoop& primary, double plate_half_side, double separation);

/// Same quantity by composite Gauss-Legendre integration of the closed-form
/// coil-coil inductance over b' in [0, b].
double mutual_inductance_coil_plate_numeric(const SquareLoop& primary, double plate_half_side, double separation,
                                            int panels = 64);

} // namespace wptmod::magnetics
