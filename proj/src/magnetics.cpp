#include "wptmod/magnetics.hpp"

#include "wptmod/constants.hpp"
#include "wptmod/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace wptmod::magnetics {

using constants::mu0;
using constants::pi;

void SquareLoop::validate() const {
    detail::require_positive(half_side, "loop half_side");
    if (turns < 1) {
        throw ValidationError("loop turns must be >= 1");
    }
}

void CoaxialPair::validate() const {
    primary.validate();
    detail::require_positive(secondary_half_side, "secondary half_side");
    detail::require_positive(separation, "separation");
    if (secondary_turns < 1) {
        throw ValidationError("secondary turns must be >= 1");
    }
}

CoaxialPair CoaxialPair::swapped() const {
    return CoaxialPair{SquareLoop{secondary_half_side, secondary_turns}, primary.half_side, separation,
                       primary.turns};
}

double FieldVector::magnitude() const { return std::hypot(bx, by); }

FieldVector field_components(double magnitude, double theta) {
    return FieldVector{magnitude * std::cos(theta), magnitude * std::sin(theta)};
}

PolarField field_angle(const FieldVector& v) {
    if (v.bx == 0.0 && v.by == 0.0) {
        throw DomainError("field angle undefined for the zero vector");
    }
    double theta = std::atan2(v.by, v.bx);
    if (theta < 0.0) {
        theta += 2.0 * pi;
    }
    // -tiny + 2*pi rounds to exactly 2*pi.
    if (theta >= 2.0 * pi) {
        theta = 0.0;
    }
    return PolarField{v.magnitude(), theta};
}

FieldPhasor b_field_at_origin(std::complex<double> i_a, std::complex<double> i_b, const SquareLoop& coil) {
    coil.validate();
    const double k = -std::sqrt(2.0) * mu0 * coil.turns / (pi * coil.half_side);
    return FieldPhasor{k * i_b, k * i_a};
}

double steering_angle(double i_a_amp, double i_b_amp, double delta_phi, double omega_t) {
    const double num = i_a_amp * std::cos(omega_t + delta_phi);
    const double den = i_b_amp * std::cos(omega_t);
    const double scale = std::max(std::abs(i_a_amp), std::abs(i_b_amp));
    if (std::abs(den) <= 1e-15 * scale || scale == 0.0) {
        throw DomainError("steering angle has a pole: I_B cos(wt) = 0");
    }
    return std::atan(num / den);
}

namespace {

struct Vec3 {
    double x, y, z;
};

Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

struct Segment {
    Vec3 start;
    Vec3 dir; // unit tangent
    double length;
};

// Square contour centred on the z axis, traversed counter-clockwise seen from +z,
// each side cut into `per_side` equal segments.
std::vector<Segment> square_contour(double half_side, double z, int per_side) {
    const std::array<Vec3, 4> corners{Vec3{half_side, -half_side, z}, Vec3{half_side, half_side, z},
                                      Vec3{-half_side, half_side, z}, Vec3{-half_side, -half_side, z}};
    std::vector<Segment> out;
    out.reserve(4 * static_cast<std::size_t>(per_side));
    const double len = 2.0 * half_side / per_side;
    for (std::size_t c = 0; c < 4; ++c) {
        const Vec3 p0 = corners[c];
        const Vec3 p1 = corners[(c + 1) % 4];
        const Vec3 dir = (1.0 / (2.0 * half_side)) * (p1 - p0);
        for (int s = 0; s < per_side; ++s) {
            out.push_back(Segment{p0 + (s * len) * dir, dir, len});
        }
    }
    return out;
}

// Integral of 1/|r - q(u)| for q(u) running along a straight segment.
double segment_potential(const Vec3& r, const Segment& seg) {
    const Vec3 rel = r - seg.start;
    const double along = dot(rel, seg.dir);
    const double rho2 = dot(rel, rel) - along * along;
    if (!(rho2 > 0.0)) {
        throw SingularityError("Neumann integrand singular: contours touch");
    }
    const double rho = std::sqrt(rho2);
    return std::asinh((seg.length - along) / rho) + std::asinh(along / rho);
}

double neumann_contours(const std::vector<Segment>& c1, const std::vector<Segment>& c2) {
    using Rule = boost::math::quadrature::gauss<double, 8>;
    double sum = 0.0;
    for (const auto& s1 : c1) {
        for (const auto& s2 : c2) {
            const double cosang = dot(s1.dir, s2.dir);
            if (cosang == 0.0) {
                continue;
            }
            const double inner = Rule::integrate(
                [&](double t) { return segment_potential(s1.start + t * s1.dir, s2); }, 0.0, s1.length);
            sum += cosang * inner;
        }
    }
    return mu0 / (4.0 * pi) * sum;
}

} // namespace

NeumannResult mutual_inductance_neumann(const CoaxialPair& pair, const NeumannOptions& options) {
    pair.validate();
    if (options.initial_segments < 1 || options.max_refinements < 1 || !(options.relative_tolerance > 0.0)) {
        throw ValidationError("invalid Neumann options");
    }
    const double turns = static_cast<double>(pair.primary.turns) * pair.secondary_turns;

    int n = options.initial_segments;
    double previous = turns * neumann_contours(square_contour(pair.primary.half_side, 0.0, n),
                                               square_contour(pair.secondary_half_side, pair.separation, n));
    double change = 0.0;
    for (int level = 0; level < options.max_refinements; ++level) {
        n *= 2;
        const double current = turns * neumann_contours(square_contour(pair.primary.half_side, 0.0, n),
                                                        square_contour(pair.secondary_half_side, pair.separation, n));
        change = std::abs(current - previous) / std::max(std::abs(current), std::numeric_limits<double>::min());
        if (change < options.relative_tolerance) {
            return NeumannResult{current, change, n};
        }
        previous = current;
    }
    std::ostringstream os;
    os << "Neumann integral did not converge: relative change " << change << " after " << n
       << " segments per side";
    throw ConvergenceError(os.str());
}

namespace {

double single_turn_closed(double a, double b, double h) {
    const double num = (a + b) * (a + b) + h * h;
    const double den = (a - b) * (a - b) + h * h;
    if (den == 0.0) {
        throw SingularityError("closed-form mutual inductance: log singular for a = b, h = 0");
    }
    return 2.0 * mu0 * b / pi * std::log(num / den);
}

} // namespace

double mutual_inductance_coil_coil_closed(const CoaxialPair& pair) {
    pair.primary.validate();
    detail::require_positive(pair.secondary_half_side, "secondary half_side");
    detail::require_non_negative(pair.separation, "separation");
    const double turns = static_cast<double>(pair.primary.turns) * pair.secondary_turns;
    return turns * single_turn_closed(pair.primary.half_side, pair.secondary_half_side, pair.separation);
}

double mutual_inductance_coil_plate(const SquareLoop& primary, double plate_half_side, double separation) {
    primary.validate();
    detail::require_non_negative(plate_half_side, "plate half_side");
    detail::require_positive(separation, "separation");
    const double a = primary.half_side;
    const double b = plate_half_side;
    const double h = separation;
    const double log_minus = std::log(a * a - 2.0 * a * b + b * b + h * h);
    const double log_plus = std::log(a * a + 2.0 * a * b + b * b + h * h);
    const double bracket = a * b + a * h * std::atan((a - b) / h) - a * h * std::atan((a + b) / h) +
                           0.25 * (a * a - b * b - h * h) * (log_minus - log_plus);
    return primary.turns * 4.0 * mu0 / pi * bracket;
}

double mutual_inductance_coil_plate_numeric(const SquareLoop& primary, double plate_half_side, double separation,
                                            int panels) {
    primary.validate();
    detail::require_non_negative(plate_half_side, "plate half_side");
    detail::require_positive(separation, "separation");
    if (panels < 1) {
        throw ValidationError("panels must be >= 1");
    }
    using Rule = boost::math::quadrature::gauss<double, 10>;
    const double width = plate_half_side / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = p * width;
        sum += Rule::integrate(
            [&](double b) { return single_turn_closed(primary.half_side, b, separation); }, lo, lo + width);
    }
    return primary.turns * sum;
}

} // namespace wptmod::magnetics
