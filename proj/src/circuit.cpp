#include "wptmod/circuit.hpp"

#include "wptmod/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <sstream>
#include <string>

namespace wptmod::circuit {

namespace {

constexpr Complex j{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Complex checked_receiver_impedance(const ReceiverModel& rx, double w) {
    const Complex z = receiver_impedance(rx, w);
    if (z == Complex{}) {
        throw SingularityError("receiver impedance is zero");
    }
    return z;
}

} // namespace

TxCoil TxCoil::resonant(double resistance, double inductance, double angular_frequency) {
    detail::require_positive(inductance, "inductance");
    detail::require_positive(angular_frequency, "angular frequency");
    return TxCoil{resistance, inductance, 1.0 / (angular_frequency * angular_frequency * inductance)};
}

void TxCoil::validate() const {
    detail::require_positive(resistance, "transmitter resistance");
    detail::require_positive(inductance, "transmitter inductance");
    detail::require_positive(capacitance, "transmitter capacitance");
}

double TxCoil::reactance(double w) const { return w * inductance - 1.0 / (w * capacitance); }

Complex TxCoil::impedance(double w) const { return {resistance, reactance(w)}; }

bool TxCoil::is_resonant(double w, double rel_tol) const {
    return std::abs(w * w * inductance * capacitance - 1.0) <= rel_tol;
}

CoilReceiver CoilReceiver::resonant(double resistance, double inductance, double load, double angular_frequency) {
    const TxCoil c = TxCoil::resonant(resistance, inductance, angular_frequency);
    return CoilReceiver{resistance, inductance, c.capacitance, load};
}

void validate(const ReceiverModel& rx) {
    std::visit(overloaded{[](const CoilReceiver& c) {
                              detail::require_positive(c.resistance, "receiver coil resistance");
                              detail::require_positive(c.inductance, "receiver coil inductance");
                              detail::require_positive(c.capacitance, "receiver coil capacitance");
                              detail::require_positive(c.load, "receiver load");
                          },
                          [](const MetalReceiver& m) {
                              detail::require_non_negative(m.r_m, "metal R_m");
                              if (!std::isfinite(m.l_m)) {
                                  throw ValidationError("metal L_m must be finite");
                              }
                          }},
               rx);
}

Complex receiver_impedance(const ReceiverModel& rx, double w) {
    return std::visit(overloaded{[w](const CoilReceiver& c) {
                                     return Complex{c.resistance + c.load,
                                                    w * c.inductance - 1.0 / (w * c.capacitance)};
                                 },
                                 [w](const MetalReceiver& m) { return Complex{m.r_m, w * m.l_m}; }},
                      rx);
}

double receiver_resistance(const ReceiverModel& rx) {
    return std::visit(overloaded{[](const CoilReceiver& c) { return c.resistance + c.load; },
                                 [](const MetalReceiver& m) { return m.r_m; }},
                      rx);
}

void DriveSpec::validate() const {
    detail::require_positive(angular_frequency, "angular frequency");
    detail::require_non_negative(amplitude, "drive amplitude");
}

Couplings Couplings::aligned(double m, double azimuth) { return {m * std::sin(azimuth), m * std::cos(azimuth)}; }

double Couplings::magnitude() const { return std::hypot(m_ac, m_bc); }

TransmitterCurrents current_decomposition(const DriveSpec& drive) {
    const double ia = drive.amplitude * std::sin(drive.steering);
    const double ib = drive.amplitude * std::cos(drive.steering);
    return {ia * std::exp(j * drive.phase_offset), Complex{ib, 0.0}};
}

namespace {

// M_AC I_A + M_BC I_B
Complex coupled_current(const DriveSpec& drive, const Couplings& c) {
    if (drive.phase_offset == 0.0) {
        const double m = c.magnitude();
        return drive.amplitude * m * std::sin(drive.steering + std::atan2(c.m_bc, c.m_ac));
    }
    const TransmitterCurrents i = current_decomposition(drive);
    return c.m_ac * i.i_a + c.m_bc * i.i_b;
}

} // namespace

Complex receiver_current(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx) {
    drive.validate();
    validate(rx);
    const double w = drive.angular_frequency;
    return j * w * coupled_current(drive, couplings) / checked_receiver_impedance(rx, w);
}

double input_power(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx, const TxCoil& tx) {
    tx.validate();
    const Complex ic = receiver_current(drive, couplings, rx);
    return drive.amplitude * drive.amplitude * tx.resistance + std::norm(ic) * receiver_resistance(rx);
}

TransmitterVoltages transmitter_voltages(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx,
                                         const TxCoil& tx) {
    drive.validate();
    validate(rx);
    tx.validate();
    const double w = drive.angular_frequency;
    const Complex z = tx.impedance(w);
    const Complex reflected = w * w * coupled_current(drive, couplings) / checked_receiver_impedance(rx, w);
    const TransmitterCurrents i = current_decomposition(drive);
    return {z * i.i_a + couplings.m_ac * reflected, z * i.i_b + couplings.m_bc * reflected};
}

PhasorSolution solve_full_system(Complex u_a, Complex u_b, double w, const Couplings& couplings,
                                 const ReceiverModel& rx, const TxPair& tx) {
    detail::require_positive(w, "angular frequency");
    validate(rx);
    tx.a.validate();
    tx.b.validate();

    Eigen::Matrix3cd a;
    a << tx.a.impedance(w), 0.0, -j * w * couplings.m_ac,
         0.0, tx.b.impedance(w), -j * w * couplings.m_bc,
         -j * w * couplings.m_ac, -j * w * couplings.m_bc, receiver_impedance(rx, w);
    const Eigen::Vector3cd rhs(u_a, u_b, 0.0);
    const Eigen::FullPivLU<Eigen::Matrix3cd> lu(a);
    if (!lu.isInvertible()) {
        throw SingularityError("coupled system matrix is singular");
    }
    const Eigen::Vector3cd x = lu.solve(rhs);

    PhasorSolution s;
    s.i_a = x(0);
    s.i_b = x(1);
    s.i_c = x(2);
    s.u_a = u_a;
    s.u_b = u_b;
    s.u_p = -j * w * couplings.m_ac * s.i_c; // seen by coil A; coil B term is -jw M_BC I_C
    s.u_s = j * w * (couplings.m_ac * s.i_a + couplings.m_bc * s.i_b);
    s.p_in = (u_a * std::conj(s.i_a)).real() + (u_b * std::conj(s.i_b)).real();
    return s;
}

PhasorSolution solve_full_system(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx,
                                 const TxCoil& tx) {
    const TransmitterCurrents i = current_decomposition(drive);
    const TransmitterVoltages u = transmitter_voltages(drive, couplings, rx, tx);
    const double w = drive.angular_frequency;
    PhasorSolution s;
    s.i_a = i.i_a;
    s.i_b = i.i_b;
    s.i_c = receiver_current(drive, couplings, rx);
    s.u_a = u.u_a;
    s.u_b = u.u_b;
    s.u_p = -j * w * couplings.m_ac * s.i_c;
    s.u_s = j * w * (couplings.m_ac * s.i_a + couplings.m_bc * s.i_b);
    s.p_in = input_power(drive, couplings, rx, tx);
    return s;
}

Complex reflected_impedance(double w, double m, const ReceiverModel& rx) {
    return w * w * m * m / checked_receiver_impedance(rx, w);
}

PhasorSolution solve_single_coil(Complex u_i, double w, double m, const ReceiverModel& rx, const TxCoil& tx) {
    detail::require_positive(w, "angular frequency");
    validate(rx);
    tx.validate();
    const Complex z2 = checked_receiver_impedance(rx, w);
    const Complex z_in = tx.impedance(w) + w * w * m * m / z2;
    if (z_in == Complex{}) {
        throw SingularityError("single-coil input impedance is zero");
    }
    PhasorSolution s;
    s.i_a = u_i / z_in;
    s.i_c = j * w * m * s.i_a / z2;
    s.u_a = u_i;
    s.u_p = -j * w * m * s.i_c;
    s.u_s = j * w * m * s.i_a;
    s.p_in = (u_i * std::conj(s.i_a)).real();
    return s;
}

PhasorSolution solve_single_coil_current(Complex i_1, double w, double m, const ReceiverModel& rx, const TxCoil& tx) {
    detail::require_positive(w, "angular frequency");
    validate(rx);
    tx.validate();
    const Complex z2 = checked_receiver_impedance(rx, w);
    PhasorSolution s;
    s.i_a = i_1;
    s.i_c = j * w * m * i_1 / z2;
    s.u_p = -j * w * m * s.i_c;
    s.u_s = j * w * m * i_1;
    s.u_a = tx.impedance(w) * i_1 + s.u_p;
    s.p_in = (s.u_a * std::conj(s.i_a)).real();
    return s;
}

namespace {

double real_ratio(Complex num, Complex den, const char* name, double rel_tol) {
    if (den == Complex{} || num == Complex{}) {
        throw EquivalenceError(std::string(name) + " undefined: zero quantity");
    }
    const Complex k = num / den;
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag()) || std::abs(k.imag()) > rel_tol * std::abs(k)) {
        std::ostringstream os;
        os << name << " is not a real scale factor: " << k.real() << " + " << k.imag() << "j";
        throw EquivalenceError(os.str());
    }
    return k.real();
}

void require_close(double lhs, double rhs, const char* relation, double rel_tol) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (std::abs(lhs - rhs) > rel_tol * scale) {
        std::ostringstream os;
        os << "equivalence violated: " << relation << " (" << lhs << " vs " << rhs << ")";
        throw EquivalenceError(os.str());
    }
}

} // namespace

EquivalenceConstants equivalence_constants(const FullOperatingPoint& full, const ReducedOperatingPoint& reduced,
                                           double rel_tol) {
    if (full.drive.phase_offset != 0.0) {
        throw ValidationError("equivalence requires in-phase transmitter currents");
    }
    const double w = full.drive.angular_frequency;
    const double theta = full.drive.steering;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const PhasorSolution& f = full.solution;
    const PhasorSolution& r = reduced.solution;

    EquivalenceConstants k;
    k.k1 = real_ratio(s * f.u_a + c * f.u_b, r.u_a, "K1", rel_tol);
    k.k2 = real_ratio(f.i_c, r.i_c, "K2", rel_tol);
    k.k3 = real_ratio(full.couplings.m_bc * c + full.couplings.m_ac * s, reduced.m, "K3", rel_tol);
    k.k4 = real_ratio(full.drive.amplitude, r.i_a, "K4", rel_tol);
    k.k5 = real_ratio(full.tx.impedance(w), reduced.tx.impedance(w), "K5", rel_tol);
    k.k6 = real_ratio(receiver_impedance(full.rx, w), receiver_impedance(reduced.rx, w), "K6", rel_tol);

    require_close(k.k1, k.k2 * k.k3, "K1 = K2 K3", rel_tol);
    require_close(k.k1, k.k4 * k.k5, "K1 = K4 K5", rel_tol);
    require_close(k.k3 * k.k4, k.k2 * k.k6, "K3 K4 = K2 K6", rel_tol);
    return k;
}

} // namespace wptmod::circuit
