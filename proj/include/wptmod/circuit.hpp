#pragma once

// Phasor model of two orthogonal series-resonant transmitter coils (A, B)
// coupled to one receiver (C), and of its single coaxial transmitter reduction.
//
// Coupled equations, with Z = R + jX for each branch:
//   U_A + jw M_AC I_C = Z_A I_A
//   U_B + jw M_BC I_C = Z_B I_B
//   jw M_AC I_A + jw M_BC I_B = Z_C I_C
//
// Phasors are RMS-scaled, so the real input power is Re(U_A I_A*) + Re(U_B I_B*).
// The A-B mutual inductance is taken as zero (orthogonal coils).

#include <complex>
#include <variant>

namespace wptmod::circuit {

using Complex = std::complex<double>;

/// Series R-L-C transmitter branch.
struct TxCoil {
    double resistance = 0.1;
    double inductance = 10e-6;
    double capacitance = 0.0;

    /// Capacitance chosen so that w^2 L C = 1.
    static TxCoil resonant(double resistance, double inductance, double angular_frequency);

    void validate() const;
    double reactance(double angular_frequency) const;
    Complex impedance(double angular_frequency) const;
    bool is_resonant(double angular_frequency, double rel_tol = 1e-9) const;
};

struct TxPair {
    TxCoil a;
    TxCoil b;
};

/// Receiver coil with series resonant capacitor and resistive load.
struct CoilReceiver {
    double resistance = 0.1;
    double inductance = 10e-6;
    double capacitance = 0.0;
    double load = 0.0;

    static CoilReceiver resonant(double resistance, double inductance, double load, double angular_frequency);
};

/// Metal plate as an equivalent series R-L.
struct MetalReceiver {
    double r_m = 0.0;
    double l_m = 0.0;
};

using ReceiverModel = std::variant<CoilReceiver, MetalReceiver>;

void validate(const ReceiverModel& rx);
/// R_C + R_L + jX_C for a coil, R_m + jw L_m for metal.
Complex receiver_impedance(const ReceiverModel& rx, double angular_frequency);
/// Resistance that dissipates |I_C|^2 * R in the receiver.
double receiver_resistance(const ReceiverModel& rx);

struct DriveSpec {
    double angular_frequency = 0.0;
    double amplitude = 0.0; ///< I
    double steering = 0.0;  ///< theta
    double phase_offset = 0.0;

    void validate() const;
};

struct Couplings {
    double m_ac = 0.0;
    double m_bc = 0.0;

    /// Splits a coaxial-equivalent coupling m over the two transmitters for a
    /// receiver at `azimuth`: M_AC = m sin(azimuth), M_BC = m cos(azimuth).
    static Couplings aligned(double m, double azimuth);
    double magnitude() const;
};

/// Operating point. For the single-coil model i_a/u_a hold I_1/U_i, i_c holds
/// I_2 and i_b/u_b are zero. u_p/u_s are the mutual-inductance voltages seen
/// by the transmitter and induced in the receiver.
struct PhasorSolution {
    Complex i_a, i_b, i_c;
    Complex u_a, u_b;
    Complex u_p, u_s;
    double p_in = 0.0;
};

struct TransmitterCurrents {
    Complex i_a;
    Complex i_b;
};

struct TransmitterVoltages {
    Complex u_a;
    Complex u_b;
};

/// I_A = I sin(theta) e^{j dphi}, I_B = I cos(theta).
TransmitterCurrents current_decomposition(const DriveSpec& drive);

/// I_C = jw I sqrt(M_AC^2 + M_BC^2) sin(theta + atan2(M_BC, M_AC)) / Z_C.
/// Throws SingularityError when Z_C = 0.
Complex receiver_current(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx);

/// P_in = I^2 R + |I_C|^2 Re(Z_C) for identical transmitters of resistance R.
double input_power(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx, const TxCoil& tx);

/// Source voltages needed to drive the currents of `drive`, including the
/// reflected term w^2 M_xC (M_AC I_A + M_BC I_B) / Z_C.
TransmitterVoltages transmitter_voltages(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx,
                                         const TxCoil& tx);

/// Voltage-driven dense 3x3 solve. Throws SingularityError for a singular system.
PhasorSolution solve_full_system(Complex u_a, Complex u_b, double angular_frequency, const Couplings& couplings,
                                 const ReceiverModel& rx, const TxPair& tx);

/// Current-driven form: currents from `drive`, voltages from the closed forms.
PhasorSolution solve_full_system(const DriveSpec& drive, const Couplings& couplings, const ReceiverModel& rx,
                                 const TxCoil& tx);

/// Single coaxial transmitter, voltage driven: I_1 = U_i / (Z_1 + w^2 M^2 / Z_2).
PhasorSolution solve_single_coil(Complex u_i, double angular_frequency, double m, const ReceiverModel& rx,
                                 const TxCoil& tx);

/// Single coaxial transmitter, current driven.
PhasorSolution solve_single_coil_current(Complex i_1, double angular_frequency, double m, const ReceiverModel& rx,
                                         const TxCoil& tx);

/// Reflected impedance w^2 M^2 / Z_2.
Complex reflected_impedance(double angular_frequency, double m, const ReceiverModel& rx);

struct FullOperatingPoint {
    DriveSpec drive;
    Couplings couplings;
    ReceiverModel rx;
    TxCoil tx;
    PhasorSolution solution;
};

struct ReducedOperatingPoint {
    double m = 0.0;
    ReceiverModel rx;
    TxCoil tx;
    PhasorSolution solution;
};

struct EquivalenceConstants {
    double k1 = 0.0; ///< (sin(theta) U_A + cos(theta) U_B) = K1 U_i
    double k2 = 0.0; ///< I_C = K2 I_2
    double k3 = 0.0; ///< M_BC cos(theta) + M_AC sin(theta) = K3 M
    double k4 = 0.0; ///< I = K4 I_1
    double k5 = 0.0; ///< R + jX = K5 (R_1 + jX_1)
    double k6 = 0.0; ///< R_C + R_L + jX_C = K6 (R_2 + R_l + jX_2)
};

/// Scale factors mapping the two-transmitter operating point onto the
/// single-coil one. Each must be real and the set must satisfy
/// K1 = K2 K3 = K4 K5 and K3 K4 = K2 K6 to `rel_tol`; otherwise
/// EquivalenceError. Requires zero phase offset.
EquivalenceConstants equivalence_constants(const FullOperatingPoint& full, const ReducedOperatingPoint& reduced,
                                           double rel_tol = 1e-9);

} // namespace wptmod::circuit
