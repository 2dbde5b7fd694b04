#pragma once

// U-I and P-I characteristic curves obtained by sweeping the transmitter
// current amplitude for a fixed receiver.

#include "wptmod/circuit.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wptmod::characteristics {

struct SweepSpec {
    double i_min = 0.0;
    double i_max = 10.0;
    int steps = 21;
    /// Amplitude is overwritten per point; steering should equal the receiver azimuth.
    circuit::DriveSpec drive;
    circuit::ReceiverModel receiver;
    circuit::Couplings couplings;
    circuit::TxCoil tx;
    std::string label;

    void validate() const;
};

struct CurvePoint {
    double i_tx = 0.0; ///< drive amplitude I [A]
    /// Equivalent single-coil voltage sqrt(|U_A|^2 + |U_B|^2) [V].
    double u_tx = 0.0;
    double p_in = 0.0; ///< [W]
    double u_a = 0.0;  ///< |U_A| [V]
    double u_b = 0.0;  ///< |U_B| [V]
};

struct CharacteristicCurve {
    std::string label;
    std::vector<CurvePoint> points;
};

struct NoiseSpec {
    double relative_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Evenly spaced sweep from i_min to i_max. Circuit errors are rethrown with
/// the offending current attached.
CharacteristicCurve sweep_curve(const SweepSpec& spec);

/// Multiplies voltages and power by (1 + eps), eps ~ N(0, relative_sigma),
/// one draw for the voltages and one for the power per point, in order.
/// Values are clipped at zero.
CharacteristicCurve add_noise(const CharacteristicCurve& curve, const NoiseSpec& noise);

/// `label,i_tx_A,u_tx_V,p_in_W` with header, fixed notation, 15 decimals.
void write_csv(std::ostream& out, std::span<const CharacteristicCurve> curves);

/// Inverse of write_csv; consecutive rows with the same label form one curve.
std::vector<CharacteristicCurve> read_csv(std::istream& in);

} // namespace wptmod::characteristics
