#include "wptmod/characteristics.hpp"

#include "wptmod/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace wptmod::characteristics {

void SweepSpec::validate() const {
    if (!(i_min >= 0.0) || !(i_max > i_min)) {
        throw ValidationError("sweep requires 0 <= i_min < i_max");
    }
    if (steps < 2) {
        throw ValidationError("sweep requires at least 2 steps");
    }
    if (label.find(',') != std::string::npos) {
        throw ValidationError("curve labels must not contain commas");
    }
    circuit::validate(receiver);
    tx.validate();
    detail::require_positive(drive.angular_frequency, "angular frequency");
}

CharacteristicCurve sweep_curve(const SweepSpec& spec) {
    spec.validate();
    CharacteristicCurve curve{spec.label, {}};
    curve.points.reserve(static_cast<std::size_t>(spec.steps));
    for (int n = 0; n < spec.steps; ++n) {
        const double current = spec.i_min + (spec.i_max - spec.i_min) * n / (spec.steps - 1);
        circuit::DriveSpec drive = spec.drive;
        drive.amplitude = current;
        try {
            const auto u = circuit::transmitter_voltages(drive, spec.couplings, spec.receiver, spec.tx);
            CurvePoint p;
            p.i_tx = current;
            p.u_a = std::abs(u.u_a);
            p.u_b = std::abs(u.u_b);
            p.u_tx = std::hypot(p.u_a, p.u_b);
            p.p_in = circuit::input_power(drive, spec.couplings, spec.receiver, spec.tx);
            curve.points.push_back(p);
        } catch (const SingularityError& e) {
            std::ostringstream os;
            os << "sweep '" << spec.label << "' at i_tx = " << current << " A: " << e.what();
            throw SingularityError(os.str());
        }
    }
    return curve;
}

CharacteristicCurve add_noise(const CharacteristicCurve& curve, const NoiseSpec& noise) {
    detail::require_non_negative(noise.relative_sigma, "noise relative sigma");
    if (noise.relative_sigma == 0.0) {
        return curve;
    }
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> eps(0.0, noise.relative_sigma);
    CharacteristicCurve out = curve;
    for (auto& p : out.points) {
        const double fu = 1.0 + eps(rng);
        const double fp = 1.0 + eps(rng);
        p.u_tx = std::max(0.0, p.u_tx * fu);
        p.u_a = std::max(0.0, p.u_a * fu);
        p.u_b = std::max(0.0, p.u_b * fu);
        p.p_in = std::max(0.0, p.p_in * fp);
    }
    return out;
}

void write_csv(std::ostream& out, std::span<const CharacteristicCurve> curves) {
    out << "label,i_tx_A,u_tx_V,p_in_W\n";
    char buf[128];
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            std::snprintf(buf, sizeof buf, ",%.15f,%.15f,%.15f\n", p.i_tx, p.u_tx, p.p_in);
            out << c.label << buf;
        }
    }
}

std::vector<CharacteristicCurve> read_csv(std::istream& in) {
    std::vector<CharacteristicCurve> curves;
    std::string line;
    if (!std::getline(in, line) || line.rfind("label,i_tx_A,u_tx_V,p_in_W", 0) != 0) {
        throw ValidationError("curve CSV: missing header 'label,i_tx_A,u_tx_V,p_in_W'");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string label, fi, fu, fp;
        if (!std::getline(ss, label, ',') || !std::getline(ss, fi, ',') || !std::getline(ss, fu, ',') ||
            !std::getline(ss, fp)) {
            throw ValidationError("curve CSV: malformed row " + std::to_string(line_no));
        }
        CurvePoint p;
        try {
            p.i_tx = std::stod(fi);
            p.u_tx = std::stod(fu);
            p.p_in = std::stod(fp);
        } catch (const std::exception&) {
            throw ValidationError("curve CSV: bad number on row " + std::to_string(line_no));
        }
        if (curves.empty() || curves.back().label != label) {
            curves.push_back({label, {}});
        }
        curves.back().points.push_back(p);
    }
    for (const auto& c : curves) {
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            if (!(c.points[i].i_tx > c.points[i - 1].i_tx)) {
                throw ValidationError("curve CSV: currents of '" + c.label + "' are not increasing");
            }
        }
    }
    return curves;
}

} // namespace wptmod::characteristics
