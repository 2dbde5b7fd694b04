#include "wptmod/detection.hpp"

#include "wptmod/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace wptmod::detection {

using characteristics::CharacteristicCurve;

void ThresholdModel::validate() const {
    if (degree < 1) {
        throw ValidationError("threshold polynomial degree must be >= 1");
    }
    if (p_coefficients.size() != static_cast<std::size_t>(degree) + 1) {
        throw ValidationError("threshold polynomial must have degree + 1 coefficients");
    }
    detail::require_positive(i_min_gate, "minimum-current gate");
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(u_slope) || !finite(u_intercept) || !std::all_of(p_coefficients.begin(), p_coefficients.end(), finite)) {
        throw ValidationError("threshold coefficients must be finite");
    }
}

double ThresholdModel::u_threshold(double i_tx) const { return u_intercept + u_slope * i_tx; }

double ThresholdModel::p_threshold(double i_tx) const { return polyval(p_coefficients, i_tx); }

double polyval(std::span<const double> coefficients, double x) {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree) {
    if (degree < 0) {
        throw ValidationError("polynomial degree must be >= 0");
    }
    if (x.size() != y.size()) {
        throw ValidationError("polyfit: x and y differ in length");
    }
    const auto n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index cols = degree + 1;
    if (n < cols) {
        throw ValidationError("polyfit: need at least degree + 1 points");
    }
    double x_scale = 0.0;
    for (double v : x) {
        x_scale = std::max(x_scale, std::abs(v));
    }
    if (x_scale == 0.0) {
        x_scale = 1.0;
    }

    Eigen::MatrixXd v(n, cols);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double t = x[static_cast<std::size_t>(r)] / x_scale;
        double pw = 1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            v(r, c) = pw;
            pw *= t;
        }
    }
    Eigen::VectorXd col_norm = v.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < cols; ++c) {
        if (col_norm(c) == 0.0) {
            throw ValidationError("polyfit: degenerate abscissae");
        }
        v.col(c) /= col_norm(c);
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), n);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
    if (qr.rank() < cols) {
        throw ValidationError("polyfit: too few distinct abscissae for the requested degree");
    }
    const Eigen::VectorXd z = qr.solve(rhs);

    std::vector<double> coefficients(static_cast<std::size_t>(cols));
    double pw = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        coefficients[static_cast<std::size_t>(c)] = z(c) / (col_norm(c) * pw);
        pw *= x_scale;
    }
    return coefficients;
}

namespace {

struct Envelopes {
    std::vector<double> grid;
    std::vector<double> metal_u, coil_u, metal_p, coil_p;
};

// Linear interpolation of (u, p) at i; the grid must lie inside the curve's span.
std::pair<double, double> resample(const CharacteristicCurve& c, double i) {
    const auto& pts = c.points;
    const double span = pts.back().i_tx - pts.front().i_tx;
    const double slack = 1e-9 * std::max(1.0, std::abs(span));
    if (i < pts.front().i_tx - slack || i > pts.back().i_tx + slack) {
        std::ostringstream os;
        os << "curve '" << c.label << "' does not cover i_tx = " << i << " A";
        throw ValidationError(os.str());
    }
    auto hi = std::lower_bound(pts.begin(), pts.end(), i, [](const auto& p, double v) { return p.i_tx < v; });
    if (hi == pts.end()) {
        return {pts.back().u_tx, pts.back().p_in};
    }
    if (hi->i_tx == i || hi == pts.begin()) {
        return {hi->u_tx, hi->p_in};
    }
    const auto lo = std::prev(hi);
    const double f = (i - lo->i_tx) / (hi->i_tx - lo->i_tx);
    return {lo->u_tx + f * (hi->u_tx - lo->u_tx), lo->p_in + f * (hi->p_in - lo->p_in)};
}

Envelopes build_envelopes(std::span<const CharacteristicCurve> metal, std::span<const CharacteristicCurve> coil) {
    Envelopes env;
    for (const auto& p : metal.front().points) {
        env.grid.push_back(p.i_tx);
    }
    const std::size_t n = env.grid.size();
    env.metal_u.assign(n, -HUGE_VAL);
    env.metal_p.assign(n, -HUGE_VAL);
    env.coil_u.assign(n, HUGE_VAL);
    env.coil_p.assign(n, HUGE_VAL);
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& c : metal) {
            const auto [u, p] = resample(c, env.grid[k]);
            env.metal_u[k] = std::max(env.metal_u[k], u);
            env.metal_p[k] = std::max(env.metal_p[k], p);
        }
        for (const auto& c : coil) {
            const auto [u, p] = resample(c, env.grid[k]);
            env.coil_u[k] = std::min(env.coil_u[k], u);
            env.coil_p[k] = std::min(env.coil_p[k], p);
        }
    }
    return env;
}

void check_curve(const CharacteristicCurve& c) {
    if (c.points.size() < 2) {
        throw ValidationError("curve '" + c.label + "' needs at least two points");
    }
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        if (!(c.points[i].i_tx > c.points[i - 1].i_tx)) {
            throw ValidationError("curve '" + c.label + "' is not sorted by current");
        }
    }
}

} // namespace

ThresholdModel fit_thresholds(std::span<const CharacteristicCurve> metal_curves,
                              std::span<const CharacteristicCurve> coil_curves, const FitOptions& options) {
    if (metal_curves.empty() || coil_curves.empty()) {
        throw ValidationError("threshold fit needs at least one metal and one coil curve");
    }
    if (options.degree < 1) {
        throw ValidationError("threshold polynomial degree must be >= 1");
    }
    detail::require_positive(options.i_min_gate, "minimum-current gate");
    for (const auto& c : metal_curves) {
        check_curve(c);
    }
    for (const auto& c : coil_curves) {
        check_curve(c);
    }

    const Envelopes env = build_envelopes(metal_curves, coil_curves);
    std::size_t gated = 0;
    std::size_t overlap_u = 0;
    std::size_t overlap_p = 0;
    for (std::size_t k = 0; k < env.grid.size(); ++k) {
        if (env.grid[k] < options.i_min_gate) {
            continue;
        }
        ++gated;
        overlap_u += env.metal_u[k] >= env.coil_u[k] ? 1 : 0;
        overlap_p += env.metal_p[k] >= env.coil_p[k] ? 1 : 0;
    }
    if (gated == 0) {
        throw ValidationError("no training grid point at or above the gate current");
    }
    const double frac_u = static_cast<double>(overlap_u) / gated;
    const double frac_p = static_cast<double>(overlap_p) / gated;
    if (frac_u >= options.max_overlap_fraction || frac_p >= options.max_overlap_fraction) {
        std::ostringstream os;
        os << "metal and coil envelopes overlap at " << 100.0 * frac_u << "% (U-I) and " << 100.0 * frac_p
           << "% (P-I) of " << gated << " gated grid points";
        throw NonSeparableError(os.str());
    }

    std::vector<double> mid_u(env.grid.size());
    std::vector<double> mid_p(env.grid.size());
    for (std::size_t k = 0; k < env.grid.size(); ++k) {
        mid_u[k] = 0.5 * (env.metal_u[k] + env.coil_u[k]);
        mid_p[k] = 0.5 * (env.metal_p[k] + env.coil_p[k]);
    }

    ThresholdModel model;
    const auto line = polyfit(env.grid, mid_u, 1);
    model.u_intercept = line[0];
    model.u_slope = line[1];
    model.degree = options.degree;
    model.p_coefficients = polyfit(env.grid, mid_p, options.degree);
    model.i_min_gate = options.i_min_gate;
    return model;
}

Verdict classify(const Sample& sample, const ThresholdModel& model) {
    Verdict v;
    v.u_below = sample.u_tx < model.u_threshold(sample.i_tx);
    v.p_below = sample.p_in < model.p_threshold(sample.i_tx);
    v.gated = sample.i_tx < model.i_min_gate;
    if (v.gated) {
        v.kind = VerdictKind::Indeterminate;
    } else if (v.u_below && v.p_below) {
        v.kind = VerdictKind::Metal;
    } else if (!v.u_below && !v.p_below) {
        v.kind = VerdictKind::Coil;
    } else {
        v.kind = VerdictKind::Indeterminate;
    }
    return v;
}

BatchReport evaluate_batch(std::span<const LabeledSample> samples, const ThresholdModel& model) {
    if (samples.empty()) {
        throw ValidationError("evaluate_batch: empty sample list");
    }
    model.validate();
    BatchReport report;
    report.total = samples.size();
    for (const auto& s : samples) {
        SampleResult r{s, classify(s.sample, model), false};
        const auto t = static_cast<std::size_t>(s.truth);
        const auto k = static_cast<std::size_t>(r.verdict.kind);
        ++report.confusion[t][k];
        if (r.verdict.kind == VerdictKind::Indeterminate) {
            ++report.indeterminate;
        } else {
            ++report.decidable;
            r.correct = (s.truth == Truth::Metal) == (r.verdict.kind == VerdictKind::Metal);
            report.correct += r.correct ? 1 : 0;
        }
        report.details.push_back(std::move(r));
    }
    if (report.decidable > 0) {
        report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.decidable);
    }
    return report;
}

const char* to_string(VerdictKind kind) {
    switch (kind) {
    case VerdictKind::Metal: return "Metal";
    case VerdictKind::Coil: return "Coil";
    case VerdictKind::Indeterminate: return "Indeterminate";
    }
    return "?";
}

const char* to_string(Truth truth) { return truth == Truth::Metal ? "Metal" : "Coil"; }

nlohmann::json to_json(const ThresholdModel& model) {
    return nlohmann::json{
        {"u_line", {{"slope_V_per_A", model.u_slope}, {"intercept_V", model.u_intercept}}},
        {"p_poly", {{"degree", model.degree}, {"coefficients", model.p_coefficients}}},
        {"i_min_gate_A", model.i_min_gate},
    };
}

ThresholdModel threshold_model_from_json(const nlohmann::json& j) {
    ThresholdModel m;
    try {
        m.u_slope = j.at("u_line").at("slope_V_per_A").get<double>();
        m.u_intercept = j.at("u_line").at("intercept_V").get<double>();
        m.degree = j.at("p_poly").at("degree").get<int>();
        m.p_coefficients = j.at("p_poly").at("coefficients").get<std::vector<double>>();
        m.i_min_gate = j.at("i_min_gate_A").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("threshold model JSON: ") + e.what());
    }
    m.validate();
    return m;
}

nlohmann::json to_json(const BatchReport& report) {
    nlohmann::json confusion;
    for (std::size_t t = 0; t < 2; ++t) {
        auto& row = confusion[to_string(static_cast<Truth>(t))];
        for (std::size_t k = 0; k < 3; ++k) {
            row[to_string(static_cast<VerdictKind>(k))] = report.confusion[t][k];
        }
    }
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& r : report.details) {
        samples.push_back({
            {"label", r.input.label},
            {"truth", to_string(r.input.truth)},
            {"i_tx_A", r.input.sample.i_tx},
            {"u_tx_V", r.input.sample.u_tx},
            {"p_in_W", r.input.sample.p_in},
            {"verdict", to_string(r.verdict.kind)},
            {"u_test", r.verdict.u_below ? "below" : "above"},
            {"p_test", r.verdict.p_below ? "below" : "above"},
            {"gated", r.verdict.gated},
            {"correct", r.correct},
        });
    }
    return nlohmann::json{
        {"total", report.total},
        {"decidable", report.decidable},
        {"correct", report.correct},
        {"indeterminate", report.indeterminate},
        {"accuracy", report.accuracy ? nlohmann::json(*report.accuracy) : nlohmann::json(nullptr)},
        {"no_decidable_samples", report.no_decidable_samples()},
        {"confusion", confusion},
        {"samples", samples},
    };
}

void write_report_table(std::ostream& out, const BatchReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s %-6s %8s %12s %12s %-6s %-6s %-14s\n", "label", "truth", "i_tx_A", "u_tx_V",
                  "p_in_W", "u", "p", "verdict");
    out << buf;
    for (const auto& r : report.details) {
        std::snprintf(buf, sizeof buf, "%-24s %-6s %8.3f %12.6f %12.6f %-6s %-6s %-14s\n", r.input.label.c_str(),
                      to_string(r.input.truth), r.input.sample.i_tx, r.input.sample.u_tx, r.input.sample.p_in,
                      r.verdict.u_below ? "below" : "above", r.verdict.p_below ? "below" : "above",
                      r.verdict.gated ? "Indeterminate*" : to_string(r.verdict.kind));
        out << buf;
    }
    out << "(* below the minimum-current gate)\n";
    std::snprintf(buf, sizeof buf, "total %zu, decidable %zu, correct %zu, indeterminate %zu, accuracy %s\n",
                  report.total, report.decidable, report.correct, report.indeterminate,
                  report.accuracy ? std::to_string(*report.accuracy).c_str() : "n/a");
    out << buf;
}

} // namespace wptmod::detection
