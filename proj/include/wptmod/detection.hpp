#pragma once

// Threshold curves separating metal from legitimate receivers in the U-I and
// P-I planes, and the classifier built on them.

#include "wptmod/characteristics.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wptmod::detection {

struct ThresholdModel {
    double u_slope = 0.0;     ///< [V/A]
    double u_intercept = 0.0; ///< [V]
    int degree = 2;
    /// Ascending powers of current; size degree + 1.
    std::vector<double> p_coefficients;
    double i_min_gate = 3.0; ///< [A]

    void validate() const;
    double u_threshold(double i_tx) const;
    double p_threshold(double i_tx) const;
};

struct Sample {
    double i_tx = 0.0;
    double u_tx = 0.0;
    double p_in = 0.0;
};

enum class VerdictKind { Metal, Coil, Indeterminate };

struct Verdict {
    VerdictKind kind = VerdictKind::Indeterminate;
    bool gated = false;   ///< current below the validity gate
    bool u_below = false; ///< u_tx strictly below the U-I threshold
    bool p_below = false; ///< p_in strictly below the P-I threshold
};

struct FitOptions {
    int degree = 2;
    double i_min_gate = 3.0;
    /// Fraction of gated grid points at which the class envelopes may touch or cross.
    double max_overlap_fraction = 0.10;
};

/// Least-squares polynomial through (x, y), ascending coefficients. The
/// Vandermonde columns are scaled to unit norm before a column-pivoted QR solve.
std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree);
double polyval(std::span<const double> coefficients, double x);

/// Fits the U-I line and P-I polynomial through the midpoints between the
/// upper metal envelope and the lower coil envelope on a common current grid
/// (the first metal curve's grid; other curves are linearly resampled).
/// Throws NonSeparableError when the envelopes overlap at max_overlap_fraction
/// or more of the grid points at or above the gate.
ThresholdModel fit_thresholds(std::span<const characteristics::CharacteristicCurve> metal_curves,
                              std::span<const characteristics::CharacteristicCurve> coil_curves,
                              const FitOptions& options = {});

/// Metal iff both quantities are strictly below their thresholds, Coil iff
/// neither is, Indeterminate when they disagree or the current is gated.
Verdict classify(const Sample& sample, const ThresholdModel& model);

enum class Truth { Metal, Coil };

struct LabeledSample {
    std::string label;
    Truth truth = Truth::Metal;
    Sample sample;
};

struct SampleResult {
    LabeledSample input;
    Verdict verdict;
    bool correct = false;
};

struct BatchReport {
    /// confusion[truth][verdict]; truth 0 = Metal, 1 = Coil; verdict indexes VerdictKind.
    std::array<std::array<std::size_t, 3>, 2> confusion{};
    std::size_t total = 0;
    std::size_t decidable = 0;
    std::size_t correct = 0;
    std::size_t indeterminate = 0;
    /// correct / decidable; empty when nothing was decidable.
    std::optional<double> accuracy;
    std::vector<SampleResult> details;

    bool no_decidable_samples() const { return decidable == 0; }
};

/// Throws ValidationError on an empty batch.
BatchReport evaluate_batch(std::span<const LabeledSample> samples, const ThresholdModel& model);

const char* to_string(VerdictKind kind);
const char* to_string(Truth truth);

nlohmann::json to_json(const ThresholdModel& model);
ThresholdModel threshold_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BatchReport& report);

/// Fixed-width table, one row per sample followed by the confusion summary.
void write_report_table(std::ostream& out, const BatchReport& report);

} // namespace wptmod::detection
