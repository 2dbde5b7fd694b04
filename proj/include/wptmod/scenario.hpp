#pragma once

// Scenario files and the pipeline steps shared by the CLI and the
// acceptance suite: couplings, plate impedances, characteristic curves,
// threshold fitting inputs and labelled test samples.

#include "wptmod/characteristics.hpp"
#include "wptmod/circuit.hpp"
#include "wptmod/detection.hpp"
#include "wptmod/eddy.hpp"
#include "wptmod/materials.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wptmod::scenario {

struct CoilSpec {
    double half_side_m = 0.164;
    int turns = 3;
    double resistance_ohm = 0.1;
    double inductance_h = 10e-6;
    /// Absent: chosen for exact resonance at the scenario frequency.
    std::optional<double> capacitance_f;
};

struct ReceiverCoilSpec {
    CoilSpec coil;
    /// Coaxial distance between transmitter and receiver planes.
    double distance_m = 0.2;
    std::vector<double> load_ohms{1.5, 4.5, 10.0};
};

struct PlateSpec {
    std::string material;
    double half_side_m = 0.1;
    double distance_m = 0.2;
    /// Overrides the database value (e.g. another point of a permeability range).
    std::optional<double> rel_permeability;
};

struct SweepConfig {
    double i_min_a = 0.0;
    double i_max_a = 10.0;
    int steps = 21;
};

struct DetectionConfig {
    int degree = 2;
    double gate_a = 3.0;
    std::vector<double> test_currents_a{3.0, 6.0, 9.0};
};

struct Scenario {
    std::string name = "custom";
    double frequency_hz = 20e3;
    /// Receiver azimuth; the field is steered onto it during sweeps.
    double azimuth_rad = 0.7853981633974483;
    CoilSpec transmitter;
    ReceiverCoilSpec receiver;
    std::vector<PlateSpec> plates;
    SweepConfig sweep;
    characteristics::NoiseSpec noise{0.01, 1};
    DetectionConfig detection;
    eddy::EddyOptions eddy;
    /// Material table path; empty selects the built-in table.
    std::string materials_db;

    double angular_frequency() const;
    void validate() const;
};

/// Built-in reproduction of the two-coil prototype: 328 mm three-turn
/// coils, 10 uH, 20 kHz, receiver and plates 0.2 m away, loads 1.5/4.5/10 ohm,
/// Fe/Cu/Al plates of 100 mm and 200 mm side.
Scenario paper_repro();

/// Parses a scenario document. Unknown keys are rejected.
Scenario from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);

/// Loads a scenario file; the name "paper-repro" selects the built-in one.
/// A relative materials_db path is resolved against the scenario's directory.
Scenario load(const std::string& path_or_name);

eddy::MaterialDatabase load_materials(const Scenario& s);

circuit::TxCoil transmitter_coil(const Scenario& s);

struct CouplingRow {
    std::string receiver;
    double half_side_m = 0.0;
    double separation_m = 0.0;
    double m_coil_closed_h = 0.0;
    double m_coil_neumann_h = 0.0;
    /// Plate rows only (zero for the coil row).
    double m_plate_closed_h = 0.0;
    double m_plate_numeric_h = 0.0;
    /// Single-turn closed-form coil-coil over the plate value, plate rows only.
    double ratio_coil_to_plate = 0.0;
};

std::vector<CouplingRow> compute_couplings(const Scenario& s);

struct ImpedanceRow {
    std::string material;
    double half_side_m = 0.0;
    double distance_m = 0.0;
    double rel_permeability = 1.0;
    std::optional<eddy::EddyReport> report;
    std::string error; ///< convergence diagnostic when report is empty
};

/// Never throws ConvergenceError; failures are carried in the row.
std::vector<ImpedanceRow> compute_impedances(const Scenario& s, const eddy::MaterialDatabase& db);

struct ReceiverCase {
    std::string label; ///< "coil/<load>ohm" or "metal/<material>/<side>mm"
    detection::Truth truth = detection::Truth::Coil;
    circuit::ReceiverModel model;
    circuit::Couplings couplings;
};

/// Coil receivers couple through the Neumann inductance, plates through the
/// stacked-loop closed form; plate R_m/L_m use the plate half side as winding
/// radius with the transmitter turn count. Throws ConvergenceError on eddy failure.
std::vector<ReceiverCase> build_receivers(const Scenario& s, const eddy::MaterialDatabase& db);

characteristics::SweepSpec sweep_spec(const Scenario& s, const ReceiverCase& rx);

struct CurveSet {
    std::vector<characteristics::CharacteristicCurve> metal;
    std::vector<characteristics::CharacteristicCurve> coil;

    std::vector<characteristics::CharacteristicCurve> all() const;
};

/// Noiseless curves for every receiver.
CurveSet build_curves(const Scenario& s, const std::vector<ReceiverCase>& receivers);

/// Splits curves by their label prefix ("metal/" or "coil/").
CurveSet split_curves(const std::vector<characteristics::CharacteristicCurve>& curves);

/// One noisy sample per receiver and current. The noise stream is seeded once
/// and drawn in receiver order, then current order.
std::vector<detection::LabeledSample> build_test_samples(const Scenario& s, const std::vector<ReceiverCase>& receivers,
                                                         const std::vector<double>& currents,
                                                         const characteristics::NoiseSpec& noise);

} // namespace wptmod::scenario
