#include "wptmod/scenario.hpp"

#include "wptmod/constants.hpp"
#include "wptmod/errors.hpp"
#include "wptmod/magnetics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

namespace wptmod::scenario {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ValidationError(where + " must be a JSON object");
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!keys.count(key)) {
            throw ValidationError("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + "." + key + " is missing or has the wrong type");
    }
}

template <class T>
void get_opt(const json& j, const char* key, const std::string& where, T& out) {
    if (j.contains(key)) {
        out = get<T>(j, key, where);
    }
}

template <class T>
void get_opt(const json& j, const char* key, const std::string& where, std::optional<T>& out) {
    if (j.contains(key)) {
        out = get<T>(j, key, where);
    }
}

void parse_coil(const json& j, const std::string& where, CoilSpec& c) {
    get_opt(j, "half_side_m", where, c.half_side_m);
    get_opt(j, "turns", where, c.turns);
    get_opt(j, "resistance_ohm", where, c.resistance_ohm);
    get_opt(j, "inductance_h", where, c.inductance_h);
    get_opt(j, "capacitance_f", where, c.capacitance_f);
}

json coil_json(const CoilSpec& c) {
    json j{{"half_side_m", c.half_side_m},
           {"turns", c.turns},
           {"resistance_ohm", c.resistance_ohm},
           {"inductance_h", c.inductance_h}};
    if (c.capacitance_f) {
        j["capacitance_f"] = *c.capacitance_f;
    }
    return j;
}

void validate_coil(const CoilSpec& c, const std::string& where) {
    detail::require_positive(c.half_side_m, (where + " half side").c_str());
    if (c.turns < 1) {
        throw ValidationError(where + " turns must be >= 1");
    }
    detail::require_positive(c.resistance_ohm, (where + " resistance").c_str());
    detail::require_positive(c.inductance_h, (where + " inductance").c_str());
    if (c.capacitance_f) {
        detail::require_positive(*c.capacitance_f, (where + " capacitance").c_str());
    }
}

std::string format_number(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

circuit::CoilReceiver receiver_coil(const Scenario& s, double load) {
    const double w = s.angular_frequency();
    const CoilSpec& c = s.receiver.coil;
    if (c.capacitance_f) {
        return circuit::CoilReceiver{c.resistance_ohm, c.inductance_h, *c.capacitance_f, load};
    }
    return circuit::CoilReceiver::resonant(c.resistance_ohm, c.inductance_h, load, w);
}

double plate_permeability(const PlateSpec& p, const eddy::MaterialDatabase& db) {
    return p.rel_permeability ? *p.rel_permeability : db.find(p.material).material.rel_permeability;
}

eddy::MetalMaterial plate_material(const PlateSpec& p, const eddy::MaterialDatabase& db) {
    eddy::MetalMaterial m = db.find(p.material).material;
    m.rel_permeability = plate_permeability(p, db);
    return m;
}

eddy::EddyGeometry plate_geometry(const Scenario& s, const PlateSpec& p) {
    return eddy::EddyGeometry{p.half_side_m, s.transmitter.turns, p.distance_m, s.angular_frequency()};
}

std::string plate_label(const PlateSpec& p, const eddy::MaterialDatabase& db) {
    return "metal/" + db.find(p.material).material.name + "/" + format_number("%.0f", 2000.0 * p.half_side_m) + "mm";
}

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

} // namespace

double Scenario::angular_frequency() const { return 2.0 * constants::pi * frequency_hz; }

void Scenario::validate() const {
    detail::require_positive(frequency_hz, "frequency");
    if (!std::isfinite(azimuth_rad)) {
        throw ValidationError("azimuth must be finite");
    }
    validate_coil(transmitter, "transmitter");
    validate_coil(receiver.coil, "receiver coil");
    detail::require_positive(receiver.distance_m, "receiver distance");
    for (double r : receiver.load_ohms) {
        detail::require_positive(r, "receiver load");
    }
    for (const PlateSpec& p : plates) {
        if (p.material.empty()) {
            throw ValidationError("plate material must be named");
        }
        detail::require_positive(p.half_side_m, "plate half side");
        detail::require_positive(p.distance_m, "plate distance");
        if (p.rel_permeability && !(*p.rel_permeability >= 1.0)) {
            throw ValidationError(detail::describe("plate relative permeability", "must be >= 1", *p.rel_permeability));
        }
    }
    if (receiver.load_ohms.empty() && plates.empty()) {
        throw ValidationError("scenario has no receivers");
    }
    detail::require_non_negative(sweep.i_min_a, "sweep i_min");
    if (!(sweep.i_max_a > sweep.i_min_a)) {
        throw ValidationError("sweep i_max must exceed i_min");
    }
    if (sweep.steps < 2) {
        throw ValidationError("sweep needs at least 2 steps");
    }
    detail::require_non_negative(noise.relative_sigma, "noise sigma");
    if (detection.degree < 1) {
        throw ValidationError("detection degree must be >= 1");
    }
    detail::require_non_negative(detection.gate_a, "detection gate");
    for (double i : detection.test_currents_a) {
        detail::require_non_negative(i, "test current");
    }
    detail::require_positive(eddy.relative_tolerance, "eddy relative tolerance");
    if (eddy.k_max) {
        detail::require_positive(*eddy.k_max, "eddy k_max");
    }
}

Scenario paper_repro() {
    Scenario s;
    s.name = "paper-repro";
    s.frequency_hz = 20e3;
    s.azimuth_rad = constants::pi / 4.0;
    s.transmitter = CoilSpec{0.164, 3, 0.005, 10e-6, std::nullopt};
    s.receiver.coil = CoilSpec{0.164, 3, 0.005, 10e-6, std::nullopt};
    s.receiver.distance_m = 0.2;
    s.receiver.load_ohms = {1.5, 4.5, 10.0};
    for (const char* m : {"Fe", "Cu", "Al"}) {
        for (double half : {0.05, 0.1}) {
            s.plates.push_back(PlateSpec{m, half, 0.2, std::nullopt});
        }
    }
    s.sweep = SweepConfig{0.0, 10.0, 21};
    s.noise = characteristics::NoiseSpec{0.01, 1};
    s.detection = DetectionConfig{2, 3.0, {3.0, 6.0, 9.0}};
    return s;
}

Scenario from_json(const json& j) {
    require_object(j, "scenario",
                   {"name", "frequency_hz", "azimuth_rad", "transmitter", "receiver_coil", "plates", "sweep", "noise",
                    "detection", "eddy", "materials_db"});
    Scenario s;
    s.plates.clear();
    get_opt(j, "name", "scenario", s.name);
    get_opt(j, "frequency_hz", "scenario", s.frequency_hz);
    get_opt(j, "azimuth_rad", "scenario", s.azimuth_rad);
    get_opt(j, "materials_db", "scenario", s.materials_db);

    if (j.contains("transmitter")) {
        const json& t = j["transmitter"];
        require_object(t, "transmitter", {"half_side_m", "turns", "resistance_ohm", "inductance_h", "capacitance_f"});
        parse_coil(t, "transmitter", s.transmitter);
    }
    if (j.contains("receiver_coil")) {
        const json& r = j["receiver_coil"];
        require_object(r, "receiver_coil",
                       {"half_side_m", "turns", "resistance_ohm", "inductance_h", "capacitance_f", "distance_m",
                        "load_ohms"});
        parse_coil(r, "receiver_coil", s.receiver.coil);
        get_opt(r, "distance_m", "receiver_coil", s.receiver.distance_m);
        get_opt(r, "load_ohms", "receiver_coil", s.receiver.load_ohms);
    }
    if (j.contains("plates")) {
        if (!j["plates"].is_array()) {
            throw ValidationError("plates must be an array");
        }
        for (const json& p : j["plates"]) {
            require_object(p, "plate", {"material", "half_side_m", "distance_m", "rel_permeability"});
            PlateSpec ps;
            ps.material = get<std::string>(p, "material", "plate");
            get_opt(p, "half_side_m", "plate", ps.half_side_m);
            get_opt(p, "distance_m", "plate", ps.distance_m);
            get_opt(p, "rel_permeability", "plate", ps.rel_permeability);
            s.plates.push_back(ps);
        }
    }
    if (j.contains("sweep")) {
        const json& w = j["sweep"];
        require_object(w, "sweep", {"i_min_a", "i_max_a", "steps"});
        get_opt(w, "i_min_a", "sweep", s.sweep.i_min_a);
        get_opt(w, "i_max_a", "sweep", s.sweep.i_max_a);
        get_opt(w, "steps", "sweep", s.sweep.steps);
    }
    if (j.contains("noise")) {
        const json& n = j["noise"];
        require_object(n, "noise", {"relative_sigma", "seed"});
        get_opt(n, "relative_sigma", "noise", s.noise.relative_sigma);
        get_opt(n, "seed", "noise", s.noise.seed);
    }
    if (j.contains("detection")) {
        const json& d = j["detection"];
        require_object(d, "detection", {"degree", "gate_a", "test_currents_a"});
        get_opt(d, "degree", "detection", s.detection.degree);
        get_opt(d, "gate_a", "detection", s.detection.gate_a);
        get_opt(d, "test_currents_a", "detection", s.detection.test_currents_a);
    }
    if (j.contains("eddy")) {
        const json& e = j["eddy"];
        require_object(e, "eddy", {"relative_tolerance", "tail_tolerance", "k_max_per_m"});
        get_opt(e, "relative_tolerance", "eddy", s.eddy.relative_tolerance);
        get_opt(e, "tail_tolerance", "eddy", s.eddy.tail_tolerance);
        get_opt(e, "k_max_per_m", "eddy", s.eddy.k_max);
    }
    s.validate();
    return s;
}

json to_json(const Scenario& s) {
    json plates = json::array();
    for (const PlateSpec& p : s.plates) {
        json pj{{"material", p.material}, {"half_side_m", p.half_side_m}, {"distance_m", p.distance_m}};
        if (p.rel_permeability) {
            pj["rel_permeability"] = *p.rel_permeability;
        }
        plates.push_back(pj);
    }
    json rx = coil_json(s.receiver.coil);
    rx["distance_m"] = s.receiver.distance_m;
    rx["load_ohms"] = s.receiver.load_ohms;
    json eddy{{"relative_tolerance", s.eddy.relative_tolerance}, {"tail_tolerance", s.eddy.tail_tolerance}};
    if (s.eddy.k_max) {
        eddy["k_max_per_m"] = *s.eddy.k_max;
    }
    json j{{"name", s.name},
           {"frequency_hz", s.frequency_hz},
           {"azimuth_rad", s.azimuth_rad},
           {"transmitter", coil_json(s.transmitter)},
           {"receiver_coil", rx},
           {"plates", plates},
           {"sweep", {{"i_min_a", s.sweep.i_min_a}, {"i_max_a", s.sweep.i_max_a}, {"steps", s.sweep.steps}}},
           {"noise", {{"relative_sigma", s.noise.relative_sigma}, {"seed", s.noise.seed}}},
           {"detection",
            {{"degree", s.detection.degree},
             {"gate_a", s.detection.gate_a},
             {"test_currents_a", s.detection.test_currents_a}}},
           {"eddy", eddy}};
    if (!s.materials_db.empty()) {
        j["materials_db"] = s.materials_db;
    }
    return j;
}

Scenario load(const std::string& path_or_name) {
    if (path_or_name == "paper-repro") {
        return paper_repro();
    }
    const std::filesystem::path path(path_or_name);
    std::ifstream in(path);
    if (!in) {
        throw NotFoundError("scenario not found: " + path_or_name);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("scenario " + path_or_name + " is not valid JSON: " + e.what());
    }
    Scenario s = from_json(j);
    if (!s.materials_db.empty() && std::filesystem::path(s.materials_db).is_relative()) {
        s.materials_db = (path.parent_path() / s.materials_db).string();
    }
    return s;
}

eddy::MaterialDatabase load_materials(const Scenario& s) {
    return s.materials_db.empty() ? eddy::MaterialDatabase::builtin() : eddy::MaterialDatabase::load(s.materials_db);
}

circuit::TxCoil transmitter_coil(const Scenario& s) {
    const CoilSpec& c = s.transmitter;
    if (c.capacitance_f) {
        return circuit::TxCoil{c.resistance_ohm, c.inductance_h, *c.capacitance_f};
    }
    return circuit::TxCoil::resonant(c.resistance_ohm, c.inductance_h, s.angular_frequency());
}

std::vector<CouplingRow> compute_couplings(const Scenario& s) {
    s.validate();
    const magnetics::SquareLoop tx{s.transmitter.half_side_m, s.transmitter.turns};
    std::vector<CouplingRow> rows;

    const magnetics::CoaxialPair coil{tx, s.receiver.coil.half_side_m, s.receiver.distance_m, s.receiver.coil.turns};
    CouplingRow c;
    c.receiver = "coil";
    c.half_side_m = coil.secondary_half_side;
    c.separation_m = coil.separation;
    c.m_coil_closed_h = magnetics::mutual_inductance_coil_coil_closed(coil);
    c.m_coil_neumann_h = magnetics::mutual_inductance_neumann(coil).inductance;
    rows.push_back(c);

    const eddy::MaterialDatabase db = load_materials(s);
    for (const PlateSpec& p : s.plates) {
        const magnetics::CoaxialPair single{magnetics::SquareLoop{tx.half_side, 1}, p.half_side_m, p.distance_m, 1};
        CouplingRow r;
        r.receiver = plate_label(p, db);
        r.half_side_m = p.half_side_m;
        r.separation_m = p.distance_m;
        r.m_coil_closed_h = magnetics::mutual_inductance_coil_coil_closed(single);
        r.m_coil_neumann_h = magnetics::mutual_inductance_neumann(single).inductance;
        r.m_plate_closed_h = magnetics::mutual_inductance_coil_plate(tx, p.half_side_m, p.distance_m);
        r.m_plate_numeric_h = magnetics::mutual_inductance_coil_plate_numeric(tx, p.half_side_m, p.distance_m);
        r.ratio_coil_to_plate = r.m_coil_closed_h * tx.turns / r.m_plate_closed_h;
        rows.push_back(r);
    }
    return rows;
}

std::vector<ImpedanceRow> compute_impedances(const Scenario& s, const eddy::MaterialDatabase& db) {
    s.validate();
    std::vector<ImpedanceRow> rows;
    for (const PlateSpec& p : s.plates) {
        ImpedanceRow row;
        row.material = db.find(p.material).material.name;
        row.half_side_m = p.half_side_m;
        row.distance_m = p.distance_m;
        const eddy::MetalMaterial mat = plate_material(p, db);
        row.rel_permeability = mat.rel_permeability;
        try {
            row.report = eddy::plate_impedance_report(plate_geometry(s, p), mat, s.eddy);
        } catch (const ConvergenceError& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ReceiverCase> build_receivers(const Scenario& s, const eddy::MaterialDatabase& db) {
    s.validate();
    const magnetics::SquareLoop tx{s.transmitter.half_side_m, s.transmitter.turns};
    std::vector<ReceiverCase> out;

    if (!s.receiver.load_ohms.empty()) {
        const magnetics::CoaxialPair pair{tx, s.receiver.coil.half_side_m, s.receiver.distance_m,
                                          s.receiver.coil.turns};
        const double m = magnetics::mutual_inductance_neumann(pair).inductance;
        for (double load : s.receiver.load_ohms) {
            ReceiverCase rc;
            rc.label = "coil/" + format_number("%g", load) + "ohm";
            rc.truth = detection::Truth::Coil;
            rc.model = receiver_coil(s, load);
            rc.couplings = circuit::Couplings::aligned(m, s.azimuth_rad);
            out.push_back(std::move(rc));
        }
    }
    for (const PlateSpec& p : s.plates) {
        const eddy::EddyImpedance z =
            eddy::plate_impedance(plate_geometry(s, p), plate_material(p, db), s.eddy);
        ReceiverCase rc;
        rc.label = plate_label(p, db);
        rc.truth = detection::Truth::Metal;
        rc.model = circuit::MetalReceiver{z.r_m, z.l_m};
        rc.couplings = circuit::Couplings::aligned(
            magnetics::mutual_inductance_coil_plate(tx, p.half_side_m, p.distance_m), s.azimuth_rad);
        out.push_back(std::move(rc));
    }
    return out;
}

characteristics::SweepSpec sweep_spec(const Scenario& s, const ReceiverCase& rx) {
    characteristics::SweepSpec spec;
    spec.i_min = s.sweep.i_min_a;
    spec.i_max = s.sweep.i_max_a;
    spec.steps = s.sweep.steps;
    spec.drive = circuit::DriveSpec{s.angular_frequency(), 0.0, s.azimuth_rad, 0.0};
    spec.receiver = rx.model;
    spec.couplings = rx.couplings;
    spec.tx = transmitter_coil(s);
    spec.label = rx.label;
    return spec;
}

std::vector<characteristics::CharacteristicCurve> CurveSet::all() const {
    std::vector<characteristics::CharacteristicCurve> v = coil;
    v.insert(v.end(), metal.begin(), metal.end());
    return v;
}

CurveSet build_curves(const Scenario& s, const std::vector<ReceiverCase>& receivers) {
    CurveSet set;
    for (const ReceiverCase& rc : receivers) {
        auto curve = characteristics::sweep_curve(sweep_spec(s, rc));
        (rc.truth == detection::Truth::Metal ? set.metal : set.coil).push_back(std::move(curve));
    }
    return set;
}

CurveSet split_curves(const std::vector<characteristics::CharacteristicCurve>& curves) {
    CurveSet set;
    for (const auto& c : curves) {
        if (starts_with(c.label, "metal/")) {
            set.metal.push_back(c);
        } else if (starts_with(c.label, "coil/")) {
            set.coil.push_back(c);
        } else {
            throw ValidationError("curve label '" + c.label + "' must start with metal/ or coil/");
        }
    }
    return set;
}

std::vector<detection::LabeledSample> build_test_samples(const Scenario& s, const std::vector<ReceiverCase>& receivers,
                                                         const std::vector<double>& currents,
                                                         const characteristics::NoiseSpec& noise) {
    const circuit::TxCoil tx = transmitter_coil(s);
    // All points go through one noise stream so a seed fixes the whole batch.
    characteristics::CharacteristicCurve clean;
    for (const ReceiverCase& rc : receivers) {
        for (double i : currents) {
            const circuit::DriveSpec drive{s.angular_frequency(), i, s.azimuth_rad, 0.0};
            const circuit::PhasorSolution sol = circuit::solve_full_system(drive, rc.couplings, rc.model, tx);
            characteristics::CurvePoint pt;
            pt.i_tx = i;
            pt.u_a = std::abs(sol.u_a);
            pt.u_b = std::abs(sol.u_b);
            pt.u_tx = std::hypot(pt.u_a, pt.u_b);
            pt.p_in = sol.p_in;
            clean.points.push_back(pt);
        }
    }
    const characteristics::CharacteristicCurve noisy = characteristics::add_noise(clean, noise);

    std::vector<detection::LabeledSample> out;
    std::size_t k = 0;
    for (const ReceiverCase& rc : receivers) {
        for (std::size_t n = 0; n < currents.size(); ++n, ++k) {
            const auto& pt = noisy.points[k];
            out.push_back(detection::LabeledSample{rc.label, rc.truth, detection::Sample{pt.i_tx, pt.u_tx, pt.p_in}});
        }
    }
    return out;
}

} // namespace wptmod::scenario
