// wptmod: scenario-driven front end for the coupling, eddy, curve and
// detection pipeline.
//
// Exit status: 0 ok, 1 usage or I/O, 2 validation, 3 convergence,
// 4 non-separable training data, 5 not found, 6 singular or non-equivalent circuit.

#include "wptmod/detection.hpp"
#include "wptmod/errors.hpp"
#include "wptmod/materials.hpp"
#include "wptmod/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace wptmod;

namespace {

enum Exit { ok = 0, usage = 1, validation = 2, convergence = 3, non_separable = 4, not_found = 5, singular = 6 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Writes `content` to out_dir/file, or to stdout when out_dir is empty.
void emit(const std::string& out_dir, const std::string& file, const std::string& content) {
    if (out_dir.empty()) {
        std::cout << content;
        return;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path path = fs::path(out_dir) / file;
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) {
        throw IoError("cannot write " + path.string());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFoundError("file not found: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json parse_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + " is not valid JSON: " + e.what());
    }
}

std::vector<characteristics::CharacteristicCurve> read_curves(const std::string& path) {
    std::istringstream in(read_file(path));
    return characteristics::read_csv(in);
}

std::string materials_listing(const eddy::MaterialDatabase& db, const std::string& name) {
    std::ostringstream out;
    out << "name,conductivity_S_per_m,rel_permeability,rel_permeability_range,description\n";
    for (const auto& e : db.entries()) {
        if (!name.empty() && &db.find(name) != &e) {
            continue;
        }
        out << e.material.name << ',' << sci(e.material.conductivity) << ',' << e.material.rel_permeability << ',';
        if (e.permeability_is_range()) {
            out << e.rel_permeability_min << "-" << e.rel_permeability_max << " (default "
                << e.material.rel_permeability << ")";
        } else {
            out << e.material.rel_permeability;
        }
        out << ',' << e.description << '\n';
    }
    return out.str();
}

/// NAME,SIGMA,MU_R[,MU_MIN,MU_MAX][,DESCRIPTION]
eddy::MaterialEntry parse_material_spec(const std::string& spec) {
    std::vector<std::string> f;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) {
        f.push_back(item);
    }
    if (f.size() < 3 || f.size() > 6) {
        throw ValidationError("--add expects NAME,SIGMA,MU_R[,MU_MIN,MU_MAX][,DESCRIPTION]");
    }
    auto num = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            const double v = std::stod(f[i], &used);
            if (used != f[i].size()) {
                throw std::invalid_argument(f[i]);
            }
            return v;
        } catch (const std::exception&) {
            throw ValidationError("--add: '" + f[i] + "' is not a number");
        }
    };
    eddy::MaterialEntry e;
    e.material = eddy::MetalMaterial{f[0], num(1), num(2)};
    e.rel_permeability_min = e.rel_permeability_max = e.material.rel_permeability;
    std::size_t next = 3;
    if (f.size() >= 5) {
        e.rel_permeability_min = num(3);
        e.rel_permeability_max = num(4);
        next = 5;
    }
    if (f.size() > next) {
        e.description = f[next];
    }
    return e;
}

std::string couplings_csv(const scenario::Scenario& s) {
    std::ostringstream out;
    out << "receiver,half_side_m,separation_m,m_coil_closed_H,m_coil_neumann_H,m_plate_closed_H,m_plate_numeric_H,"
           "coil_to_plate_ratio\n";
    for (const auto& r : scenario::compute_couplings(s)) {
        out << r.receiver << ',' << fixed(r.half_side_m, 6) << ',' << fixed(r.separation_m, 6) << ','
            << sci(r.m_coil_closed_h) << ',' << sci(r.m_coil_neumann_h) << ',' << sci(r.m_plate_closed_h) << ','
            << sci(r.m_plate_numeric_h) << ',' << sci(r.ratio_coil_to_plate) << '\n';
    }
    return out.str();
}

/// Returns false when any row failed to converge.
bool impedance_csv(const scenario::Scenario& s, std::string& csv) {
    const auto db = scenario::load_materials(s);
    std::ostringstream out;
    out << "material,half_side_m,distance_m,rel_permeability,R_m_ohm,L_m_H,k_max_per_m,status\n";
    bool all_ok = true;
    for (const auto& r : scenario::compute_impedances(s, db)) {
        out << r.material << ',' << fixed(r.half_side_m, 6) << ',' << fixed(r.distance_m, 6) << ','
            << r.rel_permeability << ',';
        if (r.report) {
            out << sci(r.report->impedance.r_m) << ',' << sci(r.report->impedance.l_m) << ','
                << sci(r.report->k_max) << ",ok\n";
        } else {
            all_ok = false;
            std::string msg = r.error;
            for (char& c : msg) {
                if (c == ',' || c == '\n') {
                    c = ';';
                }
            }
            out << ",,,not converged: " << msg << '\n';
        }
    }
    csv = out.str();
    return all_ok;
}

std::vector<characteristics::CharacteristicCurve> scenario_curves(const scenario::Scenario& s) {
    const auto receivers = scenario::build_receivers(s, scenario::load_materials(s));
    return scenario::build_curves(s, receivers).all();
}

std::string curves_csv(const std::vector<characteristics::CharacteristicCurve>& curves) {
    std::ostringstream out;
    characteristics::write_csv(out, curves);
    return out.str();
}

detection::ThresholdModel fit_model(const std::vector<characteristics::CharacteristicCurve>& curves, int degree,
                                    double gate) {
    const auto set = scenario::split_curves(curves);
    if (set.metal.empty() || set.coil.empty()) {
        throw ValidationError("fitting needs at least one metal/ and one coil/ curve");
    }
    return detection::fit_thresholds(set.metal, set.coil, detection::FitOptions{degree, gate, 0.10});
}

int run(int argc, char** argv) {
    CLI::App app{"Two-coil wireless power transfer model and metal object detector"};
    app.require_subcommand(1);

    std::string scenario_arg = "paper-repro";
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> degree;
    std::optional<double> gate;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_arg, "Scenario file, or 'paper-repro'")->capture_default_str();
        cmd->add_option("--out", out_dir, "Output directory (stdout when omitted)");
    };

    auto* materials = app.add_subcommand("materials", "List or extend the material table");
    std::string db_path;
    std::string name;
    std::string add_spec;
    materials->add_option("--db", db_path, "Material CSV (built-in table when omitted)");
    materials->add_option("--name", name, "Show a single material");
    materials->add_option("--add", add_spec, "Append NAME,SIGMA,MU_R[,MU_MIN,MU_MAX][,DESCRIPTION] and save to --db");

    auto* couplings = app.add_subcommand("couplings", "Mutual inductances for the scenario receivers");
    add_common(couplings);

    auto* impedance = app.add_subcommand("impedance", "Equivalent plate impedances R_m, L_m");
    add_common(impedance);

    auto* curves = app.add_subcommand("curves", "U-I and P-I characteristic curves");
    add_common(curves);
    bool noisy = false;
    curves->add_flag("--noisy", noisy, "Apply the scenario's measurement noise");
    curves->add_option("--seed", seed, "Noise seed (overrides the scenario)");

    auto* fit = app.add_subcommand("fit", "Fit threshold curves");
    add_common(fit);
    std::string curves_path;
    fit->add_option("--curves", curves_path, "Training curves CSV (computed from the scenario when omitted)");
    fit->add_option("--degree", degree, "P-I polynomial degree");
    fit->add_option("--gate-amps", gate, "Minimum current for a decision [A]");

    auto* detect = app.add_subcommand("detect", "Classify noisy test samples");
    add_common(detect);
    std::string model_path;
    std::vector<double> currents;
    detect->add_option("--model", model_path, "Threshold model JSON (fitted from the scenario when omitted)");
    detect->add_option("--currents", currents, "Test currents [A]")->delimiter(',');
    detect->add_option("--seed", seed, "Noise seed (overrides the scenario)");
    detect->add_option("--degree", degree, "P-I polynomial degree when fitting");
    detect->add_option("--gate-amps", gate, "Minimum current for a decision [A]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    if (*materials) {
        eddy::MaterialDatabase db = db_path.empty() ? eddy::MaterialDatabase::builtin() : eddy::MaterialDatabase::load(db_path);
        if (!add_spec.empty()) {
            if (db_path.empty()) {
                throw ValidationError("--add needs --db to save into");
            }
            db.add(parse_material_spec(add_spec));
            db.save(db_path);
        }
        std::cout << materials_listing(db, name);
        return ok;
    }

    scenario::Scenario s = scenario::load(scenario_arg);
    if (seed) {
        s.noise.seed = *seed;
    }
    const int deg = degree.value_or(s.detection.degree);
    const double gate_a = gate.value_or(s.detection.gate_a);

    if (*couplings) {
        emit(out_dir, "couplings.csv", couplings_csv(s));
        return ok;
    }
    if (*impedance) {
        std::string csv;
        const bool converged = impedance_csv(s, csv);
        emit(out_dir, "impedance.csv", csv);
        if (!converged) {
            std::cerr << "wptmod: eddy integral did not converge for at least one plate\n";
            return convergence;
        }
        return ok;
    }
    if (*curves) {
        auto cs = scenario_curves(s);
        if (noisy) {
            for (auto& c : cs) {
                c = characteristics::add_noise(c, s.noise);
            }
        }
        emit(out_dir, "curves.csv", curves_csv(cs));
        return ok;
    }
    if (*fit) {
        const auto cs = curves_path.empty() ? scenario_curves(s) : read_curves(curves_path);
        const auto model = fit_model(cs, deg, gate_a);
        emit(out_dir, "thresholds.json", detection::to_json(model).dump(2) + "\n");
        return ok;
    }
    if (*detect) {
        const auto db = scenario::load_materials(s);
        const auto receivers = scenario::build_receivers(s, db);
        detection::ThresholdModel model;
        if (model_path.empty()) {
            model = fit_model(scenario::build_curves(s, receivers).all(), deg, gate_a);
        } else {
            model = detection::threshold_model_from_json(parse_json(model_path));
            if (gate) {
                model.i_min_gate = *gate;
            }
        }
        const auto samples = scenario::build_test_samples(
            s, receivers, currents.empty() ? s.detection.test_currents_a : currents, s.noise);
        const auto report = detection::evaluate_batch(samples, model);
        std::ostringstream table;
        detection::write_report_table(table, report);
        if (out_dir.empty()) {
            std::cout << table.str();
        } else {
            emit(out_dir, "report.json", detection::to_json(report).dump(2) + "\n");
            emit(out_dir, "report.txt", table.str());
        }
        return ok;
    }
    return usage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "wptmod: invalid input: " << e.what() << '\n';
        return validation;
    } catch (const DomainError& e) {
        std::cerr << "wptmod: invalid input: " << e.what() << '\n';
        return validation;
    } catch (const ConvergenceError& e) {
        std::cerr << "wptmod: not converged: " << e.what() << '\n';
        return convergence;
    } catch (const NonSeparableError& e) {
        std::cerr << "wptmod: training data not separable: " << e.what() << '\n';
        return non_separable;
    } catch (const NotFoundError& e) {
        std::cerr << "wptmod: " << e.what() << '\n';
        return not_found;
    } catch (const SingularityError& e) {
        std::cerr << "wptmod: singular circuit: " << e.what() << '\n';
        return singular;
    } catch (const EquivalenceError& e) {
        std::cerr << "wptmod: " << e.what() << '\n';
        return singular;
    } catch (const std::exception& e) {
        std::cerr << "wptmod: " << e.what() << '\n';
        return usage;
    }
}
