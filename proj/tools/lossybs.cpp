// Command-line front end for the lossy two-port interference engine.
//
// Subcommands: validate, alpha-range, probabilities, hom-scan, map,
// oracle-check. Exit codes: 0 success, 1 usage or configuration error,
// 2 physics rejection (non-passive circuit), 3 oracle disagreement.

#include <clocale>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lossybs/config.hpp"
#include "lossybs/counting.hpp"
#include "lossybs/dilation.hpp"
#include "lossybs/fock_oracle.hpp"
#include "lossybs/io.hpp"
#include "lossybs/passivity.hpp"
#include "lossybs/sampling.hpp"
#include "lossybs/scattering.hpp"
#include "lossybs/spectral.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPhysics = 2;
constexpr int kExitOracle = 3;

struct GlobalFlags {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<uint64_t> seed;
    std::optional<int> resolution;
    std::optional<double> tol;
};

lossybs::RunConfig load_with_overrides(const GlobalFlags& g) {
    if (g.config_path.empty())
        throw std::invalid_argument("--config <path> is required");
    lossybs::RunConfig c = lossybs::load_config(g.config_path);
    if (!g.out_path.empty()) c.output_path = g.out_path;
    if (!g.format.empty()) {
        if (g.format != "csv" && g.format != "json")
            throw std::invalid_argument("--format must be 'csv' or 'json'");
        c.output_format = g.format;
    }
    if (g.seed) c.oracle_seed = *g.seed;
    if (g.resolution) c.map_resolution = *g.resolution;
    if (g.tol) {
        if (!(*g.tol >= 0.0))
            throw std::invalid_argument("--tol must be nonnegative");
        c.tol = *g.tol;
    }
    return c;
}

const lossybs::ScatteringMatrix& require_matrix(const lossybs::RunConfig& c) {
    if (!c.matrix)
        throw std::invalid_argument("config field 'matrix': missing");
    return *c.matrix;
}

/// Writes to the configured path, or stdout when none is set. Files are
/// opened in binary mode so the bytes are exactly what was formatted.
void emit(const lossybs::RunConfig& c, const std::string& body) {
    if (c.output_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream os(c.output_path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open output '" + c.output_path + "'");
    os << body;
}

void emit_to(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output '" + path + "'");
    os << body;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

int cmd_validate(const GlobalFlags& g) {
    const lossybs::RunConfig c = load_with_overrides(g);
    const lossybs::PassivityReport rep =
        lossybs::check_passivity(require_matrix(c), c.tol);
    emit(c, lossybs::to_json(rep, c.tol).dump(2) + "\n");
    return rep.passive ? kExitOk : kExitPhysics;
}

int cmd_alpha_range(const GlobalFlags& g) {
    const lossybs::RunConfig c = load_with_overrides(g);
    const lossybs::AlphaWindow w = lossybs::alpha_window(require_matrix(c));
    emit(c, lossybs::to_json(w).dump(2) + "\n");
    return kExitOk;
}

int cmd_probabilities(const GlobalFlags& g) {
    const lossybs::RunConfig c = load_with_overrides(g);
    const lossybs::ScatteringMatrix& s = require_matrix(c);
    if (!c.overlap)
        throw std::invalid_argument("config field 'overlap': missing");

    lossybs::complexd overlap = c.overlap->value;
    if (c.overlap->mode == lossybs::OverlapSpec::Mode::from_delay) {
        if (!c.biphoton || !c.grid)
            throw std::invalid_argument(
                "config fields 'biphoton' and 'grid' are required when the "
                "overlap comes from a delay");
        const auto [psin, norm] = lossybs::normalize(*c.biphoton, *c.grid);
        overlap =
            lossybs::overlap_integral(psin, c.overlap->delta_t, *c.grid).value;
    }
    const lossybs::NumberMoments m =
        lossybs::number_moments(s, overlap, c.tol);
    const lossybs::OutcomeDistribution d =
        lossybs::outcome_probabilities(s, overlap, c.tol);
    lossybs::json j{{"schema_version", 1},
                    {"overlap", {{"re", overlap.real()}, {"im", overlap.imag()}}},
                    {"moments", lossybs::to_json(m)},
                    {"probabilities", lossybs::to_json(d)}};
    emit(c, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_hom_scan(const GlobalFlags& g) {
    const lossybs::RunConfig c = load_with_overrides(g);
    const lossybs::ScatteringMatrix& s = require_matrix(c);
    if (!c.biphoton)
        throw std::invalid_argument("config field 'biphoton': missing");
    if (!c.grid) throw std::invalid_argument("config field 'grid': missing");
    if (!c.scan) throw std::invalid_argument("config field 'scan': missing");
    const std::vector<double> delays = c.scan->resolve_delta_t();

    if (c.scan->alpha_values.size() > 1 && c.output_path.empty())
        throw std::invalid_argument(
            "scan.alpha_values with several entries needs --out so each "
            "curve gets its own file");

    auto run_one = [&](const lossybs::ScatteringMatrix& m) {
        std::ostringstream os;
        lossybs::write_hom_csv(os,
                               lossybs::hom_scan(m, *c.biphoton, *c.grid,
                                                 delays, c.tol));
        return os.str();
    };

    if (c.scan->alpha_values.empty()) {
        emit(c, run_one(s));
        return kExitOk;
    }
    for (size_t k = 0; k < c.scan->alpha_values.size(); ++k) {
        // a listed alpha replaces the matrix phases, split evenly
        const double a = c.scan->alpha_values[k];
        const lossybs::ScatteringMatrix m(s.t, s.r, s.tau, s.rho, a / 2.0,
                                          a / 2.0);
        const std::string body = run_one(m);
        if (c.scan->alpha_values.size() == 1) {
            emit(c, body);
        } else {
            emit_to(with_suffix(c.output_path,
                                "_alpha" + std::to_string(k)),
                    body);
        }
    }
    return kExitOk;
}

int cmd_map(const GlobalFlags& g) {
    const lossybs::RunConfig c = load_with_overrides(g);
    if (!c.map_kind)
        throw std::invalid_argument("config field 'map.kind': missing");
    const lossybs::ParameterMap map =
        lossybs::parameter_map(*c.map_kind, c.map_resolution);
    std::ostringstream os;
    lossybs::write_map_csv(os, map);
    emit(c, os.str());
    return kExitOk;
}

int cmd_oracle_check(const GlobalFlags& g) {
    const lossybs::RunConfig c = load_with_overrides(g);
    double perturbation = 0.0;
#ifdef LOSSYBS_FAULT_INJECT
    // test build: corrupt the closed form so the sweep must fail
    perturbation = 1e-6;
#endif
    const lossybs::EquivalenceSummary sum = lossybs::oracle_equivalence_sweep(
        c.oracle_samples, c.oracle_seed, c.oracle_overlaps, 1e-10,
        perturbation);
    lossybs::json j{
        {"schema_version", 1},
        {"samples", sum.samples},
        {"seed", sum.seed},
        {"overlap_values", sum.overlaps},
        {"tolerance", sum.tolerance},
        {"max_deviation", sum.max_deviation},
        {"pass", sum.pass},
        {"worst_case",
         {{"matrix", lossybs::to_json(sum.worst_matrix)},
          {"overlap", sum.worst_overlap},
          {"component", lossybs::outcome_names()[sum.worst_component]}}}};
    emit(c, j.dump(2) + "\n");
    if (!sum.pass) {
        std::cerr << "oracle-check failed: max deviation "
                  << lossybs::format_number(sum.max_deviation) << " (seed "
                  << sum.seed << ", overlap " << sum.worst_overlap
                  << ", component "
                  << lossybs::outcome_names()[sum.worst_component]
                  << ", matrix t=" << sum.worst_matrix.t
                  << " r=" << sum.worst_matrix.r
                  << " tau=" << sum.worst_matrix.tau
                  << " rho=" << sum.worst_matrix.rho
                  << " phi1=" << sum.worst_matrix.phi1
                  << " phi2=" << sum.worst_matrix.phi2 << ")\n";
        return kExitOracle;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"Quantum interference at general lossy two-port circuits"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalFlags g;
    app.add_option("--config", g.config_path, "JSON run configuration");
    app.add_option("--out", g.out_path, "output path (default: stdout)");
    app.add_option("--format", g.format, "output format: csv|json");
    uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "sweep seed");
    int resolution_value = 0;
    auto* res_opt =
        app.add_option("--resolution", resolution_value, "map resolution");
    double tol_value = 0.0;
    auto* tol_opt = app.add_option("--tol", tol_value, "passivity tolerance");

    auto* validate =
        app.add_subcommand("validate", "check physical realizability");
    auto* alpha_range =
        app.add_subcommand("alpha-range", "allowed interference-phase window");
    auto* probabilities =
        app.add_subcommand("probabilities", "six outcome probabilities");
    auto* hom_scan =
        app.add_subcommand("hom-scan", "coincidence versus delay (CSV)");
    auto* map =
        app.add_subcommand("map", "parameter map over (t^2, r^2) (CSV)");
    auto* oracle_check = app.add_subcommand(
        "oracle-check", "closed form versus Fock-space brute force");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*seed_opt) g.seed = seed_value;
    if (*res_opt) g.resolution = resolution_value;
    if (*tol_opt) g.tol = tol_value;

    try {
        if (validate->parsed()) return cmd_validate(g);
        if (alpha_range->parsed()) return cmd_alpha_range(g);
        if (probabilities->parsed()) return cmd_probabilities(g);
        if (hom_scan->parsed()) return cmd_hom_scan(g);
        if (map->parsed()) return cmd_map(g);
        if (oracle_check->parsed()) return cmd_oracle_check(g);
    } catch (const std::domain_error& e) {
        std::cerr << "physics rejection: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
