#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lossybs/counting.hpp"
#include "lossybs/io.hpp"
#include "lossybs/scattering.hpp"
#include "lossybs/spectral.hpp"

namespace lossybs {

using json = nlohmann::ordered_json;

/// How the spectral overlap for a probabilities run is obtained: either a
/// number supplied directly or a delay fed through the biphoton amplitude.
struct OverlapSpec {
    enum class Mode { direct, from_delay } mode = Mode::direct;
    complexd value{1.0, 0.0};
    double delta_t = 0.0;
};

struct ScanSpec {
    std::vector<double> delta_t_values;        // explicit list ...
    std::optional<double> delta_t_min, delta_t_max;  // ... or a range
    int delta_t_count = 0;
    std::vector<double> alpha_values;  // optional per-curve phases

    std::vector<double> resolve_delta_t() const {
        if (!delta_t_values.empty()) return delta_t_values;
        std::vector<double> out;
        out.reserve(delta_t_count);
        for (int k = 0; k < delta_t_count; ++k)
            out.push_back(*delta_t_min + (*delta_t_max - *delta_t_min) * k /
                                             (delta_t_count - 1));
        return out;
    }
};

struct RunConfig {
    int schema_version = 1;
    std::optional<ScatteringMatrix> matrix;
    std::optional<BiphotonAmplitude> biphoton;
    std::optional<FrequencyGrid> grid;
    std::optional<ScanSpec> scan;
    std::optional<OverlapSpec> overlap;
    std::optional<MapKind> map_kind;
    int map_resolution = 200;
    int oracle_samples = 1000;
    uint64_t oracle_seed = 1;
    std::vector<double> oracle_overlaps = {0.0, 0.31, 0.5, 1.0};
    std::string output_path;           // empty: stdout
    std::string output_format = "csv";
    double tol = default_tol;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& field,
                                      const std::string& what) {
    throw std::invalid_argument("config field '" + field + "': " + what);
}

inline void reject_unknown_keys(const json& j, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key.size() > 4 && key.substr(key.size() - 4) == "_deg")
            config_error(where.empty() ? key : where + "." + key,
                         "angles are accepted in radians only; drop the "
                         "'_deg' field and supply radians");
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok)
            config_error(where.empty() ? key : where + "." + key,
                         "unknown key");
    }
}

inline double get_number(const json& j, const std::string& where,
                         const char* key) {
    if (!j.contains(key)) config_error(where + "." + key, "missing");
    const json& v = j.at(key);
    if (!v.is_number()) config_error(where + "." + key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error(where + "." + key, "must be finite");
    return d;
}

inline double get_number_or(const json& j, const std::string& where,
                            const char* key, double fallback) {
    return j.contains(key) ? get_number(j, where, key) : fallback;
}

inline int get_int(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) config_error(where + "." + key, "missing");
    const json& v = j.at(key);
    if (!v.is_number_integer())
        config_error(where + "." + key, "must be an integer");
    return v.get<int>();
}

inline std::vector<double> get_number_list(const json& v,
                                           const std::string& where) {
    if (!v.is_array()) config_error(where, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) config_error(where, "must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline ScatteringMatrix parse_matrix(const json& j) {
    reject_unknown_keys(j, "matrix", {"t", "r", "tau", "rho", "phi1", "phi2"});
    try {
        return ScatteringMatrix(get_number(j, "matrix", "t"),
                                get_number(j, "matrix", "r"),
                                get_number(j, "matrix", "tau"),
                                get_number(j, "matrix", "rho"),
                                get_number_or(j, "matrix", "phi1", 0.0),
                                get_number_or(j, "matrix", "phi2", 0.0));
    } catch (const std::invalid_argument& e) {
        config_error("matrix", e.what());
    }
}

inline FrequencyGrid parse_grid(const json& j) {
    reject_unknown_keys(j, "grid", {"omega_min", "omega_max", "n_points"});
    try {
        return FrequencyGrid(get_number(j, "grid", "omega_min"),
                             get_number(j, "grid", "omega_max"),
                             get_int(j, "grid", "n_points"));
    } catch (const std::invalid_argument& e) {
        config_error("grid", e.what());
    }
}

inline BiphotonAmplitude parse_biphoton(const json& j,
                                        const std::optional<FrequencyGrid>& g) {
    reject_unknown_keys(j, "biphoton",
                        {"variant", "center1", "center2", "width1", "width2",
                         "omega_p", "tau_p", "length", "kappa_i", "kappa_s",
                         "path"});
    if (!j.contains("variant") || !j.at("variant").is_string())
        config_error("biphoton.variant", "must be one of "
                     "'gaussian', 'spdc', 'tabulated'");
    const std::string variant = j.at("variant").get<std::string>();
    try {
        if (variant == "gaussian")
            return make_gaussian(get_number(j, "biphoton", "center1"),
                                 get_number(j, "biphoton", "center2"),
                                 get_number(j, "biphoton", "width1"),
                                 get_number(j, "biphoton", "width2"));
        if (variant == "spdc")
            return make_spdc(get_number(j, "biphoton", "omega_p"),
                             get_number(j, "biphoton", "tau_p"),
                             get_number(j, "biphoton", "length"),
                             get_number(j, "biphoton", "kappa_i"),
                             get_number(j, "biphoton", "kappa_s"));
        if (variant == "tabulated") {
            if (!j.contains("path") || !j.at("path").is_string())
                config_error("biphoton.path", "missing");
            if (!g)
                config_error("grid",
                             "required to validate a tabulated amplitude");
            return read_tabulated_csv_file(j.at("path").get<std::string>(),
                                           *g);
        }
    } catch (const std::invalid_argument& e) {
        config_error("biphoton", e.what());
    }
    config_error("biphoton.variant",
                 "must be one of 'gaussian', 'spdc', 'tabulated'");
}

inline ScanSpec parse_scan(const json& j) {
    reject_unknown_keys(j, "scan",
                        {"delta_t_values", "delta_t_min", "delta_t_max",
                         "delta_t_count", "alpha_values"});
    ScanSpec s;
    if (j.contains("delta_t_values"))
        s.delta_t_values =
            get_number_list(j.at("delta_t_values"), "scan.delta_t_values");
    if (j.contains("delta_t_min")) {
        s.delta_t_min = get_number(j, "scan", "delta_t_min");
        s.delta_t_max = get_number(j, "scan", "delta_t_max");
        s.delta_t_count = get_int(j, "scan", "delta_t_count");
        if (s.delta_t_count < 2)
            config_error("scan.delta_t_count", "must be at least 2");
        if (!(*s.delta_t_min < *s.delta_t_max))
            config_error("scan.delta_t_min", "must be below delta_t_max");
    }
    if (s.delta_t_values.empty() && !s.delta_t_min)
        config_error("scan", "needs delta_t_values or a delta_t range");
    if (j.contains("alpha_values"))
        s.alpha_values =
            get_number_list(j.at("alpha_values"), "scan.alpha_values");
    return s;
}

inline OverlapSpec parse_overlap(const json& j) {
    reject_unknown_keys(j, "overlap", {"value", "re", "im", "delta_t"});
    OverlapSpec o;
    const int given = int(j.contains("value")) + int(j.contains("re")) +
                      int(j.contains("delta_t"));
    if (given != 1)
        config_error("overlap",
                     "give exactly one of 'value', 're'/'im', 'delta_t'");
    if (j.contains("value")) {
        o.mode = OverlapSpec::Mode::direct;
        o.value = complexd(get_number(j, "overlap", "value"), 0.0);
    } else if (j.contains("re")) {
        o.mode = OverlapSpec::Mode::direct;
        o.value = complexd(get_number(j, "overlap", "re"),
                           get_number_or(j, "overlap", "im", 0.0));
    } else {
        o.mode = OverlapSpec::Mode::from_delay;
        o.delta_t = get_number(j, "overlap", "delta_t");
    }
    return o;
}

inline MapKind parse_map_kind(const std::string& s, const std::string& where) {
    if (s == "tunability") return MapKind::tunability;
    if (s == "max_coincidence") return MapKind::max_coincidence;
    if (s == "programmability") return MapKind::programmability;
    config_error(where, "must be 'tunability', 'max_coincidence' or "
                        "'programmability'");
}

}  // namespace detail

/// Parses and fully validates a run configuration. Unknown keys anywhere
/// are rejected before any computation starts.
inline RunConfig parse_config(const json& j) {
    detail::reject_unknown_keys(
        j, "",
        {"schema_version", "matrix", "biphoton", "grid", "scan", "overlap",
         "map", "oracle", "output", "tol"});
    RunConfig c;
    if (!j.contains("schema_version"))
        detail::config_error("schema_version", "missing");
    c.schema_version = detail::get_int(j, "", "schema_version");
    if (c.schema_version != 1)
        detail::config_error("schema_version", "only version 1 is supported");

    if (j.contains("tol")) {
        c.tol = detail::get_number(j, "", "tol");
        if (!(c.tol >= 0.0)) detail::config_error("tol", "must be >= 0");
    }
    if (j.contains("matrix")) c.matrix = detail::parse_matrix(j.at("matrix"));
    if (j.contains("grid")) c.grid = detail::parse_grid(j.at("grid"));
    if (j.contains("biphoton"))
        c.biphoton = detail::parse_biphoton(j.at("biphoton"), c.grid);
    if (j.contains("scan")) c.scan = detail::parse_scan(j.at("scan"));
    if (j.contains("overlap"))
        c.overlap = detail::parse_overlap(j.at("overlap"));

    if (j.contains("map")) {
        const json& m = j.at("map");
        detail::reject_unknown_keys(m, "map", {"kind", "resolution"});
        if (!m.contains("kind") || !m.at("kind").is_string())
            detail::config_error("map.kind", "missing");
        c.map_kind = detail::parse_map_kind(m.at("kind").get<std::string>(),
                                            "map.kind");
        if (m.contains("resolution"))
            c.map_resolution = detail::get_int(m, "map", "resolution");
    }
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        detail::reject_unknown_keys(o, "oracle",
                                    {"samples", "seed", "overlaps"});
        if (o.contains("samples"))
            c.oracle_samples = detail::get_int(o, "oracle", "samples");
        if (o.contains("seed")) {
            if (!o.at("seed").is_number_unsigned() &&
                !o.at("seed").is_number_integer())
                detail::config_error("oracle.seed", "must be an integer");
            c.oracle_seed = o.at("seed").get<uint64_t>();
        }
        if (o.contains("overlaps")) {
            c.oracle_overlaps =
                detail::get_number_list(o.at("overlaps"), "oracle.overlaps");
            for (double v : c.oracle_overlaps)
                if (!(v >= 0.0 && v <= 1.0))
                    detail::config_error("oracle.overlaps",
                                         "entries must lie in [0, 1]");
        }
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        detail::reject_unknown_keys(o, "output", {"path", "format"});
        if (o.contains("path")) {
            if (!o.at("path").is_string())
                detail::config_error("output.path", "must be a string");
            c.output_path = o.at("path").get<std::string>();
        }
        if (o.contains("format")) {
            if (!o.at("format").is_string())
                detail::config_error("output.format", "must be a string");
            c.output_format = o.at("format").get<std::string>();
            if (c.output_format != "csv" && c.output_format != "json")
                detail::config_error("output.format",
                                     "must be 'csv' or 'json'");
        }
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::invalid_argument("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config '" + path +
                                    "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

// --- JSON rendering of result types ------------------------------------------

inline json to_json(const PassivityReport& r, double tol) {
    return json{{"schema_version", 1},
                {"passive", r.passive},
                {"per_port_loss_1", r.per_port_loss_1},
                {"per_port_loss_2", r.per_port_loss_2},
                {"eq6_margin", r.eq_margin},
                {"sigma_max", r.sigma_max},
                {"tol", tol}};
}

inline json to_json(const ScatteringMatrix& s) {
    return json{{"t", s.t},     {"r", s.r},       {"tau", s.tau},
                {"rho", s.rho}, {"phi1", s.phi1}, {"phi2", s.phi2}};
}

inline json to_json(const AlphaWindow& w) {
    json j{{"schema_version", 1},
           {"center", w.center},
           {"half_width", w.empty ? 0.0 : w.half_width},
           {"delta_alpha", w.width()},
           {"full", w.full},
           {"empty", w.empty}};
    if (!w.empty) {
        j["alpha_min"] = w.lower();
        j["alpha_max"] = w.upper();
    }
    return j;
}

inline json to_json(const NumberMoments& m) {
    return json{{"n1", m.n1},
                {"n2", m.n2},
                {"n1n1m1", m.n1n1m1},
                {"n2n2m1", m.n2n2m1},
                {"n1n2", m.n1n2}};
}

inline json to_json(const OutcomeDistribution& d) {
    return json{{"p20", d.p20}, {"p02", d.p02}, {"p11", d.p11},
                {"p10", d.p10}, {"p01", d.p01}, {"p00", d.p00}};
}

}  // namespace lossybs
