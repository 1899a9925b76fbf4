#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lossybs/counting.hpp"
#include "lossybs/spectral.hpp"

namespace lossybs {

/// Fixed 15-significant-digit scientific notation, locale-independent.
/// Round-trips any double that originated from such output.
inline std::string format_number(double v) {
    char buf[48];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific,
                      14);
    if (res.ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

// --- CSV emission (UTF-8, LF, header row mandatory) --------------------------

inline void write_hom_csv(std::ostream& os, const HomCurve& curve) {
    os << "delta_t,delta_t_over_tauc,overlap_re,overlap_im,p11\n";
    for (const HomPoint& p : curve.points) {
        os << format_number(p.delta_t) << ','
           << format_number(p.delta_t / curve.coherence_time) << ','
           << format_number(p.overlap.real()) << ','
           << format_number(p.overlap.imag()) << ','
           << format_number(p.p11) << '\n';
    }
}

inline void write_map_csv(std::ostream& os, const ParameterMap& map) {
    os << "t2,r2,value,forbidden\n";
    for (const MapCell& c : map.cells) {
        os << format_number(c.t2) << ',' << format_number(c.r2) << ',';
        if (!c.forbidden) os << format_number(c.value);
        os << ',' << (c.forbidden ? "true" : "false") << '\n';
    }
}

// --- tabulated-amplitude CSV --------------------------------------------------

inline void write_tabulated_csv(std::ostream& os, const FrequencyGrid& g,
                                const std::vector<complexd>& values) {
    if (values.size() != static_cast<size_t>(g.n_points) * g.n_points)
        throw std::invalid_argument("value count must equal n_points^2");
    os << "omega1,omega2,re,im\n";
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const complexd z = values[static_cast<size_t>(i) * g.n_points + j];
            os << format_number(g.node(i)) << ',' << format_number(g.node(j))
               << ',' << format_number(z.real()) << ','
               << format_number(z.imag()) << '\n';
        }
}

namespace detail {

inline double parse_double(const std::string& field, const std::string& ctx) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::invalid_argument("malformed number in " + ctx + ": '" +
                                    field + "'");
    return v;
}

inline bool node_matches(double parsed, double node) {
    // CSV written at 15 significant digits re-parses within an ulp or two
    return std::abs(parsed - node) <=
           1e-12 * std::max(1.0, std::abs(node));
}

}  // namespace detail

/// Loads point samples from `omega1,omega2,re,im` rows in row-major grid
/// order and validates every frequency against the declared grid nodes.
inline BiphotonAmplitude read_tabulated_csv(std::istream& is,
                                            const FrequencyGrid& g) {
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("tabulated csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "omega1,omega2,re,im")
        throw std::invalid_argument(
            "tabulated csv must start with header 'omega1,omega2,re,im'");

    const size_t expected = static_cast<size_t>(g.n_points) * g.n_points;
    std::vector<complexd> values;
    values.reserve(expected);
    size_t row = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f[4];
        for (int k = 0; k < 4; ++k)
            if (!std::getline(ls, f[k], ','))
                throw std::invalid_argument("tabulated csv row " +
                                            std::to_string(row + 2) +
                                            " needs 4 fields");
        const std::string ctx = "tabulated csv row " + std::to_string(row + 2);
        const double w1 = detail::parse_double(f[0], ctx);
        const double w2 = detail::parse_double(f[1], ctx);
        const int i = static_cast<int>(row) / g.n_points;
        const int j = static_cast<int>(row) % g.n_points;
        if (row >= expected || !detail::node_matches(w1, g.node(i)) ||
            !detail::node_matches(w2, g.node(j)))
            throw std::invalid_argument(
                ctx + " does not match the declared grid node");
        values.emplace_back(detail::parse_double(f[2], ctx),
                            detail::parse_double(f[3], ctx));
        ++row;
    }
    if (values.size() != expected)
        throw std::invalid_argument(
            "tabulated csv holds " + std::to_string(values.size()) +
            " samples, expected " + std::to_string(expected));
    return make_tabulated(g, std::move(values));
}

inline BiphotonAmplitude read_tabulated_csv_file(const std::string& path,
                                                 const FrequencyGrid& g) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open '" + path + "'");
    return read_tabulated_csv(is, g);
}

}  // namespace lossybs
