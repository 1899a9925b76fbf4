#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lossybs/passivity.hpp"
#include "lossybs/scattering.hpp"
#include "lossybs/spectral.hpp"

namespace lossybs {

/// The six detection outcomes for one photon per input port. Values are
/// clamped to [0, 1] when they stray within 1e-12 of the boundary; the
/// unclamped numbers are kept in `raw` (order p20, p02, p11, p10, p01, p00)
/// so floating-point dust stays distinguishable from a real violation.
struct OutcomeDistribution {
    double p20 = 0.0, p02 = 0.0, p11 = 0.0, p10 = 0.0, p01 = 0.0, p00 = 0.0;
    std::array<double, 6> raw{};

    double sum() const { return p20 + p02 + p11 + p10 + p01 + p00; }

    static OutcomeDistribution from_raw(const std::array<double, 6>& v) {
        OutcomeDistribution d;
        d.raw = v;
        d.p20 = clamp_dust(v[0]);
        d.p02 = clamp_dust(v[1]);
        d.p11 = clamp_dust(v[2]);
        d.p10 = clamp_dust(v[3]);
        d.p01 = clamp_dust(v[4]);
        d.p00 = clamp_dust(v[5]);
        return d;
    }

  private:
    static double clamp_dust(double v) {
        if (v < 0.0 && v >= -1e-12) return 0.0;
        if (v > 1.0 && v <= 1.0 + 1e-12) return 1.0;
        return v;
    }
};

inline const std::array<const char*, 6>& outcome_names() {
    static const std::array<const char*, 6> names = {"p20", "p02", "p11",
                                                     "p10", "p01", "p00"};
    return names;
}

/// First and second factorial moments of the output photon numbers.
/// Every moment is affine in the overlap I.
struct NumberMoments {
    double n1 = 0.0;      // <N1>
    double n2 = 0.0;      // <N2>
    double n1n1m1 = 0.0;  // <N1 (N1 - 1)>
    double n2n2m1 = 0.0;  // <N2 (N2 - 1)>
    double n1n2 = 0.0;    // <N1 N2>
};

namespace detail {

inline void require_counting_inputs(const ScatteringMatrix& s, complexd i,
                                    double tol) {
    if (!check_passivity(s, tol).passive)
        throw std::domain_error("scattering matrix is not passive");
    if (std::abs(i) > 1.0 + 1e-8)
        throw std::invalid_argument("overlap magnitude exceeds 1");
}

}  // namespace detail

/// Number-operator moments for one photon per input port with spectral
/// overlap I. A complex overlap enters as Re I in the bunching moments and
/// Re[I e^{i alpha}] in the coincidence cross term; both reduce to the
/// usual real-I expressions and keep every probability real.
inline NumberMoments number_moments(const ScatteringMatrix& s, complexd i,
                                    double tol = default_tol) {
    detail::require_counting_inputs(s, i, tol);
    const double t2 = s.t * s.t, r2 = s.r * s.r;
    const double tau2 = s.tau * s.tau, rho2 = s.rho * s.rho;
    const double re = i.real();
    const double cross = (i * std::polar(1.0, s.alpha())).real();

    NumberMoments m;
    m.n1 = t2 + rho2;
    m.n2 = tau2 + r2;
    m.n1n1m1 = 2.0 * t2 * rho2 * (1.0 + re);
    m.n2n2m1 = 2.0 * tau2 * r2 * (1.0 + re);
    m.n1n2 = t2 * tau2 + r2 * rho2 + 2.0 * (s.t * s.tau) * (s.r * s.rho) * cross;
    return m;
}

/// Detection probabilities from the factorial moments. The six expressions
/// sum to one identically.
inline OutcomeDistribution outcome_probabilities(const ScatteringMatrix& s,
                                                 complexd i,
                                                 double tol = default_tol) {
    const NumberMoments m = number_moments(s, i, tol);
    std::array<double, 6> raw;
    raw[0] = m.n1n1m1 / 2.0;                                   // p20
    raw[1] = m.n2n2m1 / 2.0;                                   // p02
    raw[2] = m.n1n2;                                           // p11
    raw[3] = m.n1 - m.n1n1m1 - m.n1n2;                         // p10
    raw[4] = m.n2 - m.n2n2m1 - m.n1n2;                         // p01
    raw[5] = 1.0 - m.n1 - m.n2 + m.n1n2 + m.n1n1m1 / 2.0 +
             m.n2n2m1 / 2.0;                                   // p00
    return OutcomeDistribution::from_raw(raw);
}

/// Closed forms for the symmetric circuit (tau = t, rho = r) with a real
/// overlap. Agrees with outcome_probabilities on the embedded matrix
/// (phi1 = phi2 = alpha / 2) to machine precision.
inline OutcomeDistribution symmetric_probabilities(double t, double r,
                                                   double alpha, double i,
                                                   double tol = default_tol) {
    const ScatteringMatrix s(t, r, t, r);  // validates amplitude ranges
    const double t2 = s.t * s.t, r2 = s.r * s.r;
    const double loss = 1.0 - t2 - r2;
    if (loss < -tol)
        throw std::domain_error("per-port loss is negative");
    if (t2 * r2 > 0.0 &&
        std::abs(std::cos(alpha / 2.0)) > loss / (2.0 * s.t * s.r) + tol)
        throw std::domain_error(
            "alpha lies outside the passive window for these amplitudes");
    if (std::abs(i) > 1.0 + 1e-8)
        throw std::invalid_argument("overlap magnitude exceeds 1");

    const double t4 = t2 * t2, r4 = r2 * r2;
    const double ca = std::cos(alpha);
    std::array<double, 6> raw;
    raw[2] = t4 + r4 + 2.0 * t2 * r2 * i * ca;
    raw[0] = raw[1] = t2 * r2 * (1.0 + i);
    raw[3] = raw[4] =
        t2 + r2 - t4 - r4 - 2.0 * t2 * r2 * (1.0 + i * (1.0 + ca));
    raw[5] =
        1.0 - 2.0 * (t2 + r2) + t4 + r4 + 2.0 * t2 * r2 * (1.0 + i * (1.0 + ca));
    return OutcomeDistribution::from_raw(raw);
}

// --- delay scans ------------------------------------------------------------

struct HomPoint {
    double delta_t = 0.0;
    complexd overlap;
    double p11 = 0.0;
};

struct HomCurve {
    std::vector<HomPoint> points;
    ScatteringMatrix matrix;
    std::string amplitude;
    double coherence_time = 0.0;  // FWHM of |I(dt)|
};

/// Coincidence probability versus delay: normalizes psi on the grid,
/// evaluates the spectral overlap at each delay and feeds it through the
/// counting formulas.
inline HomCurve hom_scan(const ScatteringMatrix& s,
                         const BiphotonAmplitude& psi,
                         const FrequencyGrid& grid,
                         const std::vector<double>& delta_t_list,
                         double tol = default_tol) {
    if (!check_passivity(s, tol).passive)
        throw std::domain_error("scattering matrix is not passive");
    const auto [psin, norm] = normalize(psi, grid);
    (void)norm;
    OverlapEvaluator ev(psin, grid);

    HomCurve curve;
    curve.matrix = s;
    curve.amplitude = psi.describe();
    curve.coherence_time = ev.coherence_time();
    curve.points.reserve(delta_t_list.size());
    for (double dt : delta_t_list) {
        const complexd i = ev.value(dt);
        curve.points.push_back({dt, i, outcome_probabilities(s, i, tol).p11});
    }
    return curve;
}

// --- window-restricted extremes ---------------------------------------------

/// Largest coincidence probability over the allowed alpha window at unit
/// overlap. cos(alpha) is monotone on [0, pi], so the maximum sits at the
/// window edge alpha = pi - half_width; no numeric search is involved.
inline double max_coincidence(double t, double r, double tau, double rho) {
    const ScatteringMatrix s(t, r, tau, rho);
    const AlphaWindow w = alpha_window(s);
    if (w.empty)
        throw std::domain_error(
            "no interference phase is compatible with passivity for these "
            "amplitudes");
    const double t2 = s.t * s.t, r2 = s.r * s.r;
    const double tau2 = s.tau * s.tau, rho2 = s.rho * s.rho;
    return t2 * tau2 + r2 * rho2 +
           2.0 * (s.t * s.tau) * (s.r * s.rho) * std::cos(pi - w.half_width);
}

/// Programmable range of the coincidence probability for a symmetric
/// circuit: the spread of p11 over the allowed window at unit overlap,
/// normalized by the distinguishable-photon baseline t^4 + r^4. Equals
/// 4 t^2 r^2 / (t^4 + r^4) when the window is full, 2 for balanced lossy
/// circuits, and 0 for lossless ones.
inline double programmability(double t, double r) {
    const ScatteringMatrix s(t, r, t, r);
    const double t2 = s.t * s.t, r2 = s.r * s.r;
    const double baseline = t2 * t2 + r2 * r2;
    if (baseline == 0.0)
        throw std::invalid_argument(
            "programmability is undefined for t = r = 0");
    const AlphaWindow w = alpha_window(s);  // throws if loss is negative
    return 2.0 * t2 * r2 * (1.0 - std::cos(w.half_width)) / baseline;
}

// --- parameter maps ---------------------------------------------------------

enum class MapKind { tunability, max_coincidence, programmability };

inline const char* to_string(MapKind k) {
    switch (k) {
        case MapKind::tunability: return "tunability";
        case MapKind::max_coincidence: return "max_coincidence";
        case MapKind::programmability: return "programmability";
    }
    return "?";
}

/// One cell of a symmetric-circuit map over (t^2, r^2). Cells above the
/// lossless anti-diagonal are marked forbidden explicitly; their value
/// field is meaningless and never emitted.
struct MapCell {
    double t2 = 0.0;
    double r2 = 0.0;
    double value = 0.0;
    bool forbidden = false;
};

struct ParameterMap {
    MapKind kind = MapKind::tunability;
    int resolution = 0;
    std::vector<MapCell> cells;  // row-major, t2 outer then r2

    const MapCell& at(int i, int j) const {
        return cells[static_cast<size_t>(i) * resolution + j];
    }
};

/// Symmetric-case map sampled at cell centers (i + 1/2) / resolution.
inline ParameterMap parameter_map(MapKind kind, int resolution) {
    if (resolution < 2)
        throw std::invalid_argument("map resolution must be at least 2");
    ParameterMap map;
    map.kind = kind;
    map.resolution = resolution;
    map.cells.resize(static_cast<size_t>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i) {
        const double t2 = (i + 0.5) / resolution;
        for (int j = 0; j < resolution; ++j) {
            const double r2 = (j + 0.5) / resolution;
            MapCell& cell = map.cells[static_cast<size_t>(i) * resolution + j];
            cell.t2 = t2;
            cell.r2 = r2;
            cell.forbidden = t2 + r2 > 1.0;
            if (cell.forbidden) continue;
            const double t = std::sqrt(t2), r = std::sqrt(r2);
            switch (kind) {
                case MapKind::tunability:
                    cell.value = alpha_window_symmetric(t, r).width();
                    break;
                case MapKind::max_coincidence:
                    cell.value = max_coincidence(t, r, t, r);
                    break;
                case MapKind::programmability:
                    cell.value = programmability(t, r);
                    break;
            }
        }
    }
    return map;
}

inline ParameterMap tunability_map(int resolution) {
    return parameter_map(MapKind::tunability, resolution);
}
inline ParameterMap max_coincidence_map(int resolution) {
    return parameter_map(MapKind::max_coincidence, resolution);
}
inline ParameterMap programmability_map(int resolution) {
    return parameter_map(MapKind::programmability, resolution);
}

}  // namespace lossybs
