#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lossybs/scattering.hpp"

namespace lossybs {

/// Uniform tensor grid for the 2-D frequency integrals. Frequencies are
/// dimensionless (units of the single-photon amplitude bandwidth).
struct FrequencyGrid {
    double omega_min = 0.0;
    double omega_max = 1.0;
    int n_points = 257;  // per axis

    FrequencyGrid() = default;
    FrequencyGrid(double lo, double hi, int n)
        : omega_min(lo), omega_max(hi), n_points(n) {
        if (!(omega_min < omega_max))
            throw std::invalid_argument("grid requires omega_min < omega_max");
        if (n_points < 16)
            throw std::invalid_argument("grid requires n_points >= 16");
    }

    double spacing() const {
        return (omega_max - omega_min) / (n_points - 1);
    }
    double node(int i) const { return omega_min + i * spacing(); }

    /// Same span, halved spacing (node count 2n-1 keeps both endpoints).
    FrequencyGrid refined() const {
        return FrequencyGrid(omega_min, omega_max, 2 * n_points - 1);
    }

    friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
        return a.omega_min == b.omega_min && a.omega_max == b.omega_max &&
               a.n_points == b.n_points;
    }
};

/// Composite-Simpson weights on the grid nodes. When the interval count is
/// odd the last three intervals use the 3/8 rule so any n_points >= 16
/// works; the default 257 and every refined() grid hit the pure rule.
inline std::vector<double> quadrature_weights(const FrequencyGrid& g) {
    const int n = g.n_points;
    const double h = g.spacing();
    std::vector<double> w(n, 0.0);
    const bool even_intervals = (n - 1) % 2 == 0;
    const int m = even_intervals ? n : n - 3;  // nodes covered by Simpson
    w[0] = h / 3.0;
    for (int i = 1; i + 1 < m; ++i) w[i] = (i % 2 ? 4.0 : 2.0) * h / 3.0;
    w[m - 1] = h / 3.0;
    if (!even_intervals) {
        w[m - 1] += 3.0 * h / 8.0;
        w[m] = 9.0 * h / 8.0;
        w[m + 1] = 9.0 * h / 8.0;
        w[m + 2] = 3.0 * h / 8.0;
    }
    return w;
}

/// sin(pi x) / (pi x), continuous at zero.
inline double sinc(double x) {
    const double px = pi * x;
    if (std::abs(px) < 1e-4) return 1.0 - px * px / 6.0;
    return std::sin(px) / px;
}

// --- joint spectral amplitude families ------------------------------------

/// psi(w1, w2) = exp(-((w1-c1)/width1)^2) * exp(-((w2-c2)/width2)^2).
/// Widths are amplitude 1/e half-widths.
struct GaussianSeparable {
    double center1, center2, width1, width2;
    GaussianSeparable(double c1, double c2, double w1, double w2)
        : center1(c1), center2(c2), width1(w1), width2(w2) {
        if (!(width1 > 0.0) || !(width2 > 0.0))
            throw std::invalid_argument("gaussian widths must be positive");
    }
};

/// Down-conversion amplitude under pulsed pumping,
///
///   psi(wi, ws) = sinc(dk L / 2pi) exp(-[(ws + wi - omega_p) tau_p / 2]^2),
///
/// phase-matched at degeneracy with first-order mismatch slopes:
///   dk = kappa_i (wi - omega_p/2) + kappa_s (ws - omega_p/2).
struct SpdcSincGaussian {
    double omega_p;  // pump center frequency
    double tau_p;    // pump duration
    double length;   // crystal length
    double kappa_i;  // mismatch slope, idler axis
    double kappa_s;  // mismatch slope, signal axis
    SpdcSincGaussian(double wp, double tp, double len, double ki, double ks)
        : omega_p(wp), tau_p(tp), length(len), kappa_i(ki), kappa_s(ks) {
        if (!(omega_p > 0.0))
            throw std::invalid_argument("omega_p must be positive");
        if (!(tau_p > 0.0))
            throw std::invalid_argument("tau_p must be positive");
        if (!(length > 0.0))
            throw std::invalid_argument("crystal length must be positive");
    }
};

inline complexd spdc_amplitude(const SpdcSincGaussian& p, double omega_i,
                               double omega_s) {
    const double half = p.omega_p / 2.0;
    const double dk =
        p.kappa_i * (omega_i - half) + p.kappa_s * (omega_s - half);
    const double x = dk * p.length / two_pi;
    const double pump = (omega_s + omega_i - p.omega_p) * p.tau_p / 2.0;
    return complexd(sinc(x) * std::exp(-pump * pump), 0.0);
}

/// Point samples on a fixed grid, row-major: values[i * n + j] is
/// psi(node(i), node(j)). No interpolation is ever applied.
struct TabulatedAmplitude {
    FrequencyGrid grid;
    std::shared_ptr<const std::vector<complexd>> values;
    TabulatedAmplitude(FrequencyGrid g,
                       std::shared_ptr<const std::vector<complexd>> v)
        : grid(g), values(std::move(v)) {
        if (!values ||
            values->size() != static_cast<size_t>(grid.n_points) *
                                  static_cast<size_t>(grid.n_points))
            throw std::invalid_argument(
                "tabulated amplitude size must equal n_points^2");
    }
};

/// Joint spectral amplitude psi(w1, w2): one of the shapes above times a
/// real scale factor (the handle normalize() adjusts).
struct BiphotonAmplitude {
    std::variant<GaussianSeparable, SpdcSincGaussian, TabulatedAmplitude>
        shape;
    double scale = 1.0;

    bool is_tabulated() const {
        return std::holds_alternative<TabulatedAmplitude>(shape);
    }

    /// Pointwise evaluation; only defined for the functional shapes.
    complexd operator()(double w1, double w2) const {
        if (const auto* g = std::get_if<GaussianSeparable>(&shape)) {
            const double a = (w1 - g->center1) / g->width1;
            const double b = (w2 - g->center2) / g->width2;
            return complexd(scale * std::exp(-a * a) * std::exp(-b * b), 0.0);
        }
        if (const auto* p = std::get_if<SpdcSincGaussian>(&shape))
            return scale * spdc_amplitude(*p, w1, w2);
        throw std::logic_error(
            "tabulated amplitude is sampled, not evaluable off-grid");
    }

    /// Values on the grid nodes, row-major. For a tabulated shape the grid
    /// must be exactly the defining grid.
    std::vector<complexd> samples_on(const FrequencyGrid& g) const {
        if (const auto* t = std::get_if<TabulatedAmplitude>(&shape)) {
            if (!(t->grid == g))
                throw std::invalid_argument(
                    "tabulated amplitude is defined on a different grid");
            std::vector<complexd> v = *t->values;
            for (auto& z : v) z *= scale;
            return v;
        }
        const int n = g.n_points;
        std::vector<complexd> v(static_cast<size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            const double w1 = g.node(i);
            for (int j = 0; j < n; ++j)
                v[static_cast<size_t>(i) * n + j] = (*this)(w1, g.node(j));
        }
        return v;
    }

    std::string describe() const {
        if (const auto* g = std::get_if<GaussianSeparable>(&shape))
            return "gaussian(center1=" + std::to_string(g->center1) +
                   ",center2=" + std::to_string(g->center2) +
                   ",width1=" + std::to_string(g->width1) +
                   ",width2=" + std::to_string(g->width2) + ")";
        if (const auto* p = std::get_if<SpdcSincGaussian>(&shape))
            return "spdc(omega_p=" + std::to_string(p->omega_p) +
                   ",tau_p=" + std::to_string(p->tau_p) +
                   ",length=" + std::to_string(p->length) +
                   ",kappa_i=" + std::to_string(p->kappa_i) +
                   ",kappa_s=" + std::to_string(p->kappa_s) + ")";
        return "tabulated";
    }
};

inline BiphotonAmplitude make_gaussian(double c1, double c2, double w1,
                                       double w2) {
    return {GaussianSeparable(c1, c2, w1, w2), 1.0};
}
inline BiphotonAmplitude make_spdc(double omega_p, double tau_p, double length,
                                   double kappa_i, double kappa_s) {
    return {SpdcSincGaussian(omega_p, tau_p, length, kappa_i, kappa_s), 1.0};
}
inline BiphotonAmplitude make_tabulated(const FrequencyGrid& g,
                                        std::vector<complexd> values) {
    return {TabulatedAmplitude(
                g, std::make_shared<const std::vector<complexd>>(
                       std::move(values))),
            1.0};
}

// --- normalization ---------------------------------------------------------

/// Discrete L2 norm with the same quadrature weights the overlap integral
/// uses. Sharing one rule makes the normalized overlap at zero delay exact
/// for exchange-symmetric amplitudes, which a mixed-rule normalization
/// would miss by the quadrature-rule difference.
inline double grid_norm(const BiphotonAmplitude& psi, const FrequencyGrid& g) {
    const auto v = psi.samples_on(g);
    const auto w = quadrature_weights(g);
    const int n = g.n_points;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            row += w[j] * std::norm(v[static_cast<size_t>(i) * n + j]);
        sum += w[i] * row;
    }
    return std::sqrt(sum);
}

/// Rescales psi to unit discrete L2 norm on the grid; returns the rescaled
/// amplitude and the pre-normalization norm.
inline std::pair<BiphotonAmplitude, double> normalize(
    const BiphotonAmplitude& psi, const FrequencyGrid& g) {
    const double norm = grid_norm(psi, g);
    if (!(norm >= 1e-300))
        throw std::invalid_argument(
            "amplitude vanishes on the grid; grid misconfigured");
    BiphotonAmplitude out = psi;
    out.scale = psi.scale / norm;
    return {out, norm};
}

// --- grid coverage ----------------------------------------------------------

namespace detail {

inline void require_margin(double lo, double hi, double center, double width,
                           const char* what) {
    if (!(lo <= center - 6.0 * width && hi >= center + 6.0 * width))
        throw std::invalid_argument(
            std::string("grid span does not cover 6 ") + what +
            " widths around the marginal center");
}

}  // namespace detail

/// The grid must extend at least 6 amplitude widths beyond each marginal's
/// center (6 sinc lobes for the down-conversion shape). Silent truncation
/// corrupts the normalization and the overlap together, so a short grid is
/// an error rather than a warning. Tabulated data is taken as given.
inline void check_grid_coverage(const BiphotonAmplitude& psi,
                                const FrequencyGrid& g) {
    if (const auto* ga = std::get_if<GaussianSeparable>(&psi.shape)) {
        detail::require_margin(g.omega_min, g.omega_max, ga->center1,
                               ga->width1, "gaussian");
        detail::require_margin(g.omega_min, g.omega_max, ga->center2,
                               ga->width2, "gaussian");
        return;
    }
    if (const auto* p = std::get_if<SpdcSincGaussian>(&psi.shape)) {
        const double c = p->omega_p / 2.0;
        detail::require_margin(g.omega_min, g.omega_max, c, 2.0 / p->tau_p,
                               "pump-envelope");
        if (p->kappa_i == 0.0 && p->kappa_s == 0.0)
            throw std::invalid_argument(
                "spdc amplitude with kappa_i = kappa_s = 0 does not decay "
                "within any grid");
        if (p->kappa_i != 0.0)
            detail::require_margin(g.omega_min, g.omega_max, c,
                                   two_pi / (std::abs(p->kappa_i) * p->length),
                                   "sinc-lobe");
        if (p->kappa_s != 0.0)
            detail::require_margin(g.omega_min, g.omega_max, c,
                                   two_pi / (std::abs(p->kappa_s) * p->length),
                                   "sinc-lobe");
        return;
    }
    // tabulated: nothing to check
}

// --- overlap integral -------------------------------------------------------

struct OverlapResult {
    complexd value;
    double delta_t = 0.0;
    FrequencyGrid grid_used;
    bool converged = true;
};

/// Evaluates the two-photon spectral overlap
///
///   I(dt) = sum_ij w_i w_j psi(w_i, w_j) conj(psi(w_j, w_i))
///           exp(-i (w_i - w_j) dt)
///
/// for a normalized amplitude. Because the grid is uniform, w_i - w_j only
/// depends on i - j; collapsing the double sum onto diagonals once makes
/// each delay an O(n) evaluation, so delay scans and the coherence-time
/// search are cheap. Summation order is fixed (rows in index order, then an
/// ordered reduction), so results do not depend on scheduling.
///
/// The (i,j) and (j,i) terms are complex conjugates, so the value is real
/// up to rounding for every amplitude; the imaginary part is reported as a
/// numerical diagnostic.
class OverlapEvaluator {
  public:
    OverlapEvaluator(const BiphotonAmplitude& normalized_psi,
                     const FrequencyGrid& grid)
        : grid_(grid) {
        check_grid_coverage(normalized_psi, grid);
        const double norm = grid_norm(normalized_psi, grid);
        if (std::abs(norm - 1.0) > 1e-6)
            throw std::invalid_argument(
                "amplitude is not normalized on the grid");
        coarse_ = diagonal_coefficients(normalized_psi, grid);
        if (!normalized_psi.is_tabulated()) {
            refined_grid_ = grid.refined();
            refined_ = diagonal_coefficients(normalized_psi, refined_grid_);
            has_refined_ = true;
        }
    }

    /// Overlap on the construction grid.
    complexd value(double delta_t) const {
        return sum_diagonals(coarse_, grid_.spacing(), delta_t);
    }

    /// Overlap plus a convergence verdict: the value is converged when
    /// halving the grid spacing moves |I| by less than 1e-6. Tabulated
    /// amplitudes admit no refinement; their value is exact for the given
    /// samples and reported converged.
    OverlapResult result(double delta_t) const {
        OverlapResult r;
        r.delta_t = delta_t;
        r.grid_used = grid_;
        r.value = value(delta_t);
        if (has_refined_) {
            const complexd fine =
                sum_diagonals(refined_, refined_grid_.spacing(), delta_t);
            r.converged = std::abs(std::abs(fine) - std::abs(r.value)) < 1e-6;
        }
        return r;
    }

    /// Full width at half maximum of |I(dt)|, located by doubling out to
    /// the first half-crossing and bisecting. |I| is periodic on a sampled
    /// grid (period 2pi/h), so the search is capped at the half-period;
    /// amplitudes whose overlap never decays that far are rejected.
    double coherence_time() const {
        const double i0 = std::abs(value(0.0));
        if (!(i0 > 0.0))
            throw std::domain_error("overlap vanishes at zero delay");
        const double target = i0 / 2.0;
        const double cap = pi / grid_.spacing();
        double lo = 0.0;
        double hi = 1.0 / (grid_.omega_max - grid_.omega_min);
        while (std::abs(value(hi)) >= target) {
            lo = hi;
            hi *= 2.0;
            if (hi > cap)
                throw std::domain_error(
                    "overlap magnitude does not reach half maximum within "
                    "the resolvable delay range");
        }
        for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (std::abs(value(mid)) >= target ? lo : hi) = mid;
        }
        return lo + hi;  // 2 * half-crossing delay
    }

    const FrequencyGrid& grid() const { return grid_; }

  private:
    static std::vector<complexd> diagonal_coefficients(
        const BiphotonAmplitude& psi, const FrequencyGrid& g) {
        const auto v = psi.samples_on(g);
        const auto w = quadrature_weights(g);
        const int n = g.n_points;
        std::vector<complexd> diag(2 * n - 1, complexd(0.0, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const complexd term =
                    w[i] * w[j] * v[static_cast<size_t>(i) * n + j] *
                    std::conj(v[static_cast<size_t>(j) * n + i]);
                diag[i - j + n - 1] += term;
            }
        return diag;
    }

    static complexd sum_diagonals(const std::vector<complexd>& diag,
                                  double spacing, double delta_t) {
        const int n = (static_cast<int>(diag.size()) + 1) / 2;
        complexd sum(0.0, 0.0);
        for (int idx = 0; idx < static_cast<int>(diag.size()); ++idx) {
            const int d = idx - (n - 1);
            sum += diag[idx] * std::polar(1.0, -d * spacing * delta_t);
        }
        return sum;
    }

    FrequencyGrid grid_;
    FrequencyGrid refined_grid_;
    std::vector<complexd> coarse_;
    std::vector<complexd> refined_;
    bool has_refined_ = false;
};

/// One-shot overlap at a single delay. Requires psi normalized on `grid`.
inline OverlapResult overlap_integral(const BiphotonAmplitude& psi,
                                      double delta_t,
                                      const FrequencyGrid& grid) {
    return OverlapEvaluator(psi, grid).result(delta_t);
}

/// Element-wise overlap over a delay list, order preserved.
inline std::vector<OverlapResult> overlap_scan(
    const BiphotonAmplitude& psi, const std::vector<double>& delta_t_list,
    const FrequencyGrid& grid) {
    std::vector<OverlapResult> out;
    out.reserve(delta_t_list.size());
    if (delta_t_list.empty()) return out;
    OverlapEvaluator ev(psi, grid);
    for (double dt : delta_t_list) out.push_back(ev.result(dt));
    return out;
}

}  // namespace lossybs
