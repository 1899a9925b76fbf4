#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lossybs/scattering.hpp"

namespace lossybs {

/// Default tolerance for passivity verdicts: far above the rounding noise
/// of the 2x2 algebra, far below any physical parameter precision.
inline constexpr double default_tol = 1e-9;

/// Result of the energy-constraint check.
///
/// A circuit is passive iff both per-port losses are nonnegative and the
/// phase-dependent inequality
///
///     sqrt(t^2 rho^2 + tau^2 r^2 + 2 t tau r rho cos(alpha))
///         <= sqrt((1 - t^2 - r^2)(1 - tau^2 - rho^2))
///
/// holds. The three conditions together are equivalent to the spectral
/// norm of the complex matrix being at most 1; sigma_max is computed
/// independently (by SVD) so the two routes can be cross-checked.
struct PassivityReport {
    bool passive = false;
    double per_port_loss_1 = 0.0;  // 1 - t^2 - r^2
    double per_port_loss_2 = 0.0;  // 1 - tau^2 - rho^2
    double eq_margin = 0.0;        // RHS - LHS of the inequality above
    double sigma_max = 0.0;        // largest singular value
};

inline double spectral_norm(const Eigen::Matrix2cd& m) {
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
    return svd.singularValues()(0);
}

inline PassivityReport check_passivity(const ScatteringMatrix& s,
                                       double tol = default_tol) {
    if (!(tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
    const double t2 = s.t * s.t, r2 = s.r * s.r;
    const double tau2 = s.tau * s.tau, rho2 = s.rho * s.rho;
    PassivityReport rep;
    rep.per_port_loss_1 = 1.0 - t2 - r2;
    rep.per_port_loss_2 = 1.0 - tau2 - rho2;

    // grouped as squares so the boundary cases cancel exactly: for
    // t2 = rho2 = tau2 = r2 and cos = -1 the three terms are the same
    // rounded value and the sum is a true zero
    const double lhs2 = t2 * rho2 + tau2 * r2 +
                        2.0 * (s.t * s.tau) * (s.r * s.rho) *
                            std::cos(s.alpha());
    const double lhs = std::sqrt(std::max(lhs2, 0.0));
    // The RHS is undefined when a per-port loss is negative; clamp the
    // product to zero there. The per-port conditions reject those inputs
    // regardless of the margin.
    const double prod = rep.per_port_loss_1 * rep.per_port_loss_2;
    const double rhs = std::sqrt(std::max(prod, 0.0));
    rep.eq_margin = rhs - lhs;

    rep.sigma_max = spectral_norm(complex_matrix(s));
    rep.passive = rep.per_port_loss_1 >= -tol && rep.per_port_loss_2 >= -tol &&
                  rep.eq_margin >= -tol;
    return rep;
}

/// Interval of interference phases alpha = phi1 + phi2 compatible with
/// passivity at fixed amplitudes. Always centered at pi. `full` means every
/// alpha is allowed (width 2pi); `empty` means no alpha is allowed (the
/// amplitudes are individually sub-unitary yet jointly unphysical).
struct AlphaWindow {
    double center = pi;
    double half_width = 0.0;
    bool full = false;
    bool empty = false;

    double width() const { return empty ? 0.0 : 2.0 * half_width; }
    double lower() const { return pi - half_width; }
    double upper() const { return pi + half_width; }

    bool contains(double alpha) const {
        if (empty) return false;
        if (full) return true;
        double a = ScatteringMatrix::reduce_phase(alpha);
        return std::abs(a - pi) <= half_width;
    }
};

namespace detail {
inline constexpr double boundary_eps = 1e-12;
}

/// Allowed alpha interval for the given amplitudes (phases of `s` are
/// ignored). Requires nonnegative per-port losses. When any amplitude is
/// zero the cos(alpha) term drops out of the constraint and the window
/// degenerates to either everything or nothing.
inline AlphaWindow alpha_window(const ScatteringMatrix& s) {
    const double t2 = s.t * s.t, r2 = s.r * s.r;
    const double tau2 = s.tau * s.tau, rho2 = s.rho * s.rho;
    const double loss1 = 1.0 - t2 - r2;
    const double loss2 = 1.0 - tau2 - rho2;
    if (loss1 < -default_tol || loss2 < -default_tol)
        throw std::domain_error(
            "per-port loss is negative: amplitudes alone exceed unit energy");

    const double prod = std::max(loss1, 0.0) * std::max(loss2, 0.0);
    const double base = t2 * rho2 + tau2 * r2;
    const double k = 2.0 * (s.t * s.tau) * (s.r * s.rho);

    AlphaWindow w;
    if (k == 0.0) {
        if (base - prod <= detail::boundary_eps) {
            w.half_width = pi;
            w.full = true;
        } else {
            w.empty = true;
        }
        return w;
    }
    const double bound = (prod - base) / k;  // constraint: cos(alpha) <= bound
    if (bound < -1.0 - detail::boundary_eps) {
        w.empty = true;
        return w;
    }
    w.half_width = pi - std::acos(std::clamp(bound, -1.0, 1.0));
    w.full = bound >= 1.0;
    return w;
}

/// Symmetric-circuit convenience: tau = t, rho = r.
inline AlphaWindow alpha_window_symmetric(double t, double r) {
    return alpha_window(ScatteringMatrix(t, r, t, r));
}

/// Commutator matrix of the noise operators that accompany a lossy
/// circuit: I - S S^dagger. Hermitian; positive semidefinite exactly when
/// the circuit is passive, and zero for a lossless (unitary) one.
inline Eigen::Matrix2cd noise_commutator_matrix(const ScatteringMatrix& s) {
    const Eigen::Matrix2cd m = complex_matrix(s);
    return Eigen::Matrix2cd::Identity() - m * m.adjoint();
}

}  // namespace lossybs
