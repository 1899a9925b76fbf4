#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace lossybs {

using complexd = std::complex<double>;

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

/// General lossy two-port circuit,
///
///     S = [ t           rho e^{i phi2} ]
///         [ r e^{i phi1} tau           ]
///
/// parametrized by four real amplitudes in [0,1] and two phases. The
/// amplitudes are *not* required to describe a passive device; energy
/// constraints are checked separately so that unphysical parameter sets
/// can be represented and rejected with diagnostics.
struct ScatteringMatrix {
    double t = 1.0;
    double r = 0.0;
    double tau = 1.0;
    double rho = 0.0;
    double phi1 = 0.0;  // radians, stored reduced to [0, 2pi)
    double phi2 = 0.0;

    ScatteringMatrix() = default;

    ScatteringMatrix(double t_, double r_, double tau_, double rho_,
                     double phi1_ = 0.0, double phi2_ = 0.0)
        : t(t_), r(r_), tau(tau_), rho(rho_),
          phi1(reduce_phase(phi1_)), phi2(reduce_phase(phi2_)) {
        check_amplitude(t, "t");
        check_amplitude(r, "r");
        check_amplitude(tau, "tau");
        check_amplitude(rho, "rho");
    }

    /// Sum of the transmission-reflection phase differences, reduced to
    /// [0, 2pi). Only this combination enters the energy constraint and
    /// the two-photon statistics.
    double alpha() const { return reduce_phase(phi1 + phi2); }

    static double reduce_phase(double phi) {
        if (!std::isfinite(phi))
            throw std::invalid_argument("phase must be finite");
        double p = std::fmod(phi, two_pi);
        if (p < 0.0) p += two_pi;
        if (p >= two_pi) p = 0.0;  // fmod rounding at the seam
        return p;
    }

  private:
    static void check_amplitude(double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument(std::string(name) +
                                        " must lie in [0, 1]");
    }
};

/// Complex 2x2 matrix of the circuit.
inline Eigen::Matrix2cd complex_matrix(const ScatteringMatrix& s) {
    Eigen::Matrix2cd m;
    m << complexd(s.t, 0.0), std::polar(s.rho, s.phi2),
         std::polar(s.r, s.phi1), complexd(s.tau, 0.0);
    return m;
}

/// Classical response: fields E1 (with an extra phase theta applied) and E2
/// enter the two ports; returns the output powers |b1|^2, |b2|^2. As theta
/// is swept the two outputs trace sinusoids whose peaks are offset by
/// alpha = phi1 + phi2.
inline std::pair<double, double> classical_interference(
    const ScatteringMatrix& s, double theta, complexd e1, complexd e2) {
    const Eigen::Matrix2cd m = complex_matrix(s);
    Eigen::Vector2cd in;
    in << e1 * std::polar(1.0, theta), e2;
    const Eigen::Vector2cd out = m * in;
    return {std::norm(out(0)), std::norm(out(1))};
}

}  // namespace lossybs
