#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lossybs/passivity.hpp"
#include "lossybs/scattering.hpp"

namespace lossybs {

/// Embeds a passive 2x2 matrix M in a 4x4 unitary
///
///     U = [ M                  (I - M M+)^{1/2} ]
///         [ (I - M+ M)^{1/2}   -M+              ]
///
/// acting on (port b1, port b2, loss 1, loss 2). The two extra modes absorb
/// whatever energy the circuit dissipates, so photon statistics computed
/// through U and marginalized over the loss modes realize the lossy circuit
/// exactly.
///
/// Both Hermitian square roots are eigendecompositions of I - M M+ and
/// I - M+ M; they are built from one SVD M = W S V+ as W f(S) W+ and
/// V f(S) V+ with f = sqrt(max(1 - s^2, 0)). Sharing the singular values
/// keeps the two blocks consistent, so ||U+ U - I||_max stays at rounding
/// level even on the passivity boundary where 1 - s^2 crosses zero. The
/// top-left block reproduces complex_matrix(s) bit for bit.
inline Eigen::Matrix4cd unitary_dilation(const ScatteringMatrix& s,
                                         double tol = default_tol) {
    if (!check_passivity(s, tol).passive)
        throw std::domain_error(
            "unitary dilation requires a passive scattering matrix");
    const Eigen::Matrix2cd m = complex_matrix(s);
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(
        m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector2d f;
    for (int k = 0; k < 2; ++k) {
        const double sig = svd.singularValues()(k);
        f(k) = std::sqrt(std::max(1.0 - sig * sig, 0.0));
    }
    const Eigen::Matrix2cd b =
        svd.matrixU() * f.asDiagonal() * svd.matrixU().adjoint();
    const Eigen::Matrix2cd c =
        svd.matrixV() * f.asDiagonal() * svd.matrixV().adjoint();

    Eigen::Matrix4cd u;
    u.topLeftCorner<2, 2>() = m;
    u.topRightCorner<2, 2>() = b;
    u.bottomLeftCorner<2, 2>() = c;
    u.bottomRightCorner<2, 2>() = -m.adjoint();
    return u;
}

/// Max-norm deviation of U from unitarity, ||U+ U - I||_max.
inline double unitarity_defect(const Eigen::Matrix4cd& u) {
    return (u.adjoint() * u - Eigen::Matrix4cd::Identity())
        .cwiseAbs()
        .maxCoeff();
}

}  // namespace lossybs
