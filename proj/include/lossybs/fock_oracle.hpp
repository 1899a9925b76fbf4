#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lossybs/counting.hpp"
#include "lossybs/dilation.hpp"
#include "lossybs/scattering.hpp"

namespace lossybs {

/// Occupation numbers over the four dilation modes
/// (port b1, port b2, loss 1, loss 2).
struct FockPattern {
    std::array<int, 4> occupation{};
    int total() const {
        return occupation[0] + occupation[1] + occupation[2] + occupation[3];
    }
};

/// The 10 two-photon patterns over 4 modes, in lexicographically increasing
/// order of the occupation vector. This order is part of the serialization
/// contract for pattern-resolved output.
inline const std::array<FockPattern, 10>& two_photon_patterns() {
    static const std::array<FockPattern, 10> patterns = [] {
        std::array<FockPattern, 10> out{};
        int k = 0;
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; a + b <= 2; ++b)
                for (int c = 0; a + b + c <= 2; ++c)
                    out[k++] = FockPattern{{a, b, c, 2 - a - b - c}};
        return out;
    }();
    return patterns;
}

/// Permanent by Ryser's inclusion-exclusion formula (Gray-code subset
/// walk). Exact up to rounding for the small matrices used here; the test
/// suite checks it against direct permutation enumeration.
inline complexd permanent(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    if (n != m.cols()) throw std::invalid_argument("permanent needs a square matrix");
    if (n == 0) return complexd(1.0, 0.0);
    if (n == 1) return m(0, 0);
    if (n > 24) throw std::invalid_argument("permanent: matrix too large");

    std::vector<complexd> row_sum(n, complexd(0.0, 0.0));
    complexd total(0.0, 0.0);
    uint64_t gray = 0;
    int included = 0;
    const uint64_t count = uint64_t(1) << n;
    for (uint64_t k = 1; k < count; ++k) {
        const uint64_t next = k ^ (k >> 1);
        const uint64_t bit = gray ^ next;
        const int col = std::countr_zero(bit);
        if (next & bit) {
            for (int i = 0; i < n; ++i) row_sum[i] += m(i, col);
            ++included;
        } else {
            for (int i = 0; i < n; ++i) row_sum[i] -= m(i, col);
            --included;
        }
        gray = next;
        complexd prod(1.0, 0.0);
        for (int i = 0; i < n; ++i) prod *= row_sum[i];
        const bool negate = ((n - included) % 2) != 0;
        total += negate ? -prod : prod;
    }
    return total;
}

/// Probabilities over the 10 patterns, aligned with two_photon_patterns().
struct OracleDistribution {
    std::array<double, 10> pattern_probs{};

    double sum() const {
        double s = 0.0;
        for (double p : pattern_probs) s += p;
        return s;
    }

    /// Trace out the loss modes: pattern -> (occupation b1, occupation b2)
    /// bucketed into the six detection outcomes.
    OutcomeDistribution marginal() const {
        std::array<double, 6> raw{};
        const auto& pats = two_photon_patterns();
        for (int k = 0; k < 10; ++k) {
            const int n1 = pats[k].occupation[0];
            const int n2 = pats[k].occupation[1];
            int slot;
            if (n1 == 2) slot = 0;         // p20
            else if (n2 == 2) slot = 1;    // p02
            else if (n1 == 1 && n2 == 1) slot = 2;
            else if (n1 == 1) slot = 3;
            else if (n2 == 1) slot = 4;
            else slot = 5;
            raw[slot] += pattern_probs[k];
        }
        return OutcomeDistribution::from_raw(raw);
    }
};

namespace detail {

inline void require_unitary(const Eigen::Matrix4cd& u) {
    if (unitarity_defect(u) > 1e-10)
        throw std::invalid_argument("matrix is not unitary within 1e-10");
}

inline int pattern_index(int mode_a, int mode_b) {
    // index of the pattern with one photon in each of mode_a, mode_b
    // (or two in mode_a if equal) within the lexicographic enumeration
    const auto& pats = two_photon_patterns();
    std::array<int, 4> occ{};
    occ[mode_a] += 1;
    occ[mode_b] += 1;
    for (int k = 0; k < 10; ++k)
        if (pats[k].occupation == occ) return k;
    throw std::logic_error("pattern not found");
}

}  // namespace detail

/// Exact bosonic evolution of |1,1,0,0> through a 4-mode unitary. The
/// amplitude for output pattern n is perm(U[rows(n); cols {0,1}]) divided
/// by sqrt(prod n_k!); with two photons each permanent has two terms.
inline OracleDistribution evolve_indistinguishable(const Eigen::Matrix4cd& u) {
    detail::require_unitary(u);
    OracleDistribution dist;
    const auto& pats = two_photon_patterns();
    for (int k = 0; k < 10; ++k) {
        std::array<int, 2> rows{};
        int idx = 0;
        double fact = 1.0;
        for (int mode = 0; mode < 4; ++mode) {
            const int occ = pats[k].occupation[mode];
            for (int c = 0; c < occ; ++c) rows[idx++] = mode;
            if (occ == 2) fact = 2.0;
        }
        Eigen::Matrix2cd sub;
        sub << u(rows[0], 0), u(rows[0], 1), u(rows[1], 0), u(rows[1], 1);
        const complexd amp = permanent(sub) / std::sqrt(fact);
        dist.pattern_probs[k] = std::norm(amp);
    }
    return dist;
}

/// Classical limit: each photon propagates independently, pattern
/// probabilities are products of single-photon mode probabilities.
inline OracleDistribution evolve_distinguishable(const Eigen::Matrix4cd& u) {
    detail::require_unitary(u);
    OracleDistribution dist;
    for (int ka = 0; ka < 4; ++ka) {
        const double qa = std::norm(u(ka, 0));
        for (int kb = 0; kb < 4; ++kb) {
            const double qb = std::norm(u(kb, 1));
            dist.pattern_probs[detail::pattern_index(ka, kb)] += qa * qb;
        }
    }
    return dist;
}

/// Brute-force outcome distribution with partial distinguishability:
/// the affine mixture of the indistinguishable and distinguishable
/// evolutions through the unitary dilation of `s`. For one photon per
/// port every moment is affine in the overlap, so the mixture is exact.
inline OutcomeDistribution oracle_distribution(const ScatteringMatrix& s,
                                               double overlap,
                                               double tol = default_tol) {
    if (!(overlap >= -1e-12 && overlap <= 1.0 + 1e-12))
        throw std::invalid_argument("overlap must lie in [0, 1]");
    const Eigen::Matrix4cd u = unitary_dilation(s, tol);
    const OutcomeDistribution ind = evolve_indistinguishable(u).marginal();
    const OutcomeDistribution dis = evolve_distinguishable(u).marginal();
    std::array<double, 6> raw;
    for (int k = 0; k < 6; ++k)
        raw[k] = overlap * ind.raw[k] + (1.0 - overlap) * dis.raw[k];
    return OutcomeDistribution::from_raw(raw);
}

}  // namespace lossybs
