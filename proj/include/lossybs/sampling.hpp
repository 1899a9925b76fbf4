#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "lossybs/counting.hpp"
#include "lossybs/fock_oracle.hpp"
#include "lossybs/passivity.hpp"
#include "lossybs/scattering.hpp"

namespace lossybs {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent engine for sample `index` of a sweep. Splitting the seed per
/// index keeps each sample reproducible from (seed, index) alone, whatever
/// order or batching the sweep runs in.
inline std::mt19937_64 engine_for(uint64_t seed, uint64_t index) {
    uint64_t state = seed ^ (0xA02BDBF7BB3C0A7ULL * (index + 1));
    const uint64_t a = splitmix64(state);
    const uint64_t b = splitmix64(state);
    std::seed_seq seq{static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                      static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

/// Amplitudes uniform on [0,1], phases uniform on [0, 2pi). Passive and
/// non-passive parameter sets both occur.
inline ScatteringMatrix random_scattering_matrix(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, two_pi);
    return ScatteringMatrix(amp(rng), amp(rng), amp(rng), amp(rng), ph(rng),
                            ph(rng));
}

inline ScatteringMatrix random_passive_matrix(std::mt19937_64& rng,
                                              double tol = default_tol) {
    for (;;) {
        const ScatteringMatrix s = random_scattering_matrix(rng);
        if (check_passivity(s, tol).passive) return s;
    }
}

/// Parameter set sitting on the energy-constraint boundary: amplitudes with
/// nonnegative per-port losses and alpha chosen so the inequality holds
/// with equality (margin 0 up to rounding).
inline ScatteringMatrix random_boundary_matrix(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    for (;;) {
        const double t = amp(rng), r = amp(rng), tau = amp(rng),
                     rho = amp(rng);
        const double loss1 = 1.0 - t * t - r * r;
        const double loss2 = 1.0 - tau * tau - rho * rho;
        if (loss1 < 0.0 || loss2 < 0.0) continue;
        const double k = 2.0 * (t * tau) * (r * rho);
        if (k == 0.0) continue;
        const double bound =
            (loss1 * loss2 - t * t * rho * rho - tau * tau * r * r) / k;
        if (bound < -1.0 || bound > 1.0) continue;
        const double alpha = std::acos(bound);
        return ScatteringMatrix(t, r, tau, rho, alpha / 2.0, alpha / 2.0);
    }
}

// --- randomized closed-form vs oracle comparison -----------------------------

struct EquivalenceSummary {
    int samples = 0;
    uint64_t seed = 0;
    std::vector<double> overlaps;
    double max_deviation = 0.0;
    double tolerance = 1e-10;
    bool pass = false;
    ScatteringMatrix worst_matrix;
    double worst_overlap = 0.0;
    int worst_component = 0;  // index into outcome_names()
};

/// Sweeps seeded random passive matrices and a list of real overlaps,
/// comparing the closed-form distribution against the Fock-space oracle
/// component-wise. `closed_form_perturbation` shifts the closed-form
/// coincidence before comparison; it exists for fault-injection self-tests
/// and must stay 0 in real use.
inline EquivalenceSummary oracle_equivalence_sweep(
    int samples, uint64_t seed,
    const std::vector<double>& overlaps = {0.0, 0.31, 0.5, 1.0},
    double tolerance = 1e-10, double closed_form_perturbation = 0.0) {
    if (samples < 1)
        throw std::invalid_argument("sample count must be at least 1");
    EquivalenceSummary sum;
    sum.samples = samples;
    sum.seed = seed;
    sum.overlaps = overlaps;
    sum.tolerance = tolerance;
    for (int idx = 0; idx < samples; ++idx) {
        auto rng = engine_for(seed, static_cast<uint64_t>(idx));
        const ScatteringMatrix s = random_passive_matrix(rng);
        for (double i : overlaps) {
            OutcomeDistribution closed =
                outcome_probabilities(s, complexd(i, 0.0));
            closed.p11 += closed_form_perturbation;
            const OutcomeDistribution oracle = oracle_distribution(s, i);
            const std::array<double, 6> a = {closed.p20, closed.p02,
                                             closed.p11, closed.p10,
                                             closed.p01, closed.p00};
            const std::array<double, 6> b = {oracle.p20, oracle.p02,
                                             oracle.p11, oracle.p10,
                                             oracle.p01, oracle.p00};
            for (int c = 0; c < 6; ++c) {
                const double dev = std::abs(a[c] - b[c]);
                if (dev > sum.max_deviation) {
                    sum.max_deviation = dev;
                    sum.worst_matrix = s;
                    sum.worst_overlap = i;
                    sum.worst_component = c;
                }
            }
        }
    }
    sum.pass = sum.max_deviation <= tolerance;
    return sum;
}

}  // namespace lossybs
