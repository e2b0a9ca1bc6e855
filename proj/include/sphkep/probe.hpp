// sphkep/probe.hpp
//
// Level-set probe for candidate two-variable reductions of the spherical
// passing time. A candidate is a pair of scalar functions (f, g) of the
// geodesic triangle (theta1, theta2, theta12); the probe samples arcs at a
// fixed energy, groups samples whose (f, g) coincide within a bin tolerance,
// and reports the largest transit-time spread seen inside any group. A
// spread at the numerical noise level is evidence (never proof) that the
// transit time is a function of (f, g) on that energy level; a spread far
// above it disproves the candidate.
//
// The same scanner doubles as its own validation harness on flat data, where
// the answer is known: with f = r1 + r2 and g = chord the spread must vanish
// (Lambert), while f = r1 alone must produce order-one spread.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sphkep/expr.hpp"
#include "sphkep/kepler_sphere.hpp"

namespace sphkep {

/// A named candidate reduction (f, g) of the triangle variables.
struct InvariantCandidate {
    std::string name;
    std::function<double(double, double, double)> f;
    std::function<double(double, double, double)> g;

    /**
     * @brief Register a candidate, checking f and g are symmetric under
     *        swapping the first two arguments on a fixed sample of triangles.
     *
     * Transit times cannot distinguish an arc from its reverse, so honest
     * candidates must be endpoint-symmetric. Asymmetric ones are rejected
     * unless allow_asymmetric is set (used deliberately for known-bad
     * controls in the validation harness).
     *
     * @throws InvalidArgument on an asymmetric candidate without the flag.
     */
    [[nodiscard]] static InvariantCandidate make(std::string name,
                                                 std::function<double(double, double, double)> f,
                                                 std::function<double(double, double, double)> g,
                                                 bool allow_asymmetric = false);

    /// As make(), with f and g compiled from expression strings in the
    /// variables t1, t2, t12 (see expr.hpp).
    [[nodiscard]] static InvariantCandidate from_expressions(std::string name,
                                                             std::string_view f_src,
                                                             std::string_view g_src,
                                                             bool allow_asymmetric = false);
};

/// Built-in spherical candidates:
///   theta-sum          f = t1 + t2,               g = t12
///   half-tangent-sum   f = tan(t1/2) + tan(t2/2), g = t12
///   tangent-sum        f = tan(t1) + tan(t2),     g = tan(t12)
///   cosine-sum         f = cos(t1) + cos(t2),     g = cos(t12)
[[nodiscard]] std::vector<InvariantCandidate> builtin_candidates();

/// Flat-harness control candidates over (r1, r2, c) data.
[[nodiscard]] InvariantCandidate flat_sum_chord_candidate();     // f = d1 + d2, g = d12
[[nodiscard]] InvariantCandidate flat_first_radius_candidate();  // f = d1, g = d12 (known bad)

/// One sampled arc. For spherical data d* are the geodesic triangle entries
/// and transit the spherical passing time; the flat harness stores the
/// planar distances (r1, r2, chord) and the flat passing time in the same
/// slots. `energy` labels the level set the sample belongs to.
struct ArcRecord {
    double a{0.0};
    double e{0.0};
    double u1{0.0};
    double u2{0.0};
    double d1{0.0};
    double d2{0.0};
    double d12{0.0};
    double transit{0.0};
    double energy{0.0};
    int orientation{1};   // sign of u2 - u1
    long revolutions{0};  // floor(|u2 - u1| / 2 pi)
};

struct ScanReport {
    double energy{0.0};
    std::string candidate;
    std::size_t samples{0};
    std::size_t bins{0};  // merged (f, g) bins holding >= 2 same-branch members
    double max_spread{0.0};
    double bin_tolerance{0.0};
};

/// Draw n arcs on the unit-radius energy level: e uniform in [0, 0.95] (or
/// forced_e), a the family member for that eccentricity, u1, u2 uniform in
/// [0, 2 pi). Identical (seed, parameters) reproduce identical records.
/// @throws UnsupportedRadius unless energy.radius() == 1 within 1e-12.
[[nodiscard]] std::vector<ArcRecord> sample_arcs_at_energy(const SphericalEnergy& energy,
                                                           std::size_t n, std::uint64_t seed,
                                                           std::optional<double> forced_e = {});

/**
 * @brief Bin records by (f, g) and measure within-bin transit spread.
 *
 * Values are binned on a grid of pitch bin_tolerance and adjacent occupied
 * cells are merged, so pairs straddling a cell boundary still share a bin.
 * Within a bin, spreads are taken only among records on the same branch
 * (equal orientation and revolution count); mixing branches would report
 * the multivaluedness of the transit time instead of testing the candidate.
 *
 * @throws EmptyBins if no bin ends up with two same-branch members
 *         (the scan is inconclusive).
 * @throws InvalidArgument on empty input, nonpositive tolerance, or a
 *         candidate producing non-finite values.
 */
[[nodiscard]] ScanReport scan_level_sets(const std::vector<ArcRecord>& records,
                                         const InvariantCandidate& candidate,
                                         double bin_tolerance);

/// Flat validation data: groups of arcs with identical (r1 + r2, chord, a) by
/// construction (same Lagrange angles, different eccentricities). Lambert's
/// theorem makes their transit times equal, so a correct scanner must see
/// spread at the rounding level under flat_sum_chord_candidate().
[[nodiscard]] std::vector<ArcRecord> flat_matched_samples(double a, std::size_t groups,
                                                          std::uint64_t seed);

/// Flat counterexample data: groups of arcs sharing (r1, chord, a) but not
/// r2, found by direct search. Their transit times genuinely differ, so the
/// scanner must report order-one spread under flat_first_radius_candidate().
/// Only groups whose transit spread exceeds min_spread are returned.
[[nodiscard]] std::vector<ArcRecord> flat_bad_candidate_witnesses(double a,
                                                                  double min_spread = 1e-3);

/**
 * @brief Construct an arc at eccentricity partner_e on the same energy level
 *        whose (f, g) match the base record's to ~1e-12.
 *
 * Damped 2x2 Newton in (u1, u2), seeded at the base arc. Returns nullopt if
 * the iteration fails, wanders to another branch (different orientation or
 * revolution count), or the final match degrades. This is how the explorer
 * populates level sets: random sampling alone essentially never produces two
 * arcs with equal (f, g) at tight tolerances.
 */
[[nodiscard]] std::optional<ArcRecord> matched_partner(const SphericalEnergy& energy,
                                                       const ArcRecord& base,
                                                       const InvariantCandidate& candidate,
                                                       double partner_e);

/// Base samples plus one matched partner per base (where the Newton solve
/// succeeds), ready for scan_level_sets. Partner eccentricities are drawn at
/// least 0.05 away from the base's. Deterministic in (seed, parameters).
[[nodiscard]] std::vector<ArcRecord> planted_scan_records(const SphericalEnergy& energy,
                                                          const InvariantCandidate& candidate,
                                                          std::size_t n_bases,
                                                          std::uint64_t seed);

/// Heuristic label for a measured spread against the bin tolerance:
/// "spread-at-noise-level" (< 10x), "spread-above-noise" (> 1000x), else
/// "inconclusive". Evidence only; never a proof either way.
[[nodiscard]] std::string classify_spread(double max_spread, double bin_tolerance);

/// CSV dump with the fixed column set
/// a,e,u1,u2,theta1,theta2,theta12,transit,f,g (17 significant digits).
void write_records_csv(std::ostream& os, const std::vector<ArcRecord>& records,
                       const InvariantCandidate& candidate);

} // namespace sphkep
