// Acceptance harness: one named criterion per line, PASS/FAIL with the
// measured quantity and its bound. Exit code is the number of failures.
//
// Every tolerance is pinned here, next to the criterion it belongs to.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphkep/cli.hpp"
#include "sphkep/dynamics.hpp"
#include "sphkep/kepler_flat.hpp"
#include "sphkep/kepler_sphere.hpp"
#include "sphkep/probe.hpp"
#include "sphkep/projection.hpp"
#include "sphkep/sampling.hpp"

using namespace sphkep;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Outcome {
    bool pass{false};
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

// 1. Closed-form period equals the quadrature period across the element
//    grid a in {0.1..5.0 step 0.1} x e in {0..0.9 step 0.1, 0.95} on the
//    unit sphere, to 1e-10, in under 5 seconds.
Outcome criterion_period_grid()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::vector<double> eccs;
    for (int j = 0; j <= 9; ++j) {
        eccs.push_back(0.1 * j);
    }
    eccs.push_back(0.95);
    for (int i = 1; i <= 50; ++i) {
        const double a = 0.1 * i;
        for (const double e : eccs) {
            const EllipticElements el(a, e);
            const double closed = spherical_period_closed(spherical_energy(el, 1.0));
            worst = std::max(worst, std::abs(spherical_period_quadrature(el) - closed));
        }
    }
    const double dt = seconds_since(t0);
    return {worst < 1e-10 && dt < 5.0,
            fmt("550 elements, max |quad - closed| = %.3e (bound 1e-10), %.2f s (limit 5 s)",
                worst, dt)};
}

// 2. All members of an iso-energy family share one period: for energies
//    {-2, -0.5, 0, 0.5, 2} and 8 eccentricities each, the quadrature
//    periods agree pairwise to 1e-10, in under 2 seconds.
Outcome criterion_family_periods()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const double energy : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
        const SphericalEnergy en(energy, 1.0);
        double lo = 1e300, hi = -1e300;
        for (int j = 0; j < 8; ++j) {
            const double e = 0.12 * j;
            const double period =
                spherical_period_quadrature(elements_family_from_energy(en, e));
            lo = std::min(lo, period);
            hi = std::max(hi, period);
        }
        worst = std::max(worst, hi - lo);
    }
    const double dt = seconds_since(t0);
    return {worst < 1e-10 && dt < 2.0,
            fmt("5 energies x 8 members, max period spread = %.3e (bound 1e-10), %.2f s "
                "(limit 2 s)",
                worst, dt)};
}

// 3. The zero-energy period is pi: closed form, complex-valued form, and
//    the quadrature on the circular member, all within 1e-12.
Outcome criterion_zero_energy_period()
{
    const SphericalEnergy zero(0.0, 1.0);
    const double d1 = std::abs(spherical_period_closed(zero) - kPi);
    const double d2 = std::abs(spherical_period_closed_complex(zero) - kPi);
    const double d3 = std::abs(spherical_period_quadrature(EllipticElements(1.0, 0.0)) - kPi);
    const double worst = std::max({d1, d2, d3});
    return {worst < 1e-12, fmt("max |T(0) - pi| = %.3e over three evaluations (bound 1e-12)",
                               worst)};
}

// 4. Lambert invariance of the flat passing time: 10^4 pairs of arcs with
//    equal (r1 + r2, chord, a) but different eccentricities, transit times
//    equal to 1e-11 relative (floor 1), in under 10 seconds.
Outcome criterion_lambert_pairs()
{
    const auto t0 = std::chrono::steady_clock::now();
    UniformSampler rng(40404);
    double worst = 0.0;
    int made = 0;
    while (made < 10000) {
        const double a = rng.uniform(0.2, 4.0);
        const double e = rng.uniform(0.05, 0.9);
        const double m = rng.uniform(0.0, 2.0 * kPi);
        const double psi = -rng.uniform(1e-3, kPi);  // forward arcs
        const AnomalyArc base{m + psi, m - psi};

        // Partner eccentricity keeping |cos(phi)| = |e' cos m'| feasible.
        const double lo = std::abs(e * std::cos(m));
        const double ep = lo + (0.99 - lo) * std::max(rng.uniform(0.0, 1.0), 1e-3);
        if (std::abs(ep - e) < 1e-3) {
            continue;
        }
        const double mp = std::copysign(
            std::acos(std::clamp(e * std::cos(m) / ep, -1.0, 1.0)), rng.uniform(-1.0, 1.0));
        const AnomalyArc partner{mp + psi, mp - psi};

        const EllipticElements el1(a, e), el2(a, ep);
        const ChordSum g1 = chord_and_sum(a, lagrange_angles(base, e));
        const ChordSum g2 = chord_and_sum(a, lagrange_angles(partner, ep));
        if (std::abs(g1.sum - g2.sum) > 1e-10 * a || std::abs(g1.chord - g2.chord) > 1e-10 * a) {
            continue;  // construction failed; must not happen
        }
        const double dt1 = passing_time_flat(el1, base);
        const double dt2 = passing_time_flat(el2, partner);
        worst = std::max(worst, std::abs(dt1 - dt2) / std::max(1.0, std::abs(dt1)));
        ++made;
    }
    const double dt = seconds_since(t0);
    return {worst < 1e-11 && dt < 10.0,
            fmt("10000 matched pairs, max relative |dT - dT'| = %.3e (bound 1e-11), %.2f s "
                "(limit 10 s)",
                worst, dt)};
}

// 5. The Lagrange-angle form of the passing time equals the anomaly form on
//    10^4 random arcs to 1e-12 relative (floor 1).
Outcome criterion_lagrange_identity()
{
    UniformSampler rng(50505);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const EllipticElements el(rng.uniform(0.1, 5.0), rng.uniform(0.0, 0.95));
        const AnomalyArc arc{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        const double direct = passing_time_flat(el, arc);
        const double lagrange = passing_time_lagrange(el.a(), lagrange_angles(arc, el.e()));
        worst = std::max(worst,
                         std::abs(direct - lagrange) / std::max(1.0, std::abs(direct)));
    }
    return {worst < 1e-12,
            fmt("10000 arcs, max relative |direct - lagrange| = %.3e (bound 1e-12)", worst)};
}

// 6. chord_and_sum reproduces the Euclidean endpoint geometry on 10^4
//    samples to 1e-10 relative (floor a).
Outcome criterion_chord_geometry()
{
    UniformSampler rng(60606);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const EllipticElements el(rng.uniform(0.2, 4.0), rng.uniform(0.0, 0.95));
        const AnomalyArc arc{rng.uniform(0.0, 2.0 * kPi), rng.uniform(0.0, 2.0 * kPi)};
        const Vec2 q1 = position_from_anomaly(el, arc.u1).q;
        const Vec2 q2 = position_from_anomaly(el, arc.u2).q;
        const ChordSum cs = chord_and_sum(el.a(), lagrange_angles(arc, el.e()));
        const double sum_ref = norm(q1) + norm(q2);
        const double chord_ref = norm(q2 - q1);
        worst = std::max(worst, std::abs(cs.sum - sum_ref) / std::max(el.a(), sum_ref));
        worst = std::max(worst, std::abs(cs.chord - chord_ref) / std::max(el.a(), chord_ref));
    }
    return {worst < 1e-10,
            fmt("10000 arcs, max relative geometry error = %.3e (bound 1e-10)", worst)};
}

struct OrbitRuns {
    double max_correspondence = 0.0;
    double max_residual = 0.0;
    double max_energy_drift = 0.0;
    double max_momentum_drift = 0.0;
    double elapsed = 0.0;
    bool done = false;
};

// Shared integrations for criteria 7 and 8: 50 random full revolutions.
const OrbitRuns& orbit_runs()
{
    static OrbitRuns runs;
    if (runs.done) {
        return runs;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const ProjectionContext ctx(1.0, {0.0, 0.0, 1.0});
    UniformSampler rng(70707);
    for (int i = 0; i < 50; ++i) {
        const EllipticElements el(rng.uniform(0.3, 3.0), rng.uniform(0.0, 0.8));
        const double u0 = rng.uniform(0.0, 2.0 * kPi);
        const AnomalyArc rev{u0, u0 + 2.0 * kPi};

        runs.max_correspondence =
            std::max(runs.max_correspondence, correspondence_residual(ctx, el, rev));

        // Step cap tied to the pericenter timescale keeps the downstream
        // finite differences in their fourth-order regime.
        const double period = passing_time_spherical(el, rev, 1.0);
        const double rp = el.a() * (1.0 - el.e());
        const double cap = std::min(period / 6000.0, std::pow(rp, 1.5) / 250.0);
        const SphereState start = lift_state(ctx, el, u0);
        const std::vector<SphereState> traj = integrate_orbit(ctx, start, period, cap);
        const std::vector<PlanarSample> planar = reparametrize_and_project(ctx, traj);
        runs.max_residual = std::max(runs.max_residual, max_kepler_residual(planar));

        const double e0 = total_energy(ctx, start);
        const double l0 = axial_momentum(ctx, start);
        for (std::size_t k = 0; k < traj.size(); k += 16) {
            runs.max_energy_drift =
                std::max(runs.max_energy_drift,
                         std::abs(total_energy(ctx, traj[k]) - e0) / std::max(1.0, std::abs(e0)));
            runs.max_momentum_drift =
                std::max(runs.max_momentum_drift, std::abs(axial_momentum(ctx, traj[k]) - l0)
                                                      / std::max(1.0, std::abs(l0)));
        }
    }
    runs.elapsed = seconds_since(t0);
    runs.done = true;
    return runs;
}

// 7. Dynamics oracle: on 50 random full revolutions (a in [0.3, 3],
//    e in [0, 0.8], R = 1) the integrated motion lands on the lifted
//    endpoint within 1e-6 and the projected trajectory satisfies the planar
//    Kepler equations of motion within 1e-6, in under 60 seconds.
Outcome criterion_dynamics_oracle()
{
    const OrbitRuns& runs = orbit_runs();
    const bool pass = runs.max_correspondence < 1e-6 && runs.max_residual < 1e-6
                      && runs.elapsed < 60.0;
    return {pass,
            fmt("50 revolutions, max correspondence = %.3e, max EOM residual = %.3e "
                "(bounds 1e-6), %.2f s (limit 60 s)",
                runs.max_correspondence, runs.max_residual, runs.elapsed)};
}

// 8. The same 50 integrations conserve the energy and the axial momentum to
//    relative drift below 1e-8 over the revolution.
Outcome criterion_conservation()
{
    const OrbitRuns& runs = orbit_runs();
    const bool pass = runs.max_energy_drift < 1e-8 && runs.max_momentum_drift < 1e-8;
    return {pass, fmt("max energy drift = %.3e, max momentum drift = %.3e (bounds 1e-8)",
                      runs.max_energy_drift, runs.max_momentum_drift)};
}

// 9. Flat limit: for a = 1, e = 0.5, arc (0.3, 1.2), the deviation of the
//    spherical passing time from the flat one decays as R^-2 (measured
//    order between R = 1e3 and R = 1e4 within [1.9, 2.1]).
Outcome criterion_flat_limit()
{
    const EllipticElements el(1.0, 0.5);
    const AnomalyArc arc{0.3, 1.2};
    const double flat = passing_time_flat(el, arc);
    const double d3 = std::abs(passing_time_spherical(el, arc, 1e3) - flat);
    const double d4 = std::abs(passing_time_spherical(el, arc, 1e4) - flat);
    const double order = std::log10(d3 / d4);
    return {order > 1.9 && order < 2.1,
            fmt("deviation order = %.3f (required within [1.9, 2.1])", order)};
}

// 10. Scanner validation on flat data, where the truth is known. Matched
//     samples (equal r1 + r2 and chord by construction, Lambert) must show
//     spread below 1e-9. The known-bad candidate keeps only (r1, chord);
//     its witnesses are found by brute force: for a grid of (r1, chord)
//     values and two fixed eccentricities, walk the orbit from the
//     anomaly with that pericenter-side radius until the chord condition
//     is bracketed, bisect to the crossing, and keep pairs whose transit
//     times differ by more than 1e-3. The scanner must report that spread.
Outcome criterion_flat_scanner()
{
    const std::vector<ArcRecord> good = flat_matched_samples(1.3, 2000, 2026);
    const ScanReport rep = scan_level_sets(good, flat_sum_chord_candidate(), 1e-9);

    const std::vector<ArcRecord> bad = flat_bad_candidate_witnesses(1.0);
    const ScanReport worst = scan_level_sets(bad, flat_first_radius_candidate(), 1e-9);

    const bool pass = rep.max_spread < 1e-9 && worst.max_spread > 1e-3 && bad.size() >= 4;
    return {pass,
            fmt("matched spread = %.3e (bound 1e-9) over %.0f bins; known-bad spread = %.3e "
                "(must exceed 1e-3)",
                rep.max_spread, static_cast<double>(rep.bins), worst.max_spread)};
}

// 11. The scan tool runs on energies {-1, 0, 1} with 10^4 samples per
//     energy for the full candidate catalog, deterministically (two runs
//     are byte-identical), and its JSON report validates: 12 reports, all
//     fields present, classifications from the fixed label set, and no
//     verdict of any kind about the candidates themselves.
Outcome criterion_scan_tool()
{
    const std::vector<const char*> argv{"sphkep",     "scan", "--energy=-1", "--energy",
                                        "1",          "--energy", "0",       "--samples",
                                        "10000",      "--format", "json"};
    auto run_once = [&](std::string& out) {
        std::ostringstream os, es;
        const int code = sphkep::cli::run(static_cast<int>(argv.size()), argv.data(), os, es);
        out = os.str();
        return code;
    };
    std::string first, second;
    if (run_once(first) != 0 || run_once(second) != 0) {
        return {false, "scan exited nonzero"};
    }
    if (first != second) {
        return {false, "two identical invocations differ"};
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(first);
    } catch (const std::exception& ex) {
        return {false, std::string("report is not valid JSON: ") + ex.what()};
    }
    if (doc.value("schema", "") != "v1" || doc.value("command", "") != "scan") {
        return {false, "schema/command fields wrong"};
    }
    if (!doc.contains("reports") || !doc["reports"].is_array()
        || doc["reports"].size() != 12) {
        return {false, "expected 12 reports (3 energies x 4 candidates)"};
    }
    int catalog_hits = 0;
    for (const auto& rep : doc["reports"]) {
        for (const char* key :
             {"energy", "candidate", "samples", "bins", "max_spread", "classification"}) {
            if (!rep.contains(key)) {
                return {false, std::string("report misses field ") + key};
            }
        }
        const std::string label = rep["classification"];
        if (label != "spread-at-noise-level" && label != "inconclusive"
            && label != "spread-above-noise") {
            return {false, "unknown classification label " + label};
        }
        if (rep["samples"].get<long long>() < 10000 || rep["bins"].get<long long>() == 0) {
            return {false, "report has too few samples or no populated bins"};
        }
        const std::string name = rep["candidate"];
        if (name == "theta-sum" || name == "half-tangent-sum" || name == "tangent-sum"
            || name == "cosine-sum") {
            ++catalog_hits;
        }
    }
    if (catalog_hits != 12) {
        return {false, "catalog candidates missing from the reports"};
    }
    // The tool reports evidence only; any verdict language would overstate
    // what a finite scan can establish.
    if (first.find("verdict") != std::string::npos
        || first.find("proof") != std::string::npos) {
        return {false, "report contains verdict language"};
    }
    return {true,
            fmt("12 deterministic reports, %.0f bytes, classifications within the label set",
                static_cast<double>(first.size()))};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"closed period matches quadrature on the element grid", criterion_period_grid},
        {"iso-energy families share their period", criterion_family_periods},
        {"zero-energy period is pi", criterion_zero_energy_period},
        {"flat transit is a Lambert invariant on matched pairs", criterion_lambert_pairs},
        {"lagrange form of the passing time", criterion_lagrange_identity},
        {"chord and radius sum match the endpoint geometry", criterion_chord_geometry},
        {"integrated motion reproduces the projected orbit", criterion_dynamics_oracle},
        {"energy and axial momentum are conserved", criterion_conservation},
        {"spherical passing time has a second-order flat limit", criterion_flat_limit},
        {"scanner validated on flat data", criterion_flat_scanner},
        {"scan tool is deterministic with a valid report format", criterion_scan_tool},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& ex) {
            outcome = {false, std::string("threw: ") + ex.what()};
        }
        if (!outcome.pass) {
            ++failures;
        }
        std::printf("%s criterion %zu: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name, outcome.detail.c_str());
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    } else {
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    }
    return failures;
}
