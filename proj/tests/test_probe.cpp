// Level-set probe: expression candidates, arc sampling, the bin scanner and
// its flat-data validation harness.
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "sphkep/probe.hpp"
#include "sphkep/kepler_flat.hpp"

using namespace sphkep;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Circular flat arc record (a = 1, e = 0): distances and transit have
// elementary closed forms, handy for hand-built scanner inputs.
ArcRecord circular_arc(double u1, double u2)
{
    ArcRecord rec;
    rec.a = 1.0;
    rec.e = 0.0;
    rec.u1 = u1;
    rec.u2 = u2;
    rec.d1 = 1.0;
    rec.d2 = 1.0;
    rec.d12 = 2.0 * std::abs(std::sin((u2 - u1) / 2.0));
    rec.transit = u2 - u1;
    rec.energy = -0.5;
    rec.orientation = u2 >= u1 ? 1 : -1;
    rec.revolutions = static_cast<long>(std::floor(std::abs(u2 - u1) / (2.0 * kPi)));
    return rec;
}

} // namespace

TEST_CASE("expression parser: arithmetic, precedence, functions")
{
    CHECK(Expression::parse("2+3*4").eval(0, 0, 0) == doctest::Approx(14.0));
    CHECK(Expression::parse("(2+3)*4").eval(0, 0, 0) == doctest::Approx(20.0));
    CHECK(Expression::parse("-3^2").eval(0, 0, 0) == doctest::Approx(-9.0));
    CHECK(Expression::parse("2^3^2").eval(0, 0, 0) == doctest::Approx(512.0));
    CHECK(Expression::parse("2^-2").eval(0, 0, 0) == doctest::Approx(0.25));
    CHECK(Expression::parse("7/2/2").eval(0, 0, 0) == doctest::Approx(1.75));
    CHECK(Expression::parse("1 - 2 - 3").eval(0, 0, 0) == doctest::Approx(-4.0));
    CHECK(Expression::parse("sqrt(abs(-16))").eval(0, 0, 0) == doctest::Approx(4.0));
    CHECK(Expression::parse("cos(pi)").eval(0, 0, 0) == doctest::Approx(-1.0));
    CHECK(Expression::parse("exp(log(5))").eval(0, 0, 0) == doctest::Approx(5.0));
    CHECK(Expression::parse("atan(tan(0.3))").eval(0, 0, 0) == doctest::Approx(0.3));

    // Variables by short and long name.
    CHECK(Expression::parse("t1 + 2*t2 - t12").eval(1.0, 2.0, 3.0) == doctest::Approx(2.0));
    CHECK(Expression::parse("theta1 + theta2 + theta12").eval(0.1, 0.2, 0.3)
          == doctest::Approx(0.6));
    CHECK(Expression::parse("tan(t1/2) + tan(t2/2)").eval(0.8, 0.6, 0.0)
          == doctest::Approx(std::tan(0.4) + std::tan(0.3)));
}

TEST_CASE("expression parser: rejection with position information")
{
    CHECK_THROWS_AS((void)Expression::parse("tan(t1"), InvalidArgument);
    CHECK_THROWS_AS((void)Expression::parse("2+"), InvalidArgument);
    CHECK_THROWS_AS((void)Expression::parse("foo(2)"), InvalidArgument);
    CHECK_THROWS_AS((void)Expression::parse("t3 + 1"), InvalidArgument);
    CHECK_THROWS_AS((void)Expression::parse("1 2"), InvalidArgument);
    CHECK_THROWS_AS((void)Expression::parse(""), InvalidArgument);
    CHECK_THROWS_AS((void)Expression::parse("1 @ 2"), InvalidArgument);
    try {
        (void)Expression::parse("t1 + bogus");
        FAIL("expected a parse failure");
    } catch (const InvalidArgument& err) {
        CHECK(std::string(err.what()).find("position") != std::string::npos);
        CHECK(std::string(err.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("candidate registration enforces endpoint symmetry")
{
    CHECK_NOTHROW((void)InvariantCandidate::make(
        "ok", [](double a, double b, double) { return a + b; },
        [](double, double, double c) { return c; }));
    CHECK_THROWS_AS((void)InvariantCandidate::make(
                        "lopsided", [](double a, double, double) { return a; },
                        [](double, double, double c) { return c; }),
                    InvalidArgument);
    CHECK_NOTHROW((void)InvariantCandidate::make(
        "lopsided-on-purpose", [](double a, double, double) { return a; },
        [](double, double, double c) { return c; }, true));

    const std::vector<InvariantCandidate> cats = builtin_candidates();
    REQUIRE(cats.size() == 4);
    CHECK(cats[0].name == "theta-sum");
}

TEST_CASE("expression candidates agree with the built-in catalog")
{
    const InvariantCandidate expr =
        InvariantCandidate::from_expressions("theta-sum", "t1 + t2", "t12");
    const InvariantCandidate builtin = builtin_candidates()[0];
    for (double t1 : {0.2, 0.9, 1.3}) {
        for (double t2 : {0.1, 0.7}) {
            CHECK(expr.f(t1, t2, t1 + t2) == doctest::Approx(builtin.f(t1, t2, t1 + t2)));
            CHECK(expr.g(t1, t2, t1 + t2) == doctest::Approx(builtin.g(t1, t2, t1 + t2)));
        }
    }
    CHECK_THROWS_AS((void)InvariantCandidate::from_expressions("bad", "t1", "t12"),
                    InvalidArgument);
}

TEST_CASE("arc sampling at fixed energy")
{
    const SphericalEnergy zero(0.0, 1.0);
    const std::vector<ArcRecord> recs = sample_arcs_at_energy(zero, 200, 7);
    REQUIRE(recs.size() == 200);
    for (const ArcRecord& r : recs) {
        CHECK(r.energy == 0.0);
        CHECK(r.e >= 0.0);
        CHECK(r.e <= 0.95);
        CHECK(r.u1 >= 0.0);
        CHECK(r.u1 < 2.0 * kPi);
        // Every record's elements really lie on the level set.
        CHECK(spherical_energy(EllipticElements(r.a, r.e), 1.0).value()
              == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
        // Triangle entries match the arc geometry.
        const GeodesicTriangle tri =
            geodesic_triangle_from_arc(EllipticElements(r.a, r.e), {r.u1, r.u2}, 1.0);
        CHECK(r.d1 == doctest::Approx(tri.theta1).epsilon(1e-14));
        CHECK(r.d12 == doctest::Approx(tri.theta12).epsilon(1e-13).scale(1.0));
    }

    // Same seed, same records; different seed, different records.
    const std::vector<ArcRecord> again = sample_arcs_at_energy(zero, 200, 7);
    CHECK(again[13].u2 == recs[13].u2);
    const std::vector<ArcRecord> other = sample_arcs_at_energy(zero, 200, 8);
    CHECK(other[13].u2 != recs[13].u2);

    // Forced eccentricity zero pins the circular member a = 1 at E = 0,
    // where the transit is exactly half the anomaly gap.
    const std::vector<ArcRecord> circ = sample_arcs_at_energy(zero, 50, 11, 0.0);
    for (const ArcRecord& r : circ) {
        CHECK(r.a == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.transit == doctest::Approx((r.u2 - r.u1) / 2.0).epsilon(1e-12).scale(1.0));
    }

    CHECK_THROWS_AS((void)sample_arcs_at_energy(SphericalEnergy(0.0, 2.0), 10, 1),
                    UnsupportedRadius);
    CHECK_THROWS_AS((void)sample_arcs_at_energy(zero, 10, 1, 1.5), InvalidArgument);
}

TEST_CASE("scanner separates branches and measures in-bin spread")
{
    // Four circular arcs with identical (f, g) under the radius-sum/chord
    // candidate: two run forward, two backward. The scanner must split them
    // by orientation into two bins and see zero spread in each.
    std::vector<ArcRecord> recs;
    recs.push_back(circular_arc(0.0, 1.0));
    recs.push_back(circular_arc(-0.3, 0.7));
    recs.push_back(circular_arc(1.0, 0.0));
    recs.push_back(circular_arc(0.7, -0.3));

    const ScanReport rep = scan_level_sets(recs, flat_sum_chord_candidate(), 1e-9);
    CHECK(rep.bins == 2);
    CHECK(rep.samples == 4);
    CHECK(rep.max_spread < 1e-15);

    // A multi-revolution copy of an arc must not share its branch either.
    recs.push_back(circular_arc(0.0, 1.0 + 2.0 * kPi));
    const ScanReport rep2 = scan_level_sets(recs, flat_sum_chord_candidate(), 1e-9);
    CHECK(rep2.bins == 2);
    CHECK(rep2.max_spread < 1e-15);
}

TEST_CASE("scanner failure modes")
{
    // Far-apart samples never share a bin: the scan is inconclusive.
    std::vector<ArcRecord> sparse;
    sparse.push_back(circular_arc(0.0, 0.5));
    sparse.push_back(circular_arc(0.0, 1.5));
    sparse.push_back(circular_arc(0.0, 2.5));
    CHECK_THROWS_AS((void)scan_level_sets(sparse, flat_sum_chord_candidate(), 1e-9), EmptyBins);

    CHECK_THROWS_AS((void)scan_level_sets({}, flat_sum_chord_candidate(), 1e-9),
                    InvalidArgument);
    CHECK_THROWS_AS((void)scan_level_sets(sparse, flat_sum_chord_candidate(), 0.0),
                    InvalidArgument);

    // Candidates must evaluate to finite values on the data.
    const InvariantCandidate nan_candidate = InvariantCandidate::make(
        "off-domain", [](double a, double, double) { return std::sqrt(a - 10.0); },
        [](double, double, double c) { return c; }, true);
    CHECK_THROWS_AS((void)scan_level_sets(sparse, nan_candidate, 1e-9), InvalidArgument);
}

TEST_CASE("cells straddling a bin boundary still merge")
{
    // Two identical-geometry arcs whose f values differ by a hair can land
    // in adjacent grid cells; neighbor merging must put them in one group.
    // f values 2.0 and 2.0 + 0.9e-9 sit in adjacent pitch-1e-9 cells.
    std::vector<ArcRecord> recs;
    recs.push_back(circular_arc(0.0, 1.0));
    recs.push_back(circular_arc(0.0, 1.0));
    recs[1].d1 += 0.9e-9;
    const ScanReport rep = scan_level_sets(recs, flat_sum_chord_candidate(), 1e-9);
    CHECK(rep.bins == 1);
    CHECK(rep.max_spread < 1e-15);
}

TEST_CASE("flat harness: matched arcs show no spread, bad candidate does")
{
    // Lambert pairs: same (r1 + r2, chord, a), different eccentricities.
    const std::vector<ArcRecord> good = flat_matched_samples(1.3, 60, 5);
    CHECK(good.size() > 120);
    const ScanReport rep = scan_level_sets(good, flat_sum_chord_candidate(), 1e-9);
    CHECK(rep.bins >= 60);
    CHECK(rep.max_spread < 1e-9);

    // Arcs sharing only (r1, chord, a) have genuinely different transits.
    const std::vector<ArcRecord> bad = flat_bad_candidate_witnesses(1.0);
    CHECK(bad.size() >= 4);
    const ScanReport worst = scan_level_sets(bad, flat_first_radius_candidate(), 1e-9);
    CHECK(worst.max_spread > 1e-3);
}

TEST_CASE("matched partners preserve the candidate values and the branch")
{
    const SphericalEnergy zero(0.0, 1.0);
    const InvariantCandidate cand = builtin_candidates()[0];
    const std::vector<ArcRecord> bases = sample_arcs_at_energy(zero, 10, 123, 0.3);
    int found = 0;
    for (const ArcRecord& base : bases) {
        const auto partner = matched_partner(zero, base, cand, 0.55);
        if (!partner) {
            continue;
        }
        ++found;
        CHECK(partner->e == 0.55);
        CHECK(partner->orientation == base.orientation);
        CHECK(partner->revolutions == base.revolutions);
        const double f0 = cand.f(base.d1, base.d2, base.d12);
        const double g0 = cand.g(base.d1, base.d2, base.d12);
        const double f1 = cand.f(partner->d1, partner->d2, partner->d12);
        const double g1 = cand.g(partner->d1, partner->d2, partner->d12);
        const double scale = std::max({1.0, std::abs(f0), std::abs(g0)});
        CHECK(std::abs(f1 - f0) < 1e-10 * scale);
        CHECK(std::abs(g1 - g0) < 1e-10 * scale);
        CHECK(std::isfinite(partner->transit));
    }
    CHECK(found >= 5);
}

TEST_CASE("planted scans are deterministic")
{
    const SphericalEnergy zero(0.0, 1.0);
    const InvariantCandidate cand = builtin_candidates()[0];
    const std::vector<ArcRecord> one = planted_scan_records(zero, cand, 30, 99);
    const std::vector<ArcRecord> two = planted_scan_records(zero, cand, 30, 99);
    REQUIRE(one.size() == two.size());
    CHECK(one.size() > 30);  // bases plus at least some partners

    std::ostringstream csv_one, csv_two;
    write_records_csv(csv_one, one, cand);
    write_records_csv(csv_two, two, cand);
    CHECK(csv_one.str() == csv_two.str());

    // Header line is part of the contract (consumed by plotting scripts).
    const std::string header = csv_one.str().substr(0, csv_one.str().find('\n'));
    CHECK(header == "a,e,u1,u2,theta1,theta2,theta12,transit,f,g");
}

TEST_CASE("spread classification thresholds")
{
    CHECK(classify_spread(5e-9, 1e-9) == "spread-at-noise-level");
    CHECK(classify_spread(0.0, 1e-9) == "spread-at-noise-level");
    CHECK(classify_spread(5e-7, 1e-9) == "inconclusive");
    CHECK(classify_spread(1e-5, 1e-9) == "spread-above-noise");
}
