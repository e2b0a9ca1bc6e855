#include "sphkep/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string_view>
#include <utility>

#include "sphkep/format.hpp"
#include "sphkep/sampling.hpp"

namespace sphkep {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kTransitQuadTol = 1e-12;

void require_unit_radius(const SphericalEnergy& energy, const char* who)
{
    if (std::abs(energy.radius() - 1.0) > 1e-12) {
        throw UnsupportedRadius(std::string(who) + ": defined for unit sphere radius only");
    }
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

int orientation_of(double u1, double u2)
{
    return (u2 >= u1) ? 1 : -1;
}

long revolutions_of(double u1, double u2)
{
    return static_cast<long>(std::floor(std::abs(u2 - u1) / kTwoPi));
}

ArcRecord make_spherical_record(const SphericalEnergy& energy, double e, double u1, double u2)
{
    const EllipticElements el = elements_family_from_energy(energy, e);
    const AnomalyArc arc{u1, u2};
    const GeodesicTriangle tri = geodesic_triangle_from_arc(el, arc, 1.0);
    ArcRecord rec;
    rec.a = el.a();
    rec.e = e;
    rec.u1 = u1;
    rec.u2 = u2;
    rec.d1 = tri.theta1;
    rec.d2 = tri.theta2;
    rec.d12 = tri.theta12;
    rec.transit = passing_time_spherical(el, arc, 1.0, kTransitQuadTol);
    rec.energy = energy.value();
    rec.orientation = orientation_of(u1, u2);
    rec.revolutions = revolutions_of(u1, u2);
    return rec;
}

ArcRecord make_flat_record(const EllipticElements& el, double u1, double u2)
{
    const PlanePoint p1 = position_from_anomaly(el, u1);
    const PlanePoint p2 = position_from_anomaly(el, u2);
    ArcRecord rec;
    rec.a = el.a();
    rec.e = el.e();
    rec.u1 = u1;
    rec.u2 = u2;
    rec.d1 = norm(p1.q);
    rec.d2 = norm(p2.q);
    rec.d12 = norm(p2.q - p1.q);
    rec.transit = passing_time_flat(el, {u1, u2});
    rec.energy = flat_energy(el);
    rec.orientation = orientation_of(u1, u2);
    rec.revolutions = revolutions_of(u1, u2);
    return rec;
}

// Disjoint-set over bin cells.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n)
    {
        for (std::size_t i = 0; i < n; ++i) {
            parent_[i] = i;
        }
    }

    std::size_t find(std::size_t i)
    {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

InvariantCandidate InvariantCandidate::make(std::string name,
                                            std::function<double(double, double, double)> f,
                                            std::function<double(double, double, double)> g,
                                            bool allow_asymmetric)
{
    if (name.empty() || !f || !g) {
        throw InvalidArgument("InvariantCandidate: name and both functions are required");
    }
    if (!allow_asymmetric) {
        UniformSampler sampler(0x73796d6d65747279ULL); // fixed probe sample
        for (int i = 0; i < 64; ++i) {
            const double t1 = sampler.uniform(1e-3, 0.5 * kPi - 1e-3);
            const double t2 = sampler.uniform(1e-3, 0.5 * kPi - 1e-3);
            const double t12 = sampler.uniform(1e-3, kPi - 1e-3);
            for (const auto* fn : {&f, &g}) {
                const double ab = (*fn)(t1, t2, t12);
                const double ba = (*fn)(t2, t1, t12);
                if (!std::isfinite(ab) || !std::isfinite(ba)
                    || std::abs(ab - ba) > 1e-12 * std::max(1.0, std::abs(ab))) {
                    throw InvalidArgument(
                        "InvariantCandidate \"" + name
                        + "\": not symmetric under endpoint swap; pass allow_asymmetric "
                          "to register a deliberate control candidate");
                }
            }
        }
    }
    InvariantCandidate out;
    out.name = std::move(name);
    out.f = std::move(f);
    out.g = std::move(g);
    return out;
}

InvariantCandidate InvariantCandidate::from_expressions(std::string name, std::string_view f_src,
                                                        std::string_view g_src,
                                                        bool allow_asymmetric)
{
    // Expressions are immutable once parsed; copies of the shared program are
    // cheap and thread-safe to evaluate.
    const Expression fe = Expression::parse(f_src);
    const Expression ge = Expression::parse(g_src);
    return make(
        std::move(name),
        [fe](double t1, double t2, double t12) { return fe.eval(t1, t2, t12); },
        [ge](double t1, double t2, double t12) { return ge.eval(t1, t2, t12); },
        allow_asymmetric);
}

std::vector<InvariantCandidate> builtin_candidates()
{
    std::vector<InvariantCandidate> out;
    out.push_back(InvariantCandidate::make(
        "theta-sum", [](double t1, double t2, double) { return t1 + t2; },
        [](double, double, double t12) { return t12; }));
    out.push_back(InvariantCandidate::make(
        "half-tangent-sum",
        [](double t1, double t2, double) { return std::tan(0.5 * t1) + std::tan(0.5 * t2); },
        [](double, double, double t12) { return t12; }));
    out.push_back(InvariantCandidate::make(
        "tangent-sum",
        [](double t1, double t2, double) { return std::tan(t1) + std::tan(t2); },
        [](double, double, double t12) { return std::tan(t12); }));
    out.push_back(InvariantCandidate::make(
        "cosine-sum",
        [](double t1, double t2, double) { return std::cos(t1) + std::cos(t2); },
        [](double, double, double t12) { return std::cos(t12); }));
    return out;
}

InvariantCandidate flat_sum_chord_candidate()
{
    return InvariantCandidate::make(
        "flat-sum-chord", [](double d1, double d2, double) { return d1 + d2; },
        [](double, double, double d12) { return d12; });
}

InvariantCandidate flat_first_radius_candidate()
{
    return InvariantCandidate::make(
        "flat-first-radius", [](double d1, double, double) { return d1; },
        [](double, double, double d12) { return d12; },
        /*allow_asymmetric=*/true);
}

std::vector<ArcRecord> sample_arcs_at_energy(const SphericalEnergy& energy, std::size_t n,
                                             std::uint64_t seed, std::optional<double> forced_e)
{
    require_unit_radius(energy, "sample_arcs_at_energy");
    if (forced_e && (!(*forced_e >= 0.0) || !(*forced_e < 1.0))) {
        throw InvalidArgument("sample_arcs_at_energy: forced_e must lie in [0, 1)");
    }
    UniformSampler sampler(seed);
    std::vector<ArcRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = forced_e ? *forced_e : sampler.uniform(0.0, 0.95);
        const double u1 = sampler.uniform(0.0, kTwoPi);
        const double u2 = sampler.uniform(0.0, kTwoPi);
        out.push_back(make_spherical_record(energy, e, u1, u2));
    }
    return out;
}

ScanReport scan_level_sets(const std::vector<ArcRecord>& records,
                           const InvariantCandidate& candidate, double bin_tolerance)
{
    if (records.empty()) {
        throw InvalidArgument("scan_level_sets: no records");
    }
    if (!(bin_tolerance > 0.0) || !std::isfinite(bin_tolerance)) {
        throw InvalidArgument("scan_level_sets: bin_tolerance must be positive");
    }

    struct Cell {
        long long fi;
        long long gi;
        bool operator<(const Cell& o) const
        {
            return fi != o.fi ? fi < o.fi : gi < o.gi;
        }
    };

    std::vector<Cell> cells(records.size());
    std::map<Cell, std::size_t> first_in_cell;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ArcRecord& r = records[i];
        const double fv = candidate.f(r.d1, r.d2, r.d12);
        const double gv = candidate.g(r.d1, r.d2, r.d12);
        if (!std::isfinite(fv) || !std::isfinite(gv)) {
            throw InvalidArgument("scan_level_sets: candidate \"" + candidate.name
                                  + "\" produced a non-finite value");
        }
        cells[i] = {static_cast<long long>(std::floor(fv / bin_tolerance)),
                    static_cast<long long>(std::floor(gv / bin_tolerance))};
        first_in_cell.emplace(cells[i], i);
    }

    // Merge records in the same or adjacent cells so a pair separated only by
    // a grid line still lands in one bin.
    UnionFind uf(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (long long df = -1; df <= 1; ++df) {
            for (long long dg = -1; dg <= 1; ++dg) {
                const auto it = first_in_cell.find({cells[i].fi + df, cells[i].gi + dg});
                if (it != first_in_cell.end()) {
                    uf.unite(i, it->second);
                }
            }
        }
    }

    struct BranchKey {
        std::size_t root;
        int orientation;
        long revolutions;
        bool operator<(const BranchKey& o) const
        {
            if (root != o.root) return root < o.root;
            if (orientation != o.orientation) return orientation < o.orientation;
            return revolutions < o.revolutions;
        }
    };

    std::map<BranchKey, std::pair<double, double>> groups; // min, max transit
    std::map<BranchKey, std::size_t> counts;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const BranchKey key{uf.find(i), records[i].orientation, records[i].revolutions};
        const double t = records[i].transit;
        auto [it, inserted] = groups.emplace(key, std::make_pair(t, t));
        if (!inserted) {
            it->second.first = std::min(it->second.first, t);
            it->second.second = std::max(it->second.second, t);
        }
        ++counts[key];
    }

    ScanReport report;
    report.energy = records.front().energy;
    report.candidate = candidate.name;
    report.samples = records.size();
    report.bin_tolerance = bin_tolerance;
    for (const auto& [key, minmax] : groups) {
        if (counts[key] >= 2) {
            ++report.bins;
            report.max_spread = std::max(report.max_spread, minmax.second - minmax.first);
        }
    }
    if (report.bins == 0) {
        throw EmptyBins("scan_level_sets: no bin has two same-branch members; "
                        "the scan is inconclusive at this tolerance");
    }
    return report;
}

std::vector<ArcRecord> flat_matched_samples(double a, std::size_t groups, std::uint64_t seed)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidArgument("flat_matched_samples: semi-major axis must be positive");
    }
    UniformSampler sampler(seed);
    std::vector<ArcRecord> out;
    out.reserve(groups * 3);
    for (std::size_t gi = 0; gi < groups; ++gi) {
        const double e = sampler.uniform(0.0, 0.95);
        const double m = sampler.uniform(0.0, kTwoPi);
        double psi = 0.0;
        for (int tries = 0; tries < 32; ++tries) {
            psi = sampler.uniform(-kPi, kPi);
            if (std::abs(psi) >= 1e-3) {
                break;
            }
        }
        const double cos_phi = e * std::cos(m);
        out.push_back(make_flat_record(EllipticElements(a, e), m + psi, m - psi));

        for (int partner = 0; partner < 2; ++partner) {
            // Any eccentricity >= |cos phi| admits a preimage with the same
            // Lagrange angles; keep a small margin above the lower bound.
            const double lo = std::abs(cos_phi);
            const double ep = lo + (0.99 - lo) * std::max(sampler.uniform(0.0, 1.0), 1e-3);
            const double sign = (sampler.uniform(0.0, 1.0) < 0.5) ? 1.0 : -1.0;
            const double mp = sign * std::acos(std::min(1.0, lo < 1e-300 ? 0.0 : cos_phi / ep));
            out.push_back(make_flat_record(EllipticElements(a, ep), mp + psi, mp - psi));
        }
    }
    return out;
}

std::vector<ArcRecord> flat_bad_candidate_witnesses(double a, double min_spread)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidArgument("flat_bad_candidate_witnesses: semi-major axis must be positive");
    }
    const double r1_grid[] = {0.7 * a, 0.9 * a, 1.1 * a, 1.3 * a};
    const double c_grid[] = {0.3 * a, 0.5 * a, 0.8 * a};
    const double e_pair[] = {0.35, 0.65};

    std::vector<ArcRecord> out;
    for (const double r1 : r1_grid) {
        for (const double c : c_grid) {
            std::vector<ArcRecord> group;
            for (const double e : e_pair) {
                const double cos_u1 = (1.0 - r1 / a) / e;
                if (std::abs(cos_u1) > 1.0 - 1e-9) {
                    continue;
                }
                const double u1 = std::acos(cos_u1);
                const EllipticElements el(a, e);
                const PlanePoint p1 = position_from_anomaly(el, u1);

                // First u2 > u1 with chord == c, by grid walk plus bisection.
                auto chord_gap = [&](double u2) {
                    return norm(position_from_anomaly(el, u2).q - p1.q) - c;
                };
                const int steps = 1440;
                double lo = u1, hi = u1;
                bool bracketed = false;
                double prev = chord_gap(u1);
                for (int s = 1; s <= steps; ++s) {
                    const double u = u1 + kTwoPi * s / steps;
                    const double cur = chord_gap(u);
                    if (prev < 0.0 && cur >= 0.0) {
                        lo = u1 + kTwoPi * (s - 1) / steps;
                        hi = u;
                        bracketed = true;
                        break;
                    }
                    prev = cur;
                }
                if (!bracketed) {
                    continue;
                }
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (chord_gap(mid) < 0.0 ? lo : hi) = mid;
                }
                group.push_back(make_flat_record(el, u1, 0.5 * (lo + hi)));
            }
            if (group.size() == 2
                && std::abs(group[0].transit - group[1].transit) > min_spread) {
                out.insert(out.end(), group.begin(), group.end());
            }
        }
    }
    return out;
}

std::optional<ArcRecord> matched_partner(const SphericalEnergy& energy, const ArcRecord& base,
                                         const InvariantCandidate& candidate, double partner_e)
{
    require_unit_radius(energy, "matched_partner");
    if (!(partner_e >= 0.0) || !(partner_e < 1.0)) {
        return std::nullopt;
    }
    const EllipticElements el = elements_family_from_energy(energy, partner_e);
    const double f_target = candidate.f(base.d1, base.d2, base.d12);
    const double g_target = candidate.g(base.d1, base.d2, base.d12);
    const double scale = std::max({1.0, std::abs(f_target), std::abs(g_target)});

    auto residual = [&](double u1, double u2, double& rf, double& rg) {
        const GeodesicTriangle tri = geodesic_triangle_from_arc(el, {u1, u2}, 1.0);
        rf = candidate.f(tri.theta1, tri.theta2, tri.theta12) - f_target;
        rg = candidate.g(tri.theta1, tri.theta2, tri.theta12) - g_target;
        return std::isfinite(rf) && std::isfinite(rg);
    };

    double u1 = base.u1, u2 = base.u2;
    double rf = 0.0, rg = 0.0;
    if (!residual(u1, u2, rf, rg)) {
        return std::nullopt;
    }
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        if (std::max(std::abs(rf), std::abs(rg)) <= 1e-12 * scale) {
            converged = true;
            break;
        }
        // Central-difference Jacobian; accuracy only steers the step, the
        // residual itself decides convergence.
        const double hstep = 1e-6;
        double fp, gp, fm, gm;
        if (!residual(u1 + hstep, u2, fp, gp) || !residual(u1 - hstep, u2, fm, gm)) {
            return std::nullopt;
        }
        const double j11 = (fp - fm) / (2.0 * hstep), j21 = (gp - gm) / (2.0 * hstep);
        if (!residual(u1, u2 + hstep, fp, gp) || !residual(u1, u2 - hstep, fm, gm)) {
            return std::nullopt;
        }
        const double j12 = (fp - fm) / (2.0 * hstep), j22 = (gp - gm) / (2.0 * hstep);
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14) {
            return std::nullopt;
        }
        const double du1 = (-rf * j22 + rg * j12) / det;
        const double du2 = (-rg * j11 + rf * j21) / det;

        const double before = std::max(std::abs(rf), std::abs(rg));
        double damp = 1.0;
        bool improved = false;
        for (int half = 0; half < 8; ++half) {
            double nf, ng;
            if (residual(u1 + damp * du1, u2 + damp * du2, nf, ng)
                && std::max(std::abs(nf), std::abs(ng)) < before) {
                u1 += damp * du1;
                u2 += damp * du2;
                rf = nf;
                rg = ng;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved) {
            return std::nullopt;
        }
    }
    if (!converged && std::max(std::abs(rf), std::abs(rg)) > 1e-12 * scale) {
        return std::nullopt;
    }

    // Normalize the common 2 pi shift, then insist the partner stayed on the
    // base arc's branch.
    const double shift = kTwoPi * std::floor(u1 / kTwoPi);
    u1 -= shift;
    u2 -= shift;
    if (orientation_of(u1, u2) != base.orientation
        || revolutions_of(u1, u2) != base.revolutions) {
        return std::nullopt;
    }

    ArcRecord rec = make_spherical_record(energy, partner_e, u1, u2);
    const double f_final = candidate.f(rec.d1, rec.d2, rec.d12);
    const double g_final = candidate.g(rec.d1, rec.d2, rec.d12);
    if (std::abs(f_final - f_target) > 1e-10 * scale
        || std::abs(g_final - g_target) > 1e-10 * scale) {
        return std::nullopt;
    }
    return rec;
}

std::vector<ArcRecord> planted_scan_records(const SphericalEnergy& energy,
                                            const InvariantCandidate& candidate,
                                            std::size_t n_bases, std::uint64_t seed)
{
    std::vector<ArcRecord> out = sample_arcs_at_energy(energy, n_bases, seed);
    const std::size_t base_count = out.size();
    UniformSampler sampler(seed ^ fnv1a(candidate.name) ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < base_count; ++i) {
        double partner_e = -1.0;
        for (int tries = 0; tries < 16; ++tries) {
            const double draw = sampler.uniform(0.0, 0.95);
            if (std::abs(draw - out[i].e) >= 0.05) {
                partner_e = draw;
                break;
            }
        }
        if (partner_e < 0.0) {
            continue;
        }
        if (std::optional<ArcRecord> partner = matched_partner(energy, out[i], candidate, partner_e)) {
            out.push_back(*partner);
        }
    }
    return out;
}

std::string classify_spread(double max_spread, double bin_tolerance)
{
    if (max_spread < 10.0 * bin_tolerance) {
        return "spread-at-noise-level";
    }
    if (max_spread > 1000.0 * bin_tolerance) {
        return "spread-above-noise";
    }
    return "inconclusive";
}

void write_records_csv(std::ostream& os, const std::vector<ArcRecord>& records,
                       const InvariantCandidate& candidate)
{
    os << "a,e,u1,u2,theta1,theta2,theta12,transit,f,g\n";
    for (const ArcRecord& r : records) {
        os << num17(r.a) << ',' << num17(r.e) << ',' << num17(r.u1) << ',' << num17(r.u2) << ','
           << num17(r.d1) << ',' << num17(r.d2) << ',' << num17(r.d12) << ','
           << num17(r.transit) << ',' << num17(candidate.f(r.d1, r.d2, r.d12)) << ','
           << num17(candidate.g(r.d1, r.d2, r.d12)) << '\n';
    }
}

} // namespace sphkep
