#include "sphkep/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphkep/dynamics.hpp"
#include "sphkep/errors.hpp"
#include "sphkep/format.hpp"
#include "sphkep/kepler_flat.hpp"
#include "sphkep/kepler_sphere.hpp"
#include "sphkep/probe.hpp"
#include "sphkep/projection.hpp"
#include "sphkep/verify.hpp"

namespace sphkep::cli {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;
constexpr int kVerification = 3;

std::string json_escape(std::string_view s)
{
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

// Flat JSON object builder; every document starts with "schema": "v1".
class Json {
public:
    explicit Json(const std::string& command)
    {
        body_ = "{\"schema\": \"v1\", \"command\": \"" + json_escape(command) + "\"";
    }

    Json& num(const std::string& key, double v)
    {
        return raw(key, num17(v));
    }

    Json& integer(const std::string& key, long long v)
    {
        return raw(key, std::to_string(v));
    }

    Json& boolean(const std::string& key, bool v)
    {
        return raw(key, v ? "true" : "false");
    }

    Json& str(const std::string& key, std::string_view v)
    {
        return raw(key, "\"" + json_escape(v) + "\"");
    }

    Json& raw(const std::string& key, std::string_view value)
    {
        body_ += ", \"" + json_escape(key) + "\": ";
        body_ += value;
        return *this;
    }

    [[nodiscard]] std::string finish() const { return body_ + "}\n"; }

private:
    std::string body_;
};

std::string csv_quote(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (const char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    out += '"';
    return out;
}

struct FormatChoice {
    std::string value = "plain";
    [[nodiscard]] bool json() const { return value == "json"; }
    [[nodiscard]] bool csv() const { return value == "csv"; }
};

void add_format_option(CLI::App* sub, FormatChoice& fmt)
{
    sub->add_option("--format", fmt.value, "Output format")
        ->transform(CLI::IsMember({"plain", "json", "csv"}))
        ->capture_default_str();
}

int require_no_csv(const FormatChoice& fmt, const std::string& cmd, std::ostream& err)
{
    if (fmt.csv()) {
        err << "error: --format csv is not available for " << cmd << '\n';
        return kUsage;
    }
    return kOk;
}

// ---- subcommand handlers ----

struct ScalarArgs {
    double a = 1.0;
    double e = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double radius = 1.0;
    double energy = 0.0;
    double tol = 1e-12;
};

int do_energy(const ScalarArgs& p, const FormatChoice& fmt, std::ostream& out, std::ostream& err)
{
    if (const int rc = require_no_csv(fmt, "energy", err)) {
        return rc;
    }
    const EllipticElements el(p.a, p.e);
    const double value = spherical_energy(el, p.radius).value();
    if (fmt.json()) {
        out << Json("energy")
                   .num("a", p.a)
                   .num("e", p.e)
                   .num("radius", p.radius)
                   .num("energy", value)
                   .finish();
    } else {
        out << num17(value) << '\n';
    }
    return kOk;
}

int do_theta_a(const ScalarArgs& p, const FormatChoice& fmt, std::ostream& out, std::ostream& err)
{
    if (const int rc = require_no_csv(fmt, "theta-a", err)) {
        return rc;
    }
    const double theta = geodesic_major_angle(SphericalEnergy(p.energy, p.radius));
    if (fmt.json()) {
        out << Json("theta-a")
                   .num("energy", p.energy)
                   .num("radius", p.radius)
                   .num("theta_a", theta)
                   .finish();
    } else {
        out << num17(theta) << '\n';
    }
    return kOk;
}

int do_tof_flat(const ScalarArgs& p, const FormatChoice& fmt, std::ostream& out, std::ostream& err)
{
    if (const int rc = require_no_csv(fmt, "tof-flat", err)) {
        return rc;
    }
    const EllipticElements el(p.a, p.e);
    const double transit = passing_time_flat(el, {p.u1, p.u2});
    if (fmt.json()) {
        out << Json("tof-flat")
                   .num("a", p.a)
                   .num("e", p.e)
                   .num("u1", p.u1)
                   .num("u2", p.u2)
                   .num("transit", transit)
                   .finish();
    } else {
        out << num17(transit) << '\n';
    }
    return kOk;
}

int do_tof_sphere(const ScalarArgs& p, const FormatChoice& fmt, std::ostream& out,
                  std::ostream& err)
{
    if (const int rc = require_no_csv(fmt, "tof-sphere", err)) {
        return rc;
    }
    const EllipticElements el(p.a, p.e);
    const AnomalyArc arc{p.u1, p.u2};
    const double transit = passing_time_spherical(el, arc, p.radius, p.tol);
    if (fmt.json()) {
        const GeodesicTriangle tri = geodesic_triangle_from_arc(el, arc, p.radius);
        out << Json("tof-sphere")
                   .num("a", p.a)
                   .num("e", p.e)
                   .num("u1", p.u1)
                   .num("u2", p.u2)
                   .num("radius", p.radius)
                   .num("tol", p.tol)
                   .num("transit", transit)
                   .num("theta1", tri.theta1)
                   .num("theta2", tri.theta2)
                   .num("theta12", tri.theta12)
                   .finish();
    } else {
        out << num17(transit) << '\n';
    }
    return kOk;
}

struct PeriodArgs {
    std::optional<double> energy;
    std::optional<double> a;
    double e = 0.0;
    double tol = 1e-10;
};

int do_period(const PeriodArgs& p, const FormatChoice& fmt, std::ostream& out, std::ostream& err)
{
    if (const int rc = require_no_csv(fmt, "period", err)) {
        return rc;
    }
    if (!p.energy && !p.a) {
        err << "error: period requires either --energy or --a\n";
        return kUsage;
    }
    EllipticElements el = p.energy ? elements_family_from_energy({*p.energy, 1.0}, p.e)
                                   : EllipticElements(*p.a, p.e);
    const SphericalEnergy en = spherical_energy(el, 1.0);
    const double closed = spherical_period_closed(en);
    const double quad = spherical_period_quadrature(el);
    const double diff = std::abs(closed - quad);
    if (diff > p.tol) {
        err << "error: closed form and quadrature disagree by " << num17(diff)
            << " (tolerance " << num17(p.tol) << ")\n";
        return kNumerical;
    }
    if (fmt.json()) {
        out << Json("period")
                   .num("energy", en.value())
                   .num("a", el.a())
                   .num("e", el.e())
                   .num("period", closed)
                   .num("period_quadrature", quad)
                   .num("difference", diff)
                   .num("tol", p.tol)
                   .finish();
    } else {
        out << num17(closed) << '\n';
    }
    return kOk;
}

struct LambertArgs {
    double sum = 0.0;
    double chord = 0.0;
    double a = 1.0;
};

int do_lambert(const LambertArgs& p, const FormatChoice& fmt, std::ostream& out, std::ostream&)
{
    const std::vector<LambertBranch> branches = lambert_branches(p.sum, p.chord, p.a);
    const double period = 2.0 * 3.141592653589793238462643383279502884 * std::pow(p.a, 1.5);
    if (fmt.json()) {
        std::string arr = "[";
        for (std::size_t i = 0; i < branches.size(); ++i) {
            const LambertBranch& b = branches[i];
            if (i) {
                arr += ", ";
            }
            arr += "{\"phi\": " + num17(b.angles.phi) + ", \"psi\": " + num17(b.angles.psi)
                   + ", \"transit\": " + num17(b.transit)
                   + ", \"chord_sign\": " + std::to_string(b.chord_sign)
                   + ", \"revolutions\": " + std::to_string(b.revolutions) + "}";
        }
        arr += "]";
        out << Json("lambert")
                   .num("sum", p.sum)
                   .num("chord", p.chord)
                   .num("a", p.a)
                   .num("period", period)
                   .integer("count", static_cast<long long>(branches.size()))
                   .raw("branches", arr)
                   .finish();
    } else if (fmt.csv()) {
        out << "phi,psi,transit,chord_sign,revolutions\n";
        for (const LambertBranch& b : branches) {
            out << num17(b.angles.phi) << ',' << num17(b.angles.psi) << ',' << num17(b.transit)
                << ',' << b.chord_sign << ',' << b.revolutions << '\n';
        }
    } else {
        for (const LambertBranch& b : branches) {
            out << "phi=" << num17(b.angles.phi) << " psi=" << num17(b.angles.psi)
                << " transit=" << num17(b.transit) << " chord_sign=" << b.chord_sign << '\n';
        }
    }
    return kOk;
}

struct VerifyArgs {
    bool thorough = false;
    std::uint64_t seed = 0;
};

int do_verify(const VerifyArgs& p, const FormatChoice& fmt, std::ostream& out, std::ostream&)
{
    const std::vector<CheckResult> results = run_verification(p.thorough, p.seed);
    std::size_t passed = 0;
    for (const CheckResult& r : results) {
        passed += r.pass ? 1 : 0;
    }
    const bool ok = passed == results.size();
    if (fmt.json()) {
        std::string arr = "[";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const CheckResult& r = results[i];
            if (i) {
                arr += ", ";
            }
            arr += "{\"suite\": \"" + json_escape(r.suite) + "\", \"name\": \""
                   + json_escape(r.name) + "\", \"pass\": " + (r.pass ? "true" : "false")
                   + ", \"detail\": \"" + json_escape(r.detail) + "\"}";
        }
        arr += "]";
        out << Json("verify")
                   .boolean("thorough", p.thorough)
                   .integer("seed", static_cast<long long>(p.seed))
                   .integer("passed", static_cast<long long>(passed))
                   .integer("total", static_cast<long long>(results.size()))
                   .boolean("all_passed", ok)
                   .raw("checks", arr)
                   .finish();
    } else if (fmt.csv()) {
        out << "suite,name,pass,detail\n";
        for (const CheckResult& r : results) {
            out << csv_quote(r.suite) << ',' << csv_quote(r.name) << ','
                << (r.pass ? "pass" : "FAIL") << ',' << csv_quote(r.detail) << '\n';
        }
    } else {
        for (const CheckResult& r : results) {
            out << (r.pass ? "PASS " : "FAIL ") << r.suite << '/' << r.name;
            if (!r.detail.empty()) {
                out << ": " << r.detail;
            }
            out << '\n';
        }
        out << "verification: " << passed << '/' << results.size() << " checks passed\n";
    }
    return ok ? kOk : kVerification;
}

struct OrbitArgs {
    double a = 1.0;
    double e = 0.0;
    double u0 = 0.0;
    double radius = 1.0;
    double revolutions = 1.0;
    std::optional<double> t_end;
    double dt_max = 0.0;
    double tol = 1e-12;
    std::string out_path;
};

void write_orbit_csv(std::ostream& os, const std::vector<SphereState>& traj,
                     const std::vector<PlanarSample>& planar)
{
    os << "t,tau,qx,qy,qz,Qx,Qy\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << num17(traj[i].t) << ',' << num17(planar[i].tau) << ',' << num17(traj[i].q.x) << ','
           << num17(traj[i].q.y) << ',' << num17(traj[i].q.z) << ',' << num17(planar[i].q.x)
           << ',' << num17(planar[i].q.y) << '\n';
    }
}

int do_orbit_sim(const OrbitArgs& p, const FormatChoice& fmt, std::ostream& out,
                 std::ostream& err)
{
    const EllipticElements el(p.a, p.e);
    const ProjectionContext ctx(p.radius, {0.0, 0.0, 1.0});
    const double span = p.t_end ? *p.t_end
                                : p.revolutions
                                      * passing_time_spherical(
                                          el, {p.u0, p.u0 + 2.0 * 3.141592653589793238462643383279502884},
                                          p.radius);
    const double dt_max = p.dt_max > 0.0 ? p.dt_max : std::abs(span) / 2000.0;
    const SphereState start = lift_state(ctx, el, p.u0);
    const std::vector<SphereState> traj = integrate_orbit(ctx, start, span, dt_max, p.tol);
    const std::vector<PlanarSample> planar = reparametrize_and_project(ctx, traj);

    const double e0 = total_energy(ctx, start);
    const double l0 = axial_momentum(ctx, start);
    double energy_drift = 0.0, momentum_drift = 0.0;
    for (const SphereState& st : traj) {
        energy_drift = std::max(energy_drift,
                                std::abs(total_energy(ctx, st) - e0) / std::max(1.0, std::abs(e0)));
        momentum_drift = std::max(momentum_drift, std::abs(axial_momentum(ctx, st) - l0)
                                                      / std::max(1.0, std::abs(l0)));
    }
    // The residual needs five samples for its stencils; very short runs
    // simply do not report one.
    const bool have_residual = planar.size() >= 5;
    const double residual = have_residual ? max_kepler_residual(planar) : 0.0;

    if (!p.out_path.empty()) {
        std::ofstream file(p.out_path);
        if (!file) {
            err << "error: cannot open " << p.out_path << " for writing\n";
            return kUsage;
        }
        write_orbit_csv(file, traj, planar);
    }

    if (fmt.json()) {
        Json doc("orbit-sim");
        doc.num("a", p.a)
            .num("e", p.e)
            .num("u0", p.u0)
            .num("radius", p.radius)
            .num("t_end", span)
            .num("dt_max", dt_max)
            .num("tol", p.tol)
            .integer("samples", static_cast<long long>(traj.size()))
            .num("energy", e0)
            .num("axial_momentum", l0)
            .num("energy_drift", energy_drift)
            .num("momentum_drift", momentum_drift);
        if (have_residual) {
            doc.num("kepler_residual", residual);
        } else {
            doc.raw("kepler_residual", "null");
        }
        if (!p.out_path.empty()) {
            doc.str("csv_path", p.out_path);
        }
        out << doc.finish();
    } else if (!p.out_path.empty()) {
        out << "samples=" << traj.size() << " t_end=" << num17(span)
            << " energy_drift=" << num17(energy_drift)
            << " momentum_drift=" << num17(momentum_drift)
            << " kepler_residual=" << (have_residual ? num17(residual) : std::string("n/a"))
            << '\n';
    } else {
        write_orbit_csv(out, traj, planar);
    }
    return kOk;
}

struct ScanArgs {
    std::vector<double> energies;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    double bin_tol = 1e-9;
    std::string candidate = "all";
    std::string f_expr;
    std::string g_expr;
    std::string custom_name = "custom";
    bool allow_asymmetric = false;
    bool raw = false;
    std::string csv_path;
};

int do_scan(const ScanArgs& p, const FormatChoice& fmt, std::ostream& out, std::ostream& err)
{
    std::vector<InvariantCandidate> candidates;
    if (!p.f_expr.empty() || !p.g_expr.empty()) {
        if (p.f_expr.empty() || p.g_expr.empty()) {
            err << "error: custom candidates need both --f and --g\n";
            return kUsage;
        }
        candidates.push_back(InvariantCandidate::from_expressions(
            p.custom_name, p.f_expr, p.g_expr, p.allow_asymmetric));
    } else if (p.candidate == "all") {
        candidates = builtin_candidates();
    } else {
        for (InvariantCandidate& c : builtin_candidates()) {
            if (c.name == p.candidate) {
                candidates.push_back(std::move(c));
            }
        }
        if (candidates.empty()) {
            err << "error: unknown candidate \"" << p.candidate
                << "\" (try theta-sum, half-tangent-sum, tangent-sum, cosine-sum or all)\n";
            return kUsage;
        }
    }
    if (!p.csv_path.empty() && (p.energies.size() != 1 || candidates.size() != 1)) {
        err << "error: --csv needs exactly one energy and one candidate\n";
        return kUsage;
    }

    struct Row {
        ScanReport report;
        std::string classification;
    };
    std::vector<Row> rows;
    for (const double energy : p.energies) {
        const SphericalEnergy en(energy, 1.0);
        for (const InvariantCandidate& cand : candidates) {
            const std::vector<ArcRecord> records =
                p.raw ? sample_arcs_at_energy(en, p.samples, p.seed)
                      : planted_scan_records(en, cand, p.samples, p.seed);
            if (!p.csv_path.empty()) {
                std::ofstream file(p.csv_path);
                if (!file) {
                    err << "error: cannot open " << p.csv_path << " for writing\n";
                    return kUsage;
                }
                write_records_csv(file, records, cand);
            }
            const ScanReport report = scan_level_sets(records, cand, p.bin_tol);
            rows.push_back({report, classify_spread(report.max_spread, report.bin_tolerance)});
        }
    }

    if (fmt.json()) {
        std::string arr = "[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            if (i) {
                arr += ", ";
            }
            arr += "{\"energy\": " + num17(r.report.energy) + ", \"candidate\": \""
                   + json_escape(r.report.candidate) + "\", \"samples\": "
                   + std::to_string(r.report.samples) + ", \"bins\": "
                   + std::to_string(r.report.bins) + ", \"max_spread\": "
                   + num17(r.report.max_spread) + ", \"bin_tolerance\": "
                   + num17(r.report.bin_tolerance) + ", \"classification\": \""
                   + json_escape(r.classification) + "\"}";
        }
        arr += "]";
        out << Json("scan")
                   .integer("samples_requested", static_cast<long long>(p.samples))
                   .integer("seed", static_cast<long long>(p.seed))
                   .boolean("planted_partners", !p.raw)
                   .raw("reports", arr)
                   .finish();
    } else if (fmt.csv()) {
        out << "energy,candidate,samples,bins,max_spread,classification\n";
        for (const Row& r : rows) {
            out << num17(r.report.energy) << ',' << csv_quote(r.report.candidate) << ','
                << r.report.samples << ',' << r.report.bins << ',' << num17(r.report.max_spread)
                << ',' << r.classification << '\n';
        }
    } else {
        for (const Row& r : rows) {
            out << "energy=" << num17(r.report.energy) << " candidate=" << r.report.candidate
                << " samples=" << r.report.samples << " bins=" << r.report.bins
                << " max_spread=" << num17(r.report.max_spread) << " " << r.classification
                << '\n';
        }
    }
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Kepler problem on the sphere with the cotangent potential: closed-form\n"
                 "periods, passing times, Lambert branches, a dynamics cross-check, and a\n"
                 "level-set scanner for candidate transit-time invariants. Angles are in\n"
                 "radians; output is deterministic for identical invocations.",
                 "sphkep"};
    app.require_subcommand(1);

    int rc = kOk;

    ScalarArgs sc;
    FormatChoice fmt_energy, fmt_theta, fmt_tflat, fmt_tsphere, fmt_period, fmt_lambert,
        fmt_verify, fmt_orbit, fmt_scan;

    auto* energy = app.add_subcommand("energy", "Energy of the lifted orbit (a, e) on radius R");
    energy->add_option("--a", sc.a, "Semi-major axis of the projected ellipse")->required();
    energy->add_option("--e", sc.e, "Eccentricity")->capture_default_str();
    energy->add_option("--radius", sc.radius, "Sphere radius")->capture_default_str();
    add_format_option(energy, fmt_energy);
    energy->callback([&] { rc = do_energy(sc, fmt_energy, out, err); });

    auto* theta = app.add_subcommand("theta-a", "Major-axis central angle for an energy level");
    theta->add_option("--energy", sc.energy, "Energy of the level")->required();
    theta->add_option("--radius", sc.radius, "Sphere radius")->capture_default_str();
    add_format_option(theta, fmt_theta);
    theta->callback([&] { rc = do_theta_a(sc, fmt_theta, out, err); });

    auto* tflat = app.add_subcommand("tof-flat", "Planar passing time between two anomalies");
    tflat->add_option("--a", sc.a, "Semi-major axis")->required();
    tflat->add_option("--e", sc.e, "Eccentricity")->capture_default_str();
    tflat->add_option("--u1", sc.u1, "Start eccentric anomaly (rad)")->required();
    tflat->add_option("--u2", sc.u2, "End eccentric anomaly (rad)")->required();
    add_format_option(tflat, fmt_tflat);
    tflat->callback([&] { rc = do_tof_flat(sc, fmt_tflat, out, err); });

    auto* tsphere =
        app.add_subcommand("tof-sphere", "Spherical passing time of the lifted arc");
    tsphere->add_option("--a", sc.a, "Semi-major axis of the projection")->required();
    tsphere->add_option("--e", sc.e, "Eccentricity")->capture_default_str();
    tsphere->add_option("--u1", sc.u1, "Start eccentric anomaly (rad)")->required();
    tsphere->add_option("--u2", sc.u2, "End eccentric anomaly (rad)")->required();
    tsphere->add_option("--radius", sc.radius, "Sphere radius")->capture_default_str();
    tsphere->add_option("--tol", sc.tol, "Quadrature absolute tolerance")->capture_default_str();
    add_format_option(tsphere, fmt_tsphere);
    tsphere->callback([&] { rc = do_tof_sphere(sc, fmt_tsphere, out, err); });

    PeriodArgs pa;
    auto* period = app.add_subcommand(
        "period", "Closed-form period on the unit sphere, cross-checked by quadrature");
    auto* opt_energy = period->add_option("--energy", pa.energy, "Energy of the level");
    auto* opt_a = period->add_option("--a", pa.a, "Semi-major axis of a family member");
    opt_energy->excludes(opt_a);
    period->add_option("--e", pa.e, "Eccentricity of the member used for the quadrature check")
        ->capture_default_str();
    period->add_option("--tol", pa.tol, "Cross-check tolerance")->capture_default_str();
    add_format_option(period, fmt_period);
    period->callback([&] { rc = do_period(pa, fmt_period, out, err); });

    LambertArgs la;
    auto* lambert =
        app.add_subcommand("lambert", "Branches of the passing time for (r1+r2, chord, a)");
    lambert->add_option("--sum", la.sum, "Radius sum r1 + r2")->required();
    lambert->add_option("--chord", la.chord, "Chord length")->required();
    lambert->add_option("--a", la.a, "Semi-major axis")->required();
    add_format_option(lambert, fmt_lambert);
    lambert->callback([&] { rc = do_lambert(la, fmt_lambert, out, err); });

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run every module's invariant suite");
    verify->add_flag("--thorough", va.thorough, "Raise the sample counts about 3x");
    verify->add_option("--seed", va.seed, "Sampling seed")->capture_default_str();
    add_format_option(verify, fmt_verify);
    verify->callback([&] { rc = do_verify(va, fmt_verify, out, err); });

    OrbitArgs oa;
    auto* orbit = app.add_subcommand(
        "orbit-sim", "Integrate the constrained motion from a lifted orbit state; CSV columns "
                     "t,tau,qx,qy,qz,Qx,Qy");
    orbit->add_option("--a", oa.a, "Semi-major axis of the projected ellipse")->required();
    orbit->add_option("--e", oa.e, "Eccentricity")->capture_default_str();
    orbit->add_option("--u0", oa.u0, "Starting eccentric anomaly (rad)")->capture_default_str();
    orbit->add_option("--radius", oa.radius, "Sphere radius")->capture_default_str();
    orbit->add_option("--revolutions", oa.revolutions,
                      "Time span in full revolutions of the projected orbit")
        ->capture_default_str();
    orbit->add_option("--t-end", oa.t_end, "Explicit time span (overrides --revolutions)");
    orbit->add_option("--dt-max", oa.dt_max, "Step-size cap (0 = span/2000)")
        ->capture_default_str();
    orbit->add_option("--tol", oa.tol, "Local error tolerance")->capture_default_str();
    orbit->add_option("--out", oa.out_path, "Write the CSV to this file, summary to stdout");
    add_format_option(orbit, fmt_orbit);
    orbit->callback([&] { rc = do_orbit_sim(oa, fmt_orbit, out, err); });

    ScanArgs sa;
    auto* scan = app.add_subcommand(
        "scan", "Level-set scan of candidate (f, g) transit-time reductions at fixed energy");
    scan->add_option("--energy", sa.energies,
                     "Energy level (repeatable; use --energy=-1 for negatives)")
        ->required();
    scan->add_option("--samples", sa.samples, "Base sample count per energy")
        ->capture_default_str();
    scan->add_option("--seed", sa.seed, "Sampling seed")->capture_default_str();
    scan->add_option("--bin-tol", sa.bin_tol, "Bin pitch for (f, g) matching")
        ->capture_default_str();
    scan->add_option("--candidate", sa.candidate,
                     "theta-sum, half-tangent-sum, tangent-sum, cosine-sum or all")
        ->capture_default_str();
    scan->add_option("--f", sa.f_expr, "Custom candidate f(t1, t2, t12) expression");
    scan->add_option("--g", sa.g_expr, "Custom candidate g(t1, t2, t12) expression");
    scan->add_option("--name", sa.custom_name, "Name for the custom candidate")
        ->capture_default_str();
    scan->add_flag("--allow-asymmetric", sa.allow_asymmetric,
                   "Accept candidates that are not endpoint-symmetric");
    scan->add_flag("--raw", sa.raw,
                   "Scan raw random samples instead of planting matched partners");
    scan->add_option("--csv", sa.csv_path, "Dump the sampled records to this CSV file");
    add_format_option(scan, fmt_scan);
    scan->callback([&] { rc = do_scan(sa, fmt_scan, out, err); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return rc;
}

} // namespace sphkep::cli
