#include "sphkep/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sphkep/kepler_sphere.hpp"

namespace sphkep {

namespace {

struct State6 {
    Vec3 q;
    Vec3 v;
};

State6 operator+(const State6& a, const State6& b) { return {a.q + b.q, a.v + b.v}; }
State6 operator*(double s, const State6& a) { return {s * a.q, s * a.v}; }

State6 renormalize(const ProjectionContext& ctx, const State6& y)
{
    const double r = ctx.radius();
    const Vec3 q = (r / norm(y.q)) * y.q;
    const Vec3 v = y.v - (dot(q, y.v) / (r * r)) * q;
    return {q, v};
}

Vec3 accel_of(const ProjectionContext& ctx, const State6& y)
{
    const Vec3 force = sphere_force(ctx, SpherePoint{y.q});
    const double lambda = -norm_sq(y.v) / (ctx.radius() * ctx.radius());
    return force + lambda * y.q;
}

State6 deriv(const ProjectionContext& ctx, const State6& y)
{
    return {y.v, accel_of(ctx, y)};
}

// Dormand-Prince 5(4) tableau. The last stage row doubles as the 5th order
// weights; e[] are the weights of the embedded error estimate.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct StepResult {
    State6 y;
    double error; // scaled error norm; accept when <= 1
};

StepResult dp5_step(const ProjectionContext& ctx, const State6& y, double dt, double tol)
{
    const State6 k1 = deriv(ctx, y);
    const State6 k2 = deriv(ctx, y + dt * (kA21 * k1));
    const State6 k3 = deriv(ctx, y + dt * (kA31 * k1 + kA32 * k2));
    const State6 k4 = deriv(ctx, y + dt * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const State6 k5 = deriv(ctx, y + dt * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const State6 k6 =
        deriv(ctx, y + dt * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const State6 ynew = y + dt * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const State6 k7 = deriv(ctx, ynew);
    const State6 diff =
        dt * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    const std::array<double, 6> err{diff.q.x, diff.q.y, diff.q.z,
                                    diff.v.x, diff.v.y, diff.v.z};
    const std::array<double, 6> a{y.q.x, y.q.y, y.q.z, y.v.x, y.v.y, y.v.z};
    const std::array<double, 6> b{ynew.q.x, ynew.q.y, ynew.q.z, ynew.v.x, ynew.v.y, ynew.v.z};
    double acc = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double scale = tol + tol * std::max(std::abs(a[i]), std::abs(b[i]));
        const double r = err[i] / scale;
        acc += r * r;
    }
    return {ynew, std::sqrt(acc / 6.0)};
}

// C2 quintic Hermite basis on [0, 1] for (value, first, second derivative)
// data at both endpoints.
double quintic_hermite(double s, double f0, double d0, double s0, double f1, double d1,
                       double s1)
{
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double s4 = s3 * s;
    const double s5 = s4 * s;
    const double h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    const double h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    const double h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    const double h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    const double h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    const double h5 = 0.5 * s3 - s4 + 0.5 * s5;
    return f0 * h0 + d0 * h1 + s0 * h2 + f1 * h3 + d1 * h4 + s1 * h5;
}

constexpr std::array<double, 5> kGlNodes{
    0.5 - 0.5 * 0.90617984593866399, 0.5 - 0.5 * 0.53846931010568309, 0.5,
    0.5 + 0.5 * 0.53846931010568309, 0.5 + 0.5 * 0.90617984593866399};
constexpr std::array<double, 5> kGlWeights{
    0.5 * 0.23692688505618909, 0.5 * 0.47862867049936647, 0.5 * 0.56888888888888889,
    0.5 * 0.47862867049936647, 0.5 * 0.23692688505618909};

// Fornberg's algorithm: weights of derivative orders 0..m at point z over the
// nodes x[0..n-1].
void fd_weights(double z, const double* x, int n, int m,
                std::vector<std::vector<double>>& c)
{
    c.assign(static_cast<std::size_t>(m) + 1,
             std::vector<double>(static_cast<std::size_t>(n), 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
}

} // namespace

Vec3 constrained_accel(const ProjectionContext& ctx, const SphereState& state)
{
    return accel_of(ctx, State6{state.q, state.v});
}

std::vector<SphereState> integrate_orbit(const ProjectionContext& ctx,
                                         const SphereState& initial, double t_end,
                                         double dt_max, double local_tol)
{
    if (!std::isfinite(t_end)) {
        throw InvalidArgument("integrate_orbit: t_end must be finite");
    }
    if (!(dt_max > 0.0) || !std::isfinite(dt_max)) {
        throw InvalidArgument("integrate_orbit: dt_max must be positive");
    }
    if (!(local_tol > 0.0)) {
        throw InvalidArgument("integrate_orbit: local_tol must be positive");
    }

    State6 y = renormalize(ctx, {initial.q, initial.v});
    if (height(ctx, SpherePoint{y.q}) <= 0.0) {
        throw HemisphereExit("integrate_orbit: initial state is not north of the equator");
    }

    std::vector<SphereState> out;
    out.push_back({y.q, y.v, initial.t});
    if (t_end == 0.0) {
        return out;
    }

    const double dir = (t_end > 0.0) ? 1.0 : -1.0;
    const double t_final = initial.t + t_end;
    const double span = std::abs(t_end);
    double t = initial.t;
    double dt = dir * std::min(dt_max, 1e-2 * span);
    const std::size_t max_steps = 4'000'000;

    for (std::size_t step = 0; step < max_steps;) {
        // Land exactly, and split the tail over the last two steps so the
        // final step is never a micro step (degenerate sample spacing breaks
        // finite-difference consumers downstream).
        const double remaining = t_final - t;
        if (std::abs(dt) >= std::abs(remaining)) {
            dt = remaining;
        } else if (std::abs(dt) >= 0.5 * std::abs(remaining)) {
            dt = 0.5 * remaining;
        }
        const StepResult trial = dp5_step(ctx, y, dt, local_tol);
        if (trial.error <= 1.0) {
            ++step;
            t += dt;
            y = renormalize(ctx, trial.y);
            if (height(ctx, SpherePoint{y.q}) <= 0.0) {
                throw HemisphereExit("integrate_orbit: trajectory crossed the equator");
            }
            out.push_back({y.q, y.v, t});
            if (t == t_final || std::abs(t_final - t) <= 1e-15 * std::abs(t_final)) {
                return out;
            }
            const double grow =
                (trial.error > 0.0) ? 0.9 * std::pow(trial.error, -0.2) : 5.0;
            dt *= std::clamp(grow, 0.2, 5.0);
        } else {
            dt *= std::max(0.2, 0.9 * std::pow(trial.error, -0.2));
        }
        if (std::abs(dt) > dt_max) {
            dt = dir * dt_max;
        }
        if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t))) {
            throw StepFailure("integrate_orbit: step size underflow");
        }
    }
    throw StepFailure("integrate_orbit: step budget exhausted");
}

std::vector<PlanarSample> reparametrize_and_project(const ProjectionContext& ctx,
                                                    const std::vector<SphereState>& trajectory)
{
    std::vector<PlanarSample> out;
    out.reserve(trajectory.size());
    const double r = ctx.radius();

    double tau = 0.0;
    double h_prev = 0.0, dh_prev = 0.0, ddh_prev = 0.0, t_prev = 0.0;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const SphereState& s = trajectory[i];
        const double h = height(ctx, SpherePoint{s.q});
        if (h <= 0.0) {
            throw HemisphereExit("reparametrize_and_project: sample below the equator");
        }
        const double dh = dot(ctx.pole_axis(), s.v) / r;
        const double ddh = dot(ctx.pole_axis(), constrained_accel(ctx, s)) / r;

        if (i > 0) {
            const double dt = s.t - t_prev;
            double acc = 0.0;
            for (int g = 0; g < 5; ++g) {
                const double hg = quintic_hermite(kGlNodes[g], h_prev, dh_prev * dt,
                                                  ddh_prev * dt * dt, h, dh * dt, ddh * dt * dt);
                acc += kGlWeights[g] / (hg * hg);
            }
            tau += dt * acc;
        }

        const PlanePoint proj = central_project(ctx, SpherePoint{s.q});
        const Vec3 dq_dtau = h * s.v - dh * s.q; // in-plane by construction
        out.push_back({s.t, tau, proj.q, ctx.plane_coords(dq_dtau)});

        t_prev = s.t;
        h_prev = h;
        dh_prev = dh;
        ddh_prev = ddh;
    }
    return out;
}

SphereState lift_state(const ProjectionContext& ctx, const EllipticElements& el, double u)
{
    const double r = ctx.radius();
    const PlanePoint plane_q = position_from_anomaly(el, u);
    const Vec2 plane_v = velocity_from_anomaly(el, u); // dQ/dtau

    const Vec3 q_e = ctx.embed(plane_q);
    const double h = r / norm(q_e);
    const Vec3 dq_dtau = plane_v.x * ctx.frame_u() + plane_v.y * ctx.frame_v();
    const double dh = -h * dot(plane_q.q, plane_v) / (r * r);
    const Vec3 v = dh * q_e + (1.0 / h) * dq_dtau;
    return {h * q_e, v, 0.0};
}

double correspondence_residual(const ProjectionContext& ctx, const EllipticElements& el,
                               const AnomalyArc& arc)
{
    const double r = ctx.radius();
    const double transit = passing_time_spherical(el, arc, r);
    const SphereState start = lift_state(ctx, el, arc.u1);
    const SpherePoint target = lift(ctx, position_from_anomaly(el, arc.u2));
    if (std::abs(transit) < 1e-300) {
        return r * angular_separation(start.q, target.q);
    }
    const double dt_max = std::abs(transit) / 64.0;
    const std::vector<SphereState> traj = integrate_orbit(ctx, start, transit, dt_max);
    return r * angular_separation(traj.back().q, target.q);
}

double total_energy(const ProjectionContext& ctx, const SphereState& state)
{
    return 0.5 * norm_sq(state.v) + potential(ctx, SpherePoint{state.q});
}

double axial_momentum(const ProjectionContext& ctx, const SphereState& state)
{
    return dot(ctx.pole_axis(), cross(state.q, state.v));
}

double max_kepler_residual(const std::vector<PlanarSample>& samples)
{
    if (samples.size() < 5) {
        throw InvalidArgument("max_kepler_residual: need at least five samples");
    }
    double worst = 0.0;
    std::vector<std::vector<double>> weights;
    for (std::size_t i = 2; i + 2 < samples.size(); ++i) {
        std::array<double, 5> taus;
        for (int j = 0; j < 5; ++j) {
            taus[static_cast<std::size_t>(j)] = samples[i - 2 + static_cast<std::size_t>(j)].tau;
        }
        fd_weights(samples[i].tau, taus.data(), 5, 1, weights);
        Vec2 dq{};
        Vec2 dv{};
        for (int j = 0; j < 5; ++j) {
            dq = dq + weights[1][static_cast<std::size_t>(j)]
                          * samples[i - 2 + static_cast<std::size_t>(j)].q;
            dv = dv + weights[1][static_cast<std::size_t>(j)]
                          * samples[i - 2 + static_cast<std::size_t>(j)].v;
        }
        const Vec2 qi = samples[i].q;
        const double rr = norm(qi);
        worst = std::max(worst, norm(dq - samples[i].v));
        worst = std::max(worst, norm(dv + qi / (rr * rr * rr)));
    }
    return worst;
}

} // namespace sphkep
