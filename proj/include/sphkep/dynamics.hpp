// sphkep/dynamics.hpp
//
// Direct numerical integration of the constrained motion on the sphere and
// its central projection back to the plane. This module is deliberately
// independent of the closed-form machinery: it knows only the force field,
// the constraint, and the time reparametrization, so its output can be held
// against the analytic predictions as a genuine cross-check.
//
// Integrator: embedded Dormand-Prince 5(4) with PI-free standard step
// control, local tolerance applied per component, and a projection of every
// accepted state back onto the sphere and its tangent bundle. The
// reparametrized time tau (d tau = h^-2 dt) is accumulated per step by
// Gauss-Legendre quadrature over a quintic Hermite model of h(t), matching
// the integrator's order.
#pragma once

#include <cstddef>
#include <vector>

#include "sphkep/kepler_flat.hpp"
#include "sphkep/projection.hpp"

namespace sphkep {

/// State of the constrained motion: position on the sphere, tangent velocity,
/// and the time it belongs to.
struct SphereState {
    Vec3 q;
    Vec3 v;
    double t{0.0};
};

/// A trajectory sample after projection and reparametrization. v is dQ/dtau.
struct PlanarSample {
    double t{0.0};
    double tau{0.0};
    Vec2 q;
    Vec2 v;
};

/// Acceleration of the constrained problem, sphere_force(q) + lambda q with
/// the multiplier lambda = -||v||^2 / R^2 that keeps ||q|| = R.
/// @throws PoleSingularity near the poles.
[[nodiscard]] Vec3 constrained_accel(const ProjectionContext& ctx, const SphereState& state);

/**
 * @brief Integrate the constrained motion from `initial` over a span t_end.
 *
 * Returns the accepted states (initial state first, exact landing on
 * initial.t + t_end last). t_end may be negative. Every accepted state is
 * renormalized onto the sphere and its velocity onto the tangent plane, so
 * the constraint drift stays at the local tolerance level. Conserved
 * quantities (total_energy, axial_momentum) hold to ~1e-8 relative over a
 * revolution at the default tolerance.
 *
 * @param dt_max    hard cap on the step size (> 0); also bounds the sample
 *                  spacing, which matters to finite-difference consumers.
 * @param local_tol absolute and relative local error tolerance per step.
 * @throws HemisphereExit if the trajectory leaves the open northern
 *         hemisphere, StepFailure if the controller stalls.
 */
[[nodiscard]] std::vector<SphereState> integrate_orbit(const ProjectionContext& ctx,
                                                       const SphereState& initial, double t_end,
                                                       double dt_max, double local_tol = 1e-12);

/// Central projection of a trajectory with the accumulated reparametrized
/// time: tau' = h^-2, tau(first sample) = 0, and dQ/dtau = h v - h' q
/// expressed in frame coordinates.
/// @throws HemisphereExit if any sample has h <= 0.
[[nodiscard]] std::vector<PlanarSample> reparametrize_and_project(
    const ProjectionContext& ctx, const std::vector<SphereState>& trajectory);

/// Exact lifted state of the planar orbit (a, e) at eccentric anomaly u:
/// position from the inverse projection, velocity from the chain rule with
/// h' = -h <Q, dQ/dtau> / R^2. The returned state carries t = 0.
[[nodiscard]] SphereState lift_state(const ProjectionContext& ctx, const EllipticElements& el,
                                     double u);

/**
 * @brief End-to-end correspondence residual for one arc.
 *
 * Lifts the planar orbit at u1, integrates the spherical motion for exactly
 * the arc's spherical passing time, and returns the geodesic distance from
 * the endpoint to the lift of the planar position at u2. Small residuals
 * mean the projected dynamics reproduces the planar Kepler orbit including
 * its time parametrization.
 */
[[nodiscard]] double correspondence_residual(const ProjectionContext& ctx,
                                             const EllipticElements& el, const AnomalyArc& arc);

/// Conserved energy of a state, ||v||^2 / 2 + U(q).
[[nodiscard]] double total_energy(const ProjectionContext& ctx, const SphereState& state);

/// Conserved angular momentum about the pole axis, <Z, q x v>.
[[nodiscard]] double axial_momentum(const ProjectionContext& ctx, const SphereState& state);

/// Largest Kepler equation-of-motion residual over the interior samples of a
/// projected trajectory, with the ODE taken in first-order form: both
/// || dQ/dtau - V || and || dV/dtau + Q/||Q||^3 || are measured, the
/// derivatives by five-point finite differences in tau. The first-order form
/// keeps the finite differences well conditioned near pericenter passages,
/// where a direct second difference of Q loses too many digits to certify
/// small residuals.
/// @throws InvalidArgument if fewer than five samples are supplied.
[[nodiscard]] double max_kepler_residual(const std::vector<PlanarSample>& samples);

} // namespace sphkep
