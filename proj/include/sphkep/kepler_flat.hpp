// sphkep/kepler_flat.hpp
//
// Planar Kepler problem with unit gravitational parameter, parametrized by
// eccentric anomaly u. Includes the passing time between two anomalies, its
// rewriting in the Lagrange angles (phi, psi), the chord / radius-sum
// geometry behind Lambert's theorem, and the enumeration of Lambert branches
// for given (r1 + r2, c, a).
#pragma once

#include <utility>
#include <vector>

#include "sphkep/errors.hpp"
#include "sphkep/projection.hpp"

namespace sphkep {

/// Elliptic orbit shape: semi-major axis a > 0 and eccentricity 0 <= e < 1.
class EllipticElements {
public:
    /// @throws InvalidArgument unless a > 0, 0 <= e < 1, both finite.
    EllipticElements(double a, double e);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double e() const noexcept { return e_; }

    /// Squared angular momentum C^2 = a (1 - e^2).
    [[nodiscard]] double angular_momentum_sq() const noexcept { return a_ * (1.0 - e_) * (1.0 + e_); }

private:
    double a_;
    double e_;
};

/// Oriented arc between two eccentric anomalies (u2 < u1 runs backward,
/// |u2 - u1| > 2*pi spans multiple revolutions).
struct AnomalyArc {
    double u1{0.0};
    double u2{0.0};
};

/// Lagrange angles of an arc: cos(phi) = e cos((u1+u2)/2) with phi in [0, pi],
/// psi = (u1 - u2)/2 (unreduced, so multi-revolution arcs keep |psi| > pi).
struct LagrangeAngles {
    double phi{0.0};
    double psi{0.0};
};

/// Focal distances of the arc endpoints and the chord between them.
struct ChordSumTriple {
    /// @throws InvalidArgument on negative entries or a triangle-inequality
    ///         violation beyond 1e-12 relative slack.
    ChordSumTriple(double r1, double r2, double c);

    double r1;
    double r2;
    double c;

    [[nodiscard]] double sum() const noexcept { return r1 + r2; }
};

/// Radius sum and chord determined by (a, phi, psi) alone.
struct ChordSum {
    double sum{0.0};
    double chord{0.0};
};

/// One solution branch of the Lambert inversion. transit is reduced to the
/// fundamental revolution [0, 2*pi*a^(3/2)); each extra full revolution adds
/// one period, tracked by `revolutions` (always 0 for the branches returned
/// by lambert_branches). chord_sign is the sign s in sin(psi) sin(phi) =
/// s * c / (2a) that produced the branch.
struct LambertBranch {
    LagrangeAngles angles;
    double transit{0.0};
    int chord_sign{1};
    int revolutions{0};
};

/// Orbital energy E = -1/(2a).
[[nodiscard]] double flat_energy(const EllipticElements& el);

/// Focus-centered position Q(u) = (a (cos u - e), a sqrt(1-e^2) sin u).
/// The focal distance is ||Q(u)|| = a (1 - e cos u).
[[nodiscard]] PlanePoint position_from_anomaly(const EllipticElements& el, double u);

/// Velocity dQ/dtau at anomaly u for the unit-parameter problem,
/// (-sin u, sqrt(1-e^2) cos u) / (sqrt(a) (1 - e cos u)).
[[nodiscard]] Vec2 velocity_from_anomaly(const EllipticElements& el, double u);

/// Passing time a^(3/2) [(u2 - u1) - e (sin u2 - sin u1)]. Signed with the
/// arc orientation; a full revolution gives the period 2*pi*a^(3/2).
[[nodiscard]] double passing_time_flat(const EllipticElements& el, const AnomalyArc& arc);

/// Lagrange angles of an arc. The map (u1, u2) -> (phi, psi) at fixed e is
/// two-to-one: (-u2, -u1) gives the same angles.
[[nodiscard]] LagrangeAngles lagrange_angles(const AnomalyArc& arc, double e);

/// Passing time in Lagrange form, a^(3/2) (-2 psi + 2 sin psi cos phi).
/// Identical to passing_time_flat on the corresponding arc; the eccentricity
/// enters only through the angles.
[[nodiscard]] double passing_time_lagrange(double a, const LagrangeAngles& angles);

/// Radius sum and chord of the arc with angles (phi, psi) on an ellipse with
/// semi-major axis a: sum = 2a (1 - cos psi cos phi), c = 2a |sin psi sin phi|.
[[nodiscard]] ChordSum chord_and_sum(double a, const LagrangeAngles& angles);

/**
 * @brief All (phi, psi) branches compatible with radius sum, chord and a.
 *
 * Solves cos(psi) cos(phi) = 1 - sum/(2a), sin(psi) sin(phi) = s * c/(2a)
 * for both signs s, with phi in [0, pi] and psi in (-pi, pi], and reports
 * each branch's passing time reduced to [0, 2*pi*a^(3/2)). Branches equal to
 * within 1e-10 in both angles are merged. The same (sum, c, a) admits several
 * transit values; this multivaluedness is the content of Lambert's theorem.
 *
 * @throws DegenerateInput for sum <= 0 or c < 0 (including sum = c = 0).
 * @throws NoSolution if no ellipse of semi-major axis a fits the geometry
 *         (c > sum, or 4a < sum + c beyond tolerance).
 */
[[nodiscard]] std::vector<LambertBranch> lambert_branches(double sum, double c, double a);

/// Solve Kepler's equation u - e sin u = M by Newton iteration (tolerance
/// 1e-13 on the equation residual, initial guess u = M + e sin M).
/// @throws StepFailure if 50 iterations do not converge.
[[nodiscard]] double solve_kepler(double mean_anomaly, double e);

} // namespace sphkep
