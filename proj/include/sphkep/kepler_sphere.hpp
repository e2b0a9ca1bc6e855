// sphkep/kepler_sphere.hpp
//
// The Kepler problem on a sphere of radius R with the cotangent potential.
// Orbits are described through their central projections: an elliptic orbit
// of the planar problem with elements (a, e) lifts to a closed spherical
// orbit, and every quantity here is parametrized by the planar eccentric
// anomaly u of the projection.
#pragma once

#include "sphkep/errors.hpp"
#include "sphkep/kepler_flat.hpp"

namespace sphkep {

/// Energy of the spherical problem, together with the sphere radius it was
/// computed on. The closed-form period below requires radius 1.
class SphericalEnergy {
public:
    /// @throws InvalidArgument unless value is finite and radius > 0.
    SphericalEnergy(double value, double radius);

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }

private:
    double value_;
    double radius_;
};

/// Geodesic side lengths (as angles, R = 1 units of the arc's sphere) of the
/// triangle spanned by the two lifted arc endpoints and the north pole:
/// theta1, theta2 are the polar distances of the endpoints, theta12 their
/// separation.
struct GeodesicTriangle {
    double theta1{0.0};
    double theta2{0.0};
    double theta12{0.0};
};

/// Energy of the lifted orbit: E = -1/(2a) + a (1 - e^2) / (2 R^2), i.e. the
/// planar energy plus C^2/(2 R^2).
[[nodiscard]] SphericalEnergy spherical_energy(const EllipticElements& el, double radius);

/// The member with eccentricity e of the iso-energy family on the unit
/// sphere: the positive root of a^2 (1 - e^2) - 2 a E - 1 = 0.
/// @throws UnsupportedRadius unless energy.radius() == 1 within 1e-12.
[[nodiscard]] EllipticElements elements_family_from_energy(const SphericalEnergy& energy,
                                                           double e);

/// Angle in (0, pi) subtended at the center by the major axis of any orbit
/// with this energy: tan(theta_a) = -1/(R E), continuous through E = 0
/// where theta_a = pi/2. Equals atan(a(1-e)/R) + atan(a(1+e)/R) for every
/// family member.
[[nodiscard]] double geodesic_major_angle(const SphericalEnergy& energy);

/// Passing time of the lifted arc,
///   integral of a^(3/2) (1 - e cos u) / (1 + (a^2/R^2)(1 - e cos u)^2) du,
/// by adaptive Simpson quadrature with absolute tolerance abs_tol.
/// Signed with the arc orientation.
/// @throws QuadratureFailure if the tolerance cannot be met.
[[nodiscard]] double passing_time_spherical(const EllipticElements& el, const AnomalyArc& arc,
                                            double radius, double abs_tol = 1e-12);

/// Closed-form period on the unit sphere,
///   T = pi sqrt(E + sqrt(E^2 + 1)) / sqrt(E^2 + 1).
/// Depends on the energy alone, not on the family member.
/// @throws UnsupportedRadius unless energy.radius() == 1 within 1e-12.
[[nodiscard]] double spherical_period_closed(const SphericalEnergy& energy);

/// The same period via the two-term complex form
///   T = (pi sqrt(2)/2) (1/sqrt(E + i) + 1/sqrt(E - i))
/// with principal square roots (the two terms are conjugate, so the sum is
/// real). Kept as an independent cross-check of spherical_period_closed.
/// @throws UnsupportedRadius unless energy.radius() == 1 within 1e-12.
[[nodiscard]] double spherical_period_closed_complex(const SphericalEnergy& energy);

/// Full-revolution passing time on the unit sphere by trapezoid quadrature
/// with node doubling (absolute tolerance abs_tol). Agrees with the closed
/// form at the orbit's energy.
[[nodiscard]] double spherical_period_quadrature(const EllipticElements& el,
                                                 double abs_tol = 1e-13);

/// Geodesic triangle of the lifted arc endpoints: theta_i = atan(r_i / R)
/// with r_i the planar focal distances, theta12 from the lifted positions.
[[nodiscard]] GeodesicTriangle geodesic_triangle_from_arc(const EllipticElements& el,
                                                          const AnomalyArc& arc, double radius);

} // namespace sphkep
