// sphkep/projection.hpp
//
// Central projection between a sphere of radius R and the plane tangent at
// its north pole, together with the force field on the sphere whose central
// projection is the planar Kepler attraction.
//
// Conventions, used consistently across the library:
//   * Z is the unit vector to the north pole, so the pole itself is R*Z.
//   * h(q) = <Z, q>/R is the normalized height of a sphere point; the open
//     northern hemisphere is h in (0, 1).
//   * A PlanePoint stores coordinates of Q = q/h - R*Z in the orthonormal
//     in-plane frame (e1, e2) carried by the ProjectionContext, i.e. the
//     displacement from the projection of the pole ("focus-centered").
#pragma once

#include "sphkep/errors.hpp"
#include "sphkep/geometry.hpp"

namespace sphkep {

/// Points closer than this to a pole (in |h| distance from 1) are treated as
/// singular by the force and potential evaluations.
inline constexpr double kPoleTolerance = 1e-12;

/// A point on the sphere of radius R, stored as its ambient coordinates.
struct SpherePoint {
    Vec3 q;
};

/// A point of the tangent plane at the north pole, in frame coordinates
/// centered on the pole's projection.
struct PlanePoint {
    Vec2 q;
};

/**
 * @brief Sphere radius plus pole axis, with a deterministic in-plane frame.
 *
 * The frame (e1, e2, Z) is right-handed and orthonormal. e1 is obtained by
 * Gram-Schmidt from the coordinate axis least aligned with Z (lowest index on
 * ties), e2 = Z x e1, so equal inputs always produce identical frames.
 */
class ProjectionContext {
public:
    /// @throws InvalidArgument unless radius > 0 and ||pole_axis|| = 1
    ///         within 1e-14.
    ProjectionContext(double radius, Vec3 pole_axis);

    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] const Vec3& pole_axis() const noexcept { return z_; }
    [[nodiscard]] Vec3 pole() const noexcept { return radius_ * z_; }
    [[nodiscard]] const Vec3& frame_u() const noexcept { return e1_; }
    [[nodiscard]] const Vec3& frame_v() const noexcept { return e2_; }

    /// Ambient position of a plane point: R*Z + x*e1 + y*e2.
    [[nodiscard]] Vec3 embed(const PlanePoint& p) const noexcept;

    /// Frame coordinates of an ambient vector lying in the tangent plane
    /// direction span (its Z component is ignored).
    [[nodiscard]] Vec2 plane_coords(const Vec3& v) const noexcept;

private:
    double radius_;
    Vec3 z_;
    Vec3 e1_;
    Vec3 e2_;
};

/// Normalized height h = <Z, q>/R. Total on the sphere; h in [-1, 1].
[[nodiscard]] double height(const ProjectionContext& ctx, const SpherePoint& p);

/**
 * @brief Central projection q -> q/h onto the tangent plane at the pole.
 *
 * Defined on the open northern hemisphere. The result satisfies
 * ||Q|| = R*sqrt(1 - h^2)/h.
 *
 * @throws HemisphereError if h <= 0.
 */
[[nodiscard]] PlanePoint central_project(const ProjectionContext& ctx, const SpherePoint& p);

/**
 * @brief Inverse of central_project; total on the plane.
 *
 * h = 1/sqrt(1 + ||Q||^2/R^2) and q = h*(R*Z + Q); the result is always in
 * the open northern hemisphere.
 */
[[nodiscard]] SpherePoint lift(const ProjectionContext& ctx, const PlanePoint& p);

/**
 * @brief Attracting central force field on the sphere, b(h) * Z_B.
 *
 * Z_B = Z - (h/R) q is the unit tangent at q pointing along the meridian
 * toward the north pole, scaled by sqrt(1 - h^2); the strength factor is
 * b = R^-2 (1 - h^2)^(-3/2). The field is tangent to the sphere and is
 * defined on all of the sphere except the two poles (it is evaluated as
 * written also south of the equator, where it attracts toward the north
 * pole / repels from the south pole).
 *
 * @throws PoleSingularity if |h| is within kPoleTolerance of 1.
 */
[[nodiscard]] Vec3 sphere_force(const ProjectionContext& ctx, const SpherePoint& p);

/**
 * @brief Cotangent potential U(q) = -h / (R*sqrt(1 - h^2)).
 *
 * For northern points U(q) = -1/||Q|| with Q the central projection, so the
 * projected problem sees the planar Kepler potential. The field of
 * sphere_force is -grad U restricted to the sphere.
 *
 * @throws PoleSingularity if |h| is within kPoleTolerance of 1.
 */
[[nodiscard]] double potential(const ProjectionContext& ctx, const SpherePoint& p);

} // namespace sphkep
