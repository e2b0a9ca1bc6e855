#include "sphkep/projection.hpp"

#include <cmath>

namespace sphkep {

namespace {

bool finite(const Vec3& v)
{
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

} // namespace

ProjectionContext::ProjectionContext(double radius, Vec3 pole_axis)
    : radius_(radius)
{
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("ProjectionContext: radius must be positive and finite");
    }
    if (!finite(pole_axis) || std::abs(norm(pole_axis) - 1.0) > 1e-14) {
        throw InvalidArgument("ProjectionContext: pole axis must be a unit vector");
    }
    z_ = normalized(pole_axis);

    // Seed Gram-Schmidt with the coordinate axis least aligned with Z (lowest
    // index on ties) so the frame depends only on Z, never on caller state.
    const double ax = std::abs(z_.x);
    const double ay = std::abs(z_.y);
    const double az = std::abs(z_.z);
    Vec3 seed{0.0, 0.0, 1.0};
    if (ax <= ay && ax <= az) {
        seed = Vec3{1.0, 0.0, 0.0};
    } else if (ay <= az) {
        seed = Vec3{0.0, 1.0, 0.0};
    }
    e1_ = normalized(seed - dot(seed, z_) * z_);
    e2_ = cross(z_, e1_);
}

Vec3 ProjectionContext::embed(const PlanePoint& p) const noexcept
{
    return radius_ * z_ + p.q.x * e1_ + p.q.y * e2_;
}

Vec2 ProjectionContext::plane_coords(const Vec3& v) const noexcept
{
    return {dot(v, e1_), dot(v, e2_)};
}

double height(const ProjectionContext& ctx, const SpherePoint& p)
{
    return dot(ctx.pole_axis(), p.q) / ctx.radius();
}

PlanePoint central_project(const ProjectionContext& ctx, const SpherePoint& p)
{
    const double h = height(ctx, p);
    if (!(h > 0.0)) {
        throw HemisphereError("central_project: point is not in the open northern hemisphere");
    }
    const Vec3 offset = p.q / h - ctx.pole();
    return PlanePoint{ctx.plane_coords(offset)};
}

SpherePoint lift(const ProjectionContext& ctx, const PlanePoint& p)
{
    const double r2 = norm_sq(p.q) / (ctx.radius() * ctx.radius());
    const double h = 1.0 / std::sqrt(1.0 + r2);
    return SpherePoint{h * ctx.embed(p)};
}

Vec3 sphere_force(const ProjectionContext& ctx, const SpherePoint& p)
{
    const double h = height(ctx, p);
    const double gap = 1.0 - std::abs(h);
    if (gap < kPoleTolerance) {
        throw PoleSingularity("sphere_force: evaluation at a pole");
    }
    const double r = ctx.radius();
    const double one_m_h2 = (1.0 - h) * (1.0 + h);
    const double b = 1.0 / (r * r * one_m_h2 * std::sqrt(one_m_h2));
    const Vec3 meridian = ctx.pole_axis() - (h / r) * p.q;
    return b * meridian;
}

double potential(const ProjectionContext& ctx, const SpherePoint& p)
{
    const double h = height(ctx, p);
    const double gap = 1.0 - std::abs(h);
    if (gap < kPoleTolerance) {
        throw PoleSingularity("potential: evaluation at a pole");
    }
    return -h / (ctx.radius() * std::sqrt((1.0 - h) * (1.0 + h)));
}

} // namespace sphkep
