// sphkep/geometry.hpp
//
// Minimal fixed-size vector types. Nothing here knows about spheres or
// orbits; it is shared plumbing for the rest of the library.
#pragma once

#include <cmath>

namespace sphkep {

struct Vec2 {
    double x{0.0};
    double y{0.0};
};

[[nodiscard]] constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
[[nodiscard]] constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
[[nodiscard]] constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
[[nodiscard]] constexpr Vec2 operator*(Vec2 a, double s) { return s * a; }
[[nodiscard]] constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

[[nodiscard]] constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
[[nodiscard]] constexpr double norm_sq(Vec2 a) { return dot(a, a); }
[[nodiscard]] inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};
};

[[nodiscard]] constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
[[nodiscard]] constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
[[nodiscard]] constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
[[nodiscard]] constexpr Vec3 operator*(Vec3 a, double s) { return s * a; }
[[nodiscard]] constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }

[[nodiscard]] constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
[[nodiscard]] constexpr double norm_sq(Vec3 a) { return dot(a, a); }
[[nodiscard]] inline double norm(Vec3 a) { return std::sqrt(norm_sq(a)); }

[[nodiscard]] constexpr Vec3 cross(Vec3 a, Vec3 b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

[[nodiscard]] inline Vec3 normalized(Vec3 a) { return a / norm(a); }

/// Angle in [0, pi] between two nonzero vectors. atan2 of the cross and dot
/// products stays accurate for nearly parallel and nearly antiparallel pairs,
/// where acos of the normalized dot product loses half the digits.
[[nodiscard]] inline double angular_separation(Vec3 a, Vec3 b)
{
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

} // namespace sphkep
