#include "sphkep/kepler_sphere.hpp"

#include <cmath>
#include <complex>

#include "sphkep/quadrature.hpp"

namespace sphkep {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

void require_unit_radius(const SphericalEnergy& energy, const char* who)
{
    if (std::abs(energy.radius() - 1.0) > 1e-12) {
        throw UnsupportedRadius(std::string(who) + ": defined for unit sphere radius only");
    }
}

} // namespace

SphericalEnergy::SphericalEnergy(double value, double radius)
    : value_(value), radius_(radius)
{
    if (!std::isfinite(value)) {
        throw InvalidArgument("SphericalEnergy: value must be finite");
    }
    if (!std::isfinite(radius) || !(radius > 0.0)) {
        throw InvalidArgument("SphericalEnergy: radius must be positive");
    }
}

SphericalEnergy spherical_energy(const EllipticElements& el, double radius)
{
    if (!std::isfinite(radius) || !(radius > 0.0)) {
        throw InvalidArgument("spherical_energy: radius must be positive");
    }
    const double value = flat_energy(el) + el.angular_momentum_sq() / (2.0 * radius * radius);
    return SphericalEnergy(value, radius);
}

EllipticElements elements_family_from_energy(const SphericalEnergy& energy, double e)
{
    require_unit_radius(energy, "elements_family_from_energy");
    if (!std::isfinite(e) || e < 0.0 || e >= 1.0) {
        throw InvalidArgument("elements_family_from_energy: eccentricity must lie in [0, 1)");
    }
    const double v = energy.value();
    const double one_m_e2 = (1.0 - e) * (1.0 + e);
    const double root = std::sqrt(v * v + one_m_e2);
    // Positive quadratic root, written without cancellation on either sign.
    const double a = (v >= 0.0) ? (v + root) / one_m_e2 : 1.0 / (root - v);
    return EllipticElements(a, e);
}

double geodesic_major_angle(const SphericalEnergy& energy)
{
    return std::atan2(1.0, -energy.radius() * energy.value());
}

double passing_time_spherical(const EllipticElements& el, const AnomalyArc& arc,
                              double radius, double abs_tol)
{
    if (!std::isfinite(radius) || !(radius > 0.0)) {
        throw InvalidArgument("passing_time_spherical: radius must be positive");
    }
    const double a = el.a();
    const double e = el.e();
    const double a32 = a * std::sqrt(a);
    const double a2_over_r2 = (a / radius) * (a / radius);
    auto integrand = [=](double u) {
        const double w = 1.0 - e * std::cos(u);
        return a32 * w / (1.0 + a2_over_r2 * w * w);
    };
    return adaptive_simpson(integrand, arc.u1, arc.u2, abs_tol);
}

double spherical_period_closed(const SphericalEnergy& energy)
{
    require_unit_radius(energy, "spherical_period_closed");
    const double v = energy.value();
    const double root = std::hypot(v, 1.0);
    // v + root cancels for large negative v; the reciprocal form is exact.
    const double inner = (v >= 0.0) ? v + root : 1.0 / (root - v);
    return kPi * std::sqrt(inner) / root;
}

double spherical_period_closed_complex(const SphericalEnergy& energy)
{
    require_unit_radius(energy, "spherical_period_closed_complex");
    const std::complex<double> v(energy.value(), 0.0);
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> total = 1.0 / std::sqrt(v + i) + 1.0 / std::sqrt(v - i);
    return 0.5 * kPi * std::sqrt(2.0) * total.real();
}

double spherical_period_quadrature(const EllipticElements& el, double abs_tol)
{
    const double a = el.a();
    const double e = el.e();
    const double a32 = a * std::sqrt(a);
    auto integrand = [=](double u) {
        const double w = 1.0 - e * std::cos(u);
        return a32 * w / (1.0 + a * a * w * w);
    };
    return trapezoid_periodic(integrand, kTwoPi, abs_tol);
}

GeodesicTriangle geodesic_triangle_from_arc(const EllipticElements& el,
                                            const AnomalyArc& arc, double radius)
{
    if (!std::isfinite(radius) || !(radius > 0.0)) {
        throw InvalidArgument("geodesic_triangle_from_arc: radius must be positive");
    }
    const ProjectionContext ctx(radius, {0.0, 0.0, 1.0});
    const SpherePoint q1 = lift(ctx, position_from_anomaly(el, arc.u1));
    const SpherePoint q2 = lift(ctx, position_from_anomaly(el, arc.u2));
    const double r1 = el.a() * (1.0 - el.e() * std::cos(arc.u1));
    const double r2 = el.a() * (1.0 - el.e() * std::cos(arc.u2));
    return {std::atan2(r1, radius), std::atan2(r2, radius), angular_separation(q1.q, q2.q)};
}

} // namespace sphkep
