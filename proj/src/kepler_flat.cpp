#include "sphkep/kepler_flat.hpp"

#include <algorithm>
#include <cmath>

namespace sphkep {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

double clamp_to_unit(double x)
{
    return std::min(1.0, std::max(-1.0, x));
}

/// Reduce x to (-pi, pi].
double reduce_angle(double x)
{
    double r = std::remainder(x, kTwoPi);
    if (r <= -kPi) {
        r += kTwoPi;
    }
    return r;
}

} // namespace

EllipticElements::EllipticElements(double a, double e) : a_(a), e_(e)
{
    if (!std::isfinite(a) || !(a > 0.0)) {
        throw InvalidArgument("EllipticElements: semi-major axis must be positive");
    }
    if (!std::isfinite(e) || e < 0.0 || e >= 1.0) {
        throw InvalidArgument("EllipticElements: eccentricity must lie in [0, 1)");
    }
}

ChordSumTriple::ChordSumTriple(double r1_in, double r2_in, double c_in)
    : r1(r1_in), r2(r2_in), c(c_in)
{
    if (!std::isfinite(r1) || !std::isfinite(r2) || !std::isfinite(c)
        || r1 < 0.0 || r2 < 0.0 || c < 0.0) {
        throw InvalidArgument("ChordSumTriple: entries must be finite and nonnegative");
    }
    const double scale = std::max({r1, r2, c, 1e-300});
    if (c > r1 + r2 + 1e-12 * scale || std::abs(r1 - r2) > c + 1e-12 * scale) {
        throw InvalidArgument("ChordSumTriple: triangle inequality violated");
    }
}

double flat_energy(const EllipticElements& el)
{
    return -0.5 / el.a();
}

PlanePoint position_from_anomaly(const EllipticElements& el, double u)
{
    const double a = el.a();
    const double e = el.e();
    return PlanePoint{{a * (std::cos(u) - e),
                       a * std::sqrt((1.0 - e) * (1.0 + e)) * std::sin(u)}};
}

Vec2 velocity_from_anomaly(const EllipticElements& el, double u)
{
    const double a = el.a();
    const double e = el.e();
    const double r = a * (1.0 - e * std::cos(u));
    const double scale = 1.0 / (std::sqrt(a) * (r / a));
    return {-std::sin(u) * scale, std::sqrt((1.0 - e) * (1.0 + e)) * std::cos(u) * scale};
}

double passing_time_flat(const EllipticElements& el, const AnomalyArc& arc)
{
    const double a = el.a();
    return a * std::sqrt(a)
         * ((arc.u2 - arc.u1) - el.e() * (std::sin(arc.u2) - std::sin(arc.u1)));
}

LagrangeAngles lagrange_angles(const AnomalyArc& arc, double e)
{
    if (!std::isfinite(e) || e < 0.0 || e >= 1.0) {
        throw InvalidArgument("lagrange_angles: eccentricity must lie in [0, 1)");
    }
    const double mid = 0.5 * (arc.u1 + arc.u2);
    return {std::acos(clamp_to_unit(e * std::cos(mid))), 0.5 * (arc.u1 - arc.u2)};
}

double passing_time_lagrange(double a, const LagrangeAngles& angles)
{
    if (!std::isfinite(a) || !(a > 0.0)) {
        throw InvalidArgument("passing_time_lagrange: semi-major axis must be positive");
    }
    return a * std::sqrt(a)
         * (-2.0 * angles.psi + 2.0 * std::sin(angles.psi) * std::cos(angles.phi));
}

ChordSum chord_and_sum(double a, const LagrangeAngles& angles)
{
    if (!std::isfinite(a) || !(a > 0.0)) {
        throw InvalidArgument("chord_and_sum: semi-major axis must be positive");
    }
    const double cp = std::cos(angles.psi);
    const double sp = std::sin(angles.psi);
    return {2.0 * a * (1.0 - cp * std::cos(angles.phi)),
            2.0 * a * std::abs(sp * std::sin(angles.phi))};
}

std::vector<LambertBranch> lambert_branches(double sum, double c, double a)
{
    if (!std::isfinite(sum) || !std::isfinite(c) || !std::isfinite(a) || !(a > 0.0)) {
        throw InvalidArgument("lambert_branches: inputs must be finite with a > 0");
    }
    if (sum <= 0.0 || c < 0.0) {
        throw DegenerateInput("lambert_branches: need sum > 0 and c >= 0");
    }

    const double p = 1.0 - sum / (2.0 * a);  // cos(psi) cos(phi)
    const double k = c / (2.0 * a);          // |sin(psi) sin(phi)|
    if (std::abs(p) + k > 1.0 + 1e-12) {
        throw NoSolution("lambert_branches: no ellipse of this semi-major axis fits");
    }

    const double period = kTwoPi * a * std::sqrt(a);
    std::vector<LambertBranch> branches;
    auto emit = [&](double phi, double psi, int sign) {
        for (const LambertBranch& b : branches) {
            if (std::abs(b.angles.phi - phi) <= 1e-10 && std::abs(b.angles.psi - psi) <= 1e-10) {
                return;
            }
        }
        double transit = passing_time_lagrange(a, {phi, psi});
        transit -= period * std::floor(transit / period);
        if (transit >= period) {
            transit -= period;
        }
        branches.push_back({{phi, psi}, transit, sign, 0});
    };

    for (int sign : {+1, -1}) {
        // cos(psi - phi) = p + s k, cos(psi + phi) = p - s k.
        const double alpha0 = std::acos(clamp_to_unit(p + sign * k));
        const double beta0 = std::acos(clamp_to_unit(p - sign * k));
        for (double alpha_base : {alpha0, -alpha0}) {
            for (double beta_base : {beta0, -beta0}) {
                for (int kk = -1; kk <= 1; ++kk) {
                    for (int mm = -1; mm <= 1; ++mm) {
                        const double alpha = alpha_base + kTwoPi * kk;
                        const double beta = beta_base + kTwoPi * mm;
                        const double phi = 0.5 * (beta - alpha);
                        const double psi = 0.5 * (beta + alpha);
                        if (phi < 0.0 || phi > kPi || psi <= -kPi || psi > kPi) {
                            continue;
                        }
                        emit(phi, psi, sign);
                    }
                }
            }
        }
    }
    return branches;
}

double solve_kepler(double mean_anomaly, double e)
{
    if (!std::isfinite(mean_anomaly) || !std::isfinite(e) || e < 0.0 || e >= 1.0) {
        throw InvalidArgument("solve_kepler: need finite M and e in [0, 1)");
    }
    // Work in the principal interval; the full-turn part transfers verbatim.
    const double turns = mean_anomaly - reduce_angle(mean_anomaly);
    const double m = mean_anomaly - turns;
    double u = m + e * std::sin(m);
    for (int it = 0; it < 50; ++it) {
        const double f = u - e * std::sin(u) - m;
        if (std::abs(f) < 1e-13) {
            return u + turns;
        }
        u -= f / (1.0 - e * std::cos(u));
    }
    throw StepFailure("solve_kepler: Newton iteration did not converge");
}

} // namespace sphkep
