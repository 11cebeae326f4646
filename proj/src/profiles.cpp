#include "nsv/profiles.hpp"

#include <cmath>

#include "nsv/error.hpp"

namespace nsv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double bump(double s) {
    const double a = std::fabs(s);
    if (a >= 1.0) return 0.0;
    const double t = 1.0 - a * a;
    return t * t;
}

double bump_radial_integral(int d, int m) {
    const double a = static_cast<double>(d + m);
    return 1.0 / a - 2.0 / (a + 2.0) + 1.0 / (a + 4.0);
}

double unit_sphere_surface(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        default: fail_config("unsupported dimension " + std::to_string(d));
    }
}

double bump_mass(int d, double r) {
    return unit_sphere_surface(d) * std::pow(r, d) * bump_radial_integral(d, 0);
}

double halton(std::uint64_t index, std::uint32_t base) {
    double f = 1.0;
    double r = 0.0;
    std::uint64_t i = index;
    const double inv_b = 1.0 / static_cast<double>(base);
    while (i > 0) {
        f *= inv_b;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// CDF of p(s) ~ s^(d-1)(1-s^2)^2: F(s) = P_d(s) / P_d(1) with
//   P_d(s) = s^d/d - 2 s^(d+2)/(d+2) + s^(d+4)/(d+4).
static double radial_cdf(int d, double s) {
    const double dd = static_cast<double>(d);
    const double num = std::pow(s, dd) / dd - 2.0 * std::pow(s, dd + 2.0) / (dd + 2.0) +
                       std::pow(s, dd + 4.0) / (dd + 4.0);
    return num / bump_radial_integral(d, 0);
}

static double radial_pdf(int d, double s) {
    return std::pow(s, static_cast<double>(d - 1)) * bump(s) / bump_radial_integral(d, 0);
}

double bump_radius_from_uniform(int d, double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    double s = 0.5;
    // Bisection to bracket tightly, then a few Newton polishing steps.
    for (int it = 0; it < 60; ++it) {
        const double f = radial_cdf(d, s) - u;
        if (f > 0.0) hi = s;
        else lo = s;
        s = 0.5 * (lo + hi);
        if (hi - lo < 1e-13) break;
    }
    for (int it = 0; it < 4; ++it) {
        const double p = radial_pdf(d, s);
        if (p <= 0.0) break;
        double step = (radial_cdf(d, s) - u) / p;
        double sn = s - step;
        if (sn <= lo || sn >= hi) break;  // keep the bisection bracket authoritative
        s = sn;
    }
    return s;
}

KineticNorms kinetic_profile_norms(int dim, double mass, double r_x, double r_v) {
    KineticNorms k;
    k.mass = mass;
    if (mass <= 0.0) return k;
    const double zx = bump_mass(dim, r_x);
    const double i0 = bump_radial_integral(dim, 0);
    k.mean_abs_v = r_v * bump_radial_integral(dim, 1) / i0;
    k.mean_v2 = r_v * r_v * bump_radial_integral(dim, 2) / i0;
    k.n_base = mass / zx;
    k.j_base = k.n_base * (1.0 + k.mean_abs_v);
    k.e_base = k.n_base * (1.0 + k.mean_v2);
    return k;
}

}  // namespace nsv
