// Radial bump profiles, their closed-form integrals, and low-discrepancy
// sampling utilities for the initial data.
//
// Both the initial density and the phase-space density use the compactly
// supported C^1 bump  B(s) = (1 - s^2)^2 on [0,1).  Its radial moments
// have exact rational values, so every norm of the initial kinetic
// distribution that the decay theory consumes is available in closed form
// (no quadrature, no sampling noise).

#pragma once

#include <cstdint>

namespace nsv {

// B(s) = (1 - s^2)^2 for |s| < 1, else 0.
double bump(double s);

// int_0^1 s^(d-1+m) (1-s^2)^2 ds  =  1/(d+m) - 2/(d+m+2) + 1/(d+m+4).
double bump_radial_integral(int d, int m);

// Surface measure of the unit sphere: 2, 2*pi, 4*pi for d = 1, 2, 3.
double unit_sphere_surface(int d);

// int_{R^d} B(|x|/r) dx = surface(d) * r^d * bump_radial_integral(d, 0).
double bump_mass(int d, double r);

// Radical-inverse (Halton) sequence value for index >= 0 in the given
// prime base; returns a value in [0,1).
double halton(std::uint64_t index, std::uint32_t base);

// Inverse CDF of the radial density  p(s) ~ s^(d-1) B(s)  on [0,1].
// Monotone, exact to ~1e-15 (bisection polished by Newton).
double bump_radius_from_uniform(int d, double u);

// Closed-form norms of f0(x,v) = mass * p_x(x) * p_v(v) with p_x, p_v unit
// bump densities of radii r_x and r_v in dimension d.
struct KineticNorms {
    double mass = 0.0;       // ||f0||_{L1_{x,v}}
    double n_base = 0.0;     // ||f0||_{L1_v(Linf_x)}            = mass / Z_x
    double j_base = 0.0;     // ||(1+|v|)   f0||_{L1_v(Linf_x)}  = n_base (1 + E|v|)
    double e_base = 0.0;     // ||(1+|v|^2) f0||_{L1_v(Linf_x)}  = n_base (1 + E|v|^2)
    double mean_abs_v = 0.0; // E|v| under p_v
    double mean_v2 = 0.0;    // E|v|^2 under p_v
};

KineticNorms kinetic_profile_norms(int dim, double mass, double r_x, double r_v);

}  // namespace nsv
