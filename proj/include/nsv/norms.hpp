// Discrete norms on the staggered grid.  All sums run in a fixed serial
// order (linear index, then axis), so values are reproducible bit-for-bit
// regardless of the thread count.

#pragma once

#include <cmath>
#include <string>

#include "nsv/error.hpp"
#include "nsv/fields.hpp"
#include "nsv/geometry.hpp"

namespace nsv {

inline void check_finite_value(double v, const std::string& what) {
    if (!std::isfinite(v)) fail_numerics("non-finite value in " + what);
}

inline void check_finite(const ScalarField& f, const std::string& what) {
    for (double v : f)
        if (!std::isfinite(v)) fail_numerics("non-finite value in field " + what);
}

template <int D>
inline void check_finite(const FaceField<D>& f, const std::string& what) {
    for (int a = 0; a < D; ++a) check_finite(f[a], what + "[" + std::to_string(a) + "]");
}

// (sum |f|^p h^d)^(1/p)
template <int D>
inline double cell_lp_norm(const Grid<D>& g, const ScalarField& f, double p) {
    double s = 0.0;
    for (double v : f) s += std::pow(std::fabs(v), p);
    return std::pow(s * g.cell_volume(), 1.0 / p);
}

template <int D>
inline double cell_l2_norm(const Grid<D>& g, const ScalarField& f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s * g.cell_volume());
}

inline double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f) {
        const double av = std::fabs(v);
        if (av > m) m = av;
    }
    return m;
}

// L^2 norm of a face field with the natural h^d weight per face value.
template <int D>
inline double face_l2_norm(const Grid<D>& g, const FaceField<D>& u) {
    double s = 0.0;
    for (int a = 0; a < D; ++a)
        for (double v : u[a]) s += v * v;
    return std::sqrt(s * g.cell_volume());
}

// Max over cells of the Euclidean magnitude of the face-averaged velocity.
template <int D>
inline double velocity_max_magnitude(const Grid<D>& g, const FaceField<D>& u) {
    double m2 = 0.0;
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        const Vec<D> ub = cell_avg_velocity(g, u, iv, lin);
        double s = 0.0;
        for (int a = 0; a < D; ++a) s += ub[a] * ub[a];
        if (s > m2) m2 = s;
    });
    return std::sqrt(m2);
}

// || grad rho ||_{L^2}: one-sided periodic differences of the cell field.
template <int D>
inline double cell_gradient_l2(const Grid<D>& g, const ScalarField& f) {
    double s = 0.0;
    const double inv_h = 1.0 / g.h;
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        for (int a = 0; a < D; ++a) {
            const double d = (f[lin] - f[g.shift_down(lin, a, iv[a])]) * inv_h;
            s += d * d;
        }
    });
    return std::sqrt(s * g.cell_volume());
}

}  // namespace nsv
