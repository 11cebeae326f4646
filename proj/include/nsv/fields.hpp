// Field containers on the staggered grid.  Scalar fields (density,
// pressure, cell moments) are flat vectors over the cell lattice; a face
// field holds one N^D component lattice per axis (see geometry.hpp for the
// face convention).

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nsv/geometry.hpp"

namespace nsv {

using ScalarField = std::vector<double>;

template <int D>
struct FaceField {
    std::array<ScalarField, D> comp;

    FaceField() = default;
    explicit FaceField(const Grid<D>& g) { resize(g); }

    void resize(const Grid<D>& g) {
        for (int a = 0; a < D; ++a) comp[a].assign(g.cells(), 0.0);
    }
    void fill(double v) {
        for (int a = 0; a < D; ++a)
            for (double& x : comp[a]) x = v;
    }
    ScalarField& operator[](int a) { return comp[a]; }
    const ScalarField& operator[](int a) const { return comp[a]; }
};

template <int D>
inline void ff_copy(const FaceField<D>& src, FaceField<D>& dst) {
    for (int a = 0; a < D; ++a) dst[a] = src[a];
}

// dst = x + alpha*y
template <int D>
inline void ff_axpy(FaceField<D>& x, double alpha, const FaceField<D>& y) {
    for (int a = 0; a < D; ++a) {
        double* px = x[a].data();
        const double* py = y[a].data();
        const std::size_t m = x[a].size();
        for (std::size_t i = 0; i < m; ++i) px[i] += alpha * py[i];
    }
}

template <int D>
inline void ff_scale(FaceField<D>& x, double alpha) {
    for (int a = 0; a < D; ++a)
        for (double& v : x[a]) v *= alpha;
}

// Euclidean inner product over all face unknowns, accumulated in a fixed
// serial order so results are independent of the thread count.
template <int D>
inline double ff_dot(const FaceField<D>& x, const FaceField<D>& y) {
    double s = 0.0;
    for (int a = 0; a < D; ++a) {
        const double* px = x[a].data();
        const double* py = y[a].data();
        const std::size_t m = x[a].size();
        for (std::size_t i = 0; i < m; ++i) s += px[i] * py[i];
    }
    return s;
}

template <int D>
inline double ff_norm2(const FaceField<D>& x) {
    return std::sqrt(ff_dot(x, x));
}

template <int D>
inline double ff_max_abs(const FaceField<D>& x) {
    double m = 0.0;
    for (int a = 0; a < D; ++a)
        for (double v : x[a]) {
            const double av = std::fabs(v);
            if (av > m) m = av;
        }
    return m;
}

// Velocity averaged from faces to the cell centre:
//   ubar_a(iv) = (u_a(iv) + u_a(iv + e_a)) / 2.
template <int D>
inline Vec<D> cell_avg_velocity(const Grid<D>& g, const FaceField<D>& u, const IVec<D>& iv,
                                std::size_t lin) {
    Vec<D> ub{};
    for (int a = 0; a < D; ++a) {
        const std::size_t up = g.shift_up(lin, a, iv[a]);
        ub[a] = 0.5 * (u[a][lin] + u[a][up]);
    }
    return ub;
}

// Density averaged from cells to the face (arithmetic mean of the two
// adjacent cells): rho_face_a(iv) = (rho(iv - e_a) + rho(iv)) / 2.
template <int D>
inline double face_avg_density(const Grid<D>& g, const ScalarField& rho, int a, const IVec<D>& iv,
                               std::size_t lin) {
    const std::size_t dn = g.shift_down(lin, a, iv[a]);
    return 0.5 * (rho[dn] + rho[lin]);
}

// Discrete divergence (D u)(iv) = sum_a (u_a(iv+e_a) - u_a(iv)) / h.
template <int D>
inline void divergence(const Grid<D>& g, const FaceField<D>& u, ScalarField& out) {
    out.assign(g.cells(), 0.0);
    const double inv_h = 1.0 / g.h;
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        double d = 0.0;
        for (int a = 0; a < D; ++a) {
            const std::size_t up = g.shift_up(lin, a, iv[a]);
            d += u[a][up] - u[a][lin];
        }
        out[lin] = d * inv_h;
    });
}

// Discrete gradient (G p)_a(iv) = (p(iv) - p(iv - e_a)) / h.
template <int D>
inline void gradient(const Grid<D>& g, const ScalarField& p, FaceField<D>& out) {
    out.resize(g);
    const double inv_h = 1.0 / g.h;
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        for (int a = 0; a < D; ++a) {
            const std::size_t dn = g.shift_down(lin, a, iv[a]);
            out[a][lin] = (p[lin] - p[dn]) * inv_h;
        }
    });
}

// Standard 2D+1 point Laplacian acting on one face-component lattice
// (periodic): (L f)(iv) = sum_a (f(iv+e_a) - 2 f(iv) + f(iv-e_a)) / h^2.
template <int D>
inline void laplacian(const Grid<D>& g, const ScalarField& f, ScalarField& out) {
    out.assign(g.cells(), 0.0);
    const double inv_h2 = 1.0 / (g.h * g.h);
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        double acc = -2.0 * static_cast<double>(D) * f[lin];
        for (int a = 0; a < D; ++a) {
            acc += f[g.shift_up(lin, a, iv[a])] + f[g.shift_down(lin, a, iv[a])];
        }
        out[lin] = acc * inv_h2;
    });
}

}  // namespace nsv
