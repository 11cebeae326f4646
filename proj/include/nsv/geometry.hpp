// Periodic staggered (MAC) grid geometry for the box [0,L)^D.
//
// Layout conventions used throughout the code base:
//   * cells are indexed by integer coordinates iv in [0,N)^D, linearised
//     x-fastest:  lin = iv[0] + N*(iv[1] + N*iv[2]).
//   * cell centres sit at (iv + 1/2) h, h = L/N.
//   * face component a lives on the face between cells iv - e_a and iv,
//     i.e. at position iv*h along axis a and (iv+1/2)*h along the others.
//     Each face component is stored on its own N^D lattice with the same
//     linearisation as the cells.
//
// With that convention the discrete gradient / divergence pair is
//   (G p)_a(iv) = (p(iv) - p(iv - e_a)) / h
//   (D u)(iv)   = sum_a (u_a(iv + e_a) - u_a(iv)) / h
// and D = -G^T holds exactly, which the pressure solver relies on.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace nsv {

// The static_cast keeps the array extent a non-deduced context, so free
// function templates taking Vec<D>/IVec<D> deduce D from another argument
// (e.g. Grid<D>) instead of fighting the int -> size_t mismatch.
template <int D>
using Vec = std::array<double, static_cast<std::size_t>(D)>;

template <int D>
using IVec = std::array<std::int64_t, static_cast<std::size_t>(D)>;

template <int D>
struct Grid {
    static_assert(D >= 1 && D <= 3, "grid supports 1, 2 and 3 dimensions");

    std::int64_t n = 0;   // cells per axis
    double box = 1.0;     // L
    double h = 1.0;       // L / n

    Grid() = default;
    Grid(std::int64_t n_, double box_) : n(n_), box(box_), h(box_ / static_cast<double>(n_)) {}

    std::size_t cells() const {
        std::size_t c = 1;
        for (int a = 0; a < D; ++a) c *= static_cast<std::size_t>(n);
        return c;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < D; ++a) v *= h;
        return v;
    }

    // Strides of the x-fastest linearisation.
    std::size_t stride(int axis) const {
        std::size_t s = 1;
        for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(n);
        return s;
    }

    std::int64_t wrap(std::int64_t i) const {
        // i is expected to stay within one period of the box in practice.
        if (i >= n) i -= n;
        if (i < 0) i += n;
        if (i < 0 || i >= n) { i %= n; if (i < 0) i += n; }
        return i;
    }

    std::size_t index(const IVec<D>& iv) const {
        std::size_t lin = 0;
        for (int a = D - 1; a >= 0; --a) lin = lin * static_cast<std::size_t>(n) + static_cast<std::size_t>(iv[a]);
        return lin;
    }

    IVec<D> coords(std::size_t lin) const {
        IVec<D> iv{};
        for (int a = 0; a < D; ++a) {
            iv[a] = static_cast<std::int64_t>(lin % static_cast<std::size_t>(n));
            lin /= static_cast<std::size_t>(n);
        }
        return iv;
    }

    // Linear index of the periodic neighbour iv +/- e_axis, given the linear
    // index and the per-axis coordinate.  Cheap: one add, one compare.
    std::size_t shift_up(std::size_t lin, int axis, std::int64_t coord) const {
        const std::size_t s = stride(axis);
        return (coord + 1 == n) ? lin + s - s * static_cast<std::size_t>(n) : lin + s;
    }
    std::size_t shift_down(std::size_t lin, int axis, std::int64_t coord) const {
        const std::size_t s = stride(axis);
        return (coord == 0) ? lin + s * static_cast<std::size_t>(n - 1) : lin - s;
    }

    Vec<D> cell_center(const IVec<D>& iv) const {
        Vec<D> x{};
        for (int a = 0; a < D; ++a) x[a] = (static_cast<double>(iv[a]) + 0.5) * h;
        return x;
    }

    // Position of face component `axis` with index iv (offset 0 along axis,
    // 1/2 along the others).
    Vec<D> face_center(int axis, const IVec<D>& iv) const {
        Vec<D> x{};
        for (int a = 0; a < D; ++a) {
            const double off = (a == axis) ? 0.0 : 0.5;
            x[a] = (static_cast<double>(iv[a]) + off) * h;
        }
        return x;
    }

    double wrap_position(double x) const {
        if (x >= box) x -= box;
        if (x < 0.0) x += box;
        if (x >= box || x < 0.0) {
            // fallback for large excursions (not expected in normal stepping)
            x -= box * static_cast<double>(static_cast<std::int64_t>(x / box));
            if (x < 0.0) x += box;
            if (x >= box) x -= box;  // guard against x/box rounding
        }
        return x;
    }
};

// Visit every cell in linear order, calling f(iv, lin).  The nested-loop
// form keeps the index arithmetic out of the hot loops.
template <int D, class F>
inline void for_each_cell(const Grid<D>& g, F&& f) {
    const std::int64_t n = g.n;
    if constexpr (D == 1) {
        std::size_t lin = 0;
        for (std::int64_t i = 0; i < n; ++i, ++lin) f(IVec<1>{i}, lin);
    } else if constexpr (D == 2) {
        std::size_t lin = 0;
        for (std::int64_t j = 0; j < n; ++j)
            for (std::int64_t i = 0; i < n; ++i, ++lin) f(IVec<2>{i, j}, lin);
    } else {
        std::size_t lin = 0;
        for (std::int64_t k = 0; k < n; ++k)
            for (std::int64_t j = 0; j < n; ++j)
                for (std::int64_t i = 0; i < n; ++i, ++lin) f(IVec<3>{i, j, k}, lin);
    }
}

}  // namespace nsv
