// Particle phase-space representation and grid transfer.
//
// The distribution function is carried by weighted markers (x_p, v_p, w_p)
// with constant weights (the drag force is divergence-free in v after the
// exponential substitution, so marker weights never change).  Transfer
// between particles and the staggered grid uses the tensor-product linear
// (cloud-in-cell) kernel.  The same kernel routine serves every target
// lattice via its per-axis offset:
//   * cell centres   (offset 1/2 in every axis) for the diagnostic moments,
//   * face lattices  (offset 0 along the face axis) for velocity
//     interpolation and for the drag fields entering the implicit solver.
// Using one kernel per lattice for both deposit and interpolation makes
// the pair adjoint, which is what keeps the discrete drag exchange
// momentum-consistent.
//
// Determinism: deposits run serially in particle order; interpolation and
// the push are pure per-particle maps with preallocated output slots and
// may run on any number of threads without changing a single bit.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nsv/error.hpp"
#include "nsv/fields.hpp"
#include "nsv/geometry.hpp"
#include "nsv/threading.hpp"

namespace nsv {

template <int D>
struct ParticleEnsemble {
    std::vector<Vec<D>> x;
    std::vector<Vec<D>> v;
    std::vector<double> w;

    std::size_t size() const { return w.size(); }
    bool empty() const { return w.empty(); }
    double total_mass() const {
        double s = 0.0;
        for (double wi : w) s += wi;
        return s;
    }
};

// Cell-centred kinetic moments (diagnostics and ceiling checks):
//   n = sum w W / h^d,  j_a = sum w v_a W / h^d,  e = sum w |v|^2/2 W / h^d.
template <int D>
struct MomentFields {
    ScalarField n;
    std::array<ScalarField, D> j;
    ScalarField e;
};

// Drag fields on the face lattices (same kernels as the velocity
// interpolation; see the header comment).
template <int D>
struct FaceMoments {
    FaceField<D> n;
    FaceField<D> j;
};

// ---------------------------------------------------------------------------
// CIC kernel
// ---------------------------------------------------------------------------

template <int D>
struct CicStencil {
    std::array<std::int64_t, D> base;  // wrapped lower node per axis
    std::array<double, D> frac;        // weight of the upper node per axis
};

template <int D>
inline CicStencil<D> cic_stencil(const Grid<D>& g, const Vec<D>& x, int face_axis /* -1 = cell lattice */) {
    CicStencil<D> st;
    for (int a = 0; a < D; ++a) {
        const double off = (a == face_axis) ? 0.0 : 0.5;
        const double s = x[a] / g.h - off;
        const double fl = std::floor(s);
        std::int64_t i0 = static_cast<std::int64_t>(fl);
        double fr = s - fl;
        i0 %= g.n;
        if (i0 < 0) i0 += g.n;
        st.base[a] = i0;
        st.frac[a] = fr;
    }
    return st;
}

// Calls f(linear_index, weight) for each of the 2^D nodes of the stencil.
template <int D, class F>
inline void cic_visit(const Grid<D>& g, const CicStencil<D>& st, F&& f) {
    const std::int64_t n = g.n;
    std::array<std::int64_t, D> hi;
    for (int a = 0; a < D; ++a) {
        hi[a] = st.base[a] + 1;
        if (hi[a] == n) hi[a] = 0;
    }
    if constexpr (D == 1) {
        f(static_cast<std::size_t>(st.base[0]), 1.0 - st.frac[0]);
        f(static_cast<std::size_t>(hi[0]), st.frac[0]);
    } else if constexpr (D == 2) {
        const std::size_t sn = static_cast<std::size_t>(n);
        const double fx = st.frac[0], fy = st.frac[1];
        const std::size_t x0 = static_cast<std::size_t>(st.base[0]), x1 = static_cast<std::size_t>(hi[0]);
        const std::size_t y0 = static_cast<std::size_t>(st.base[1]) * sn, y1 = static_cast<std::size_t>(hi[1]) * sn;
        f(x0 + y0, (1.0 - fx) * (1.0 - fy));
        f(x1 + y0, fx * (1.0 - fy));
        f(x0 + y1, (1.0 - fx) * fy);
        f(x1 + y1, fx * fy);
    } else {
        const std::size_t sn = static_cast<std::size_t>(n);
        const double fx = st.frac[0], fy = st.frac[1], fz = st.frac[2];
        const std::size_t x0 = static_cast<std::size_t>(st.base[0]), x1 = static_cast<std::size_t>(hi[0]);
        const std::size_t y0 = static_cast<std::size_t>(st.base[1]) * sn, y1 = static_cast<std::size_t>(hi[1]) * sn;
        const std::size_t z0 = static_cast<std::size_t>(st.base[2]) * sn * sn,
                          z1 = static_cast<std::size_t>(hi[2]) * sn * sn;
        f(x0 + y0 + z0, (1.0 - fx) * (1.0 - fy) * (1.0 - fz));
        f(x1 + y0 + z0, fx * (1.0 - fy) * (1.0 - fz));
        f(x0 + y1 + z0, (1.0 - fx) * fy * (1.0 - fz));
        f(x1 + y1 + z0, fx * fy * (1.0 - fz));
        f(x0 + y0 + z1, (1.0 - fx) * (1.0 - fy) * fz);
        f(x1 + y0 + z1, fx * (1.0 - fy) * fz);
        f(x0 + y1 + z1, (1.0 - fx) * fy * fz);
        f(x1 + y1 + z1, fx * fy * fz);
    }
}

// ---------------------------------------------------------------------------
// Interpolation and push
// ---------------------------------------------------------------------------

// Samples the staggered velocity at an arbitrary position (component a from
// its own face lattice).
template <int D>
inline Vec<D> sample_velocity(const Grid<D>& g, const FaceField<D>& u, const Vec<D>& x) {
    Vec<D> out{};
    for (int a = 0; a < D; ++a) {
        const CicStencil<D> st = cic_stencil(g, x, a);
        double acc = 0.0;
        cic_visit(g, st, [&](std::size_t lin, double wgt) { acc += wgt * u[a][lin]; });
        out[a] = acc;
    }
    return out;
}

// u_at[p] = u(x_p) for every marker; thread-parallel pure map.
template <int D>
inline void interpolate_velocity(const Grid<D>& g, const FaceField<D>& u, const std::vector<Vec<D>>& pos,
                                 std::vector<Vec<D>>& u_at) {
    u_at.resize(pos.size());
    parallel_for_particles(pos.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) u_at[p] = sample_velocity(g, u, pos[p]);
    });
}

// Exact exponential integrator for the drag kinematics over one step with
// the fluid velocity frozen at u_p = u(x_p):
//   v' = u_p + (v - u_p) exp(-kappa dt)
//   x' = x + u_p dt + (v - u_p) (1 - exp(-kappa dt)) / kappa
// expm1 keeps the update accurate for kappa*dt from 1e-6 up to 1e3.
template <int D>
inline void push_markers(const Grid<D>& g, std::vector<Vec<D>>& xs, std::vector<Vec<D>>& vs,
                         const std::vector<Vec<D>>& u_at, double kappa, double dt) {
    const double z = kappa * dt;
    const double em1 = -std::expm1(-z);            // 1 - exp(-kappa dt), accurate for small z
    const double decay = 1.0 - em1;                // exp(-kappa dt)
    const double drift = (kappa > 0.0) ? em1 / kappa : dt;
    parallel_for_particles(xs.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const Vec<D>& up = u_at[p];
            for (int a = 0; a < D; ++a) {
                const double rel = vs[p][a] - up[a];
                xs[p][a] = g.wrap_position(xs[p][a] + up[a] * dt + rel * drift);
                vs[p][a] = up[a] + rel * decay;
            }
        }
    });
}

template <int D>
inline void push_particles(const Grid<D>& g, ParticleEnsemble<D>& ens, const std::vector<Vec<D>>& u_at, double kappa,
                           double dt) {
    push_markers(g, ens.x, ens.v, u_at, kappa, dt);
}

// ---------------------------------------------------------------------------
// Deposits (serial, particle order)
// ---------------------------------------------------------------------------

template <int D>
inline MomentFields<D> deposit_moments(const Grid<D>& g, const ParticleEnsemble<D>& ens) {
    MomentFields<D> m;
    m.n.assign(g.cells(), 0.0);
    m.e.assign(g.cells(), 0.0);
    for (int a = 0; a < D; ++a) m.j[a].assign(g.cells(), 0.0);
    const double inv_vol = 1.0 / g.cell_volume();
    for (std::size_t p = 0; p < ens.size(); ++p) {
        const CicStencil<D> st = cic_stencil(g, ens.x[p], -1);
        const double wp = ens.w[p] * inv_vol;
        double v2 = 0.0;
        for (int a = 0; a < D; ++a) v2 += ens.v[p][a] * ens.v[p][a];
        cic_visit(g, st, [&](std::size_t lin, double wgt) {
            const double c = wp * wgt;
            m.n[lin] += c;
            for (int a = 0; a < D; ++a) m.j[a][lin] += c * ens.v[p][a];
            m.e[lin] += 0.5 * c * v2;
        });
    }
    return m;
}

template <int D>
inline FaceMoments<D> deposit_face_drag(const Grid<D>& g, const ParticleEnsemble<D>& ens) {
    FaceMoments<D> fm;
    fm.n.resize(g);
    fm.j.resize(g);
    const double inv_vol = 1.0 / g.cell_volume();
    for (std::size_t p = 0; p < ens.size(); ++p) {
        const double wp = ens.w[p] * inv_vol;
        for (int a = 0; a < D; ++a) {
            const CicStencil<D> st = cic_stencil(g, ens.x[p], a);
            const double va = ens.v[p][a];
            cic_visit(g, st, [&](std::size_t lin, double wgt) {
                fm.n[a][lin] += wp * wgt;
                fm.j[a][lin] += wp * wgt * va;
            });
        }
    }
    return fm;
}

// Largest marker speed; 0 for an empty ensemble.
template <int D>
inline double support_radius(const ParticleEnsemble<D>& ens) {
    double m2 = 0.0;
    for (std::size_t p = 0; p < ens.size(); ++p) {
        double s = 0.0;
        for (int a = 0; a < D; ++a) s += ens.v[p][a] * ens.v[p][a];
        if (s > m2) m2 = s;
    }
    return std::sqrt(m2);
}

// ---------------------------------------------------------------------------
// Snapshots: "NSVP" magic, u32 version, u64 count, then per marker
// x[0..D), v[0..D), w as little-endian f64.
// ---------------------------------------------------------------------------

void write_snapshot_bytes(const std::string& path, const std::vector<double>& payload, std::uint64_t count);
std::vector<double> read_snapshot_bytes(const std::string& path, std::uint64_t& count_out);

template <int D>
inline void write_snapshot(const std::string& path, const ParticleEnsemble<D>& ens) {
    static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");
    std::vector<double> payload;
    payload.reserve(ens.size() * (2 * D + 1));
    for (std::size_t p = 0; p < ens.size(); ++p) {
        for (int a = 0; a < D; ++a) payload.push_back(ens.x[p][a]);
        for (int a = 0; a < D; ++a) payload.push_back(ens.v[p][a]);
        payload.push_back(ens.w[p]);
    }
    write_snapshot_bytes(path, payload, ens.size());
}

template <int D>
inline ParticleEnsemble<D> read_snapshot(const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "snapshot reader assumes a little-endian host");
    std::uint64_t count = 0;
    const std::vector<double> payload = read_snapshot_bytes(path, count);
    if (payload.size() != count * (2 * D + 1))
        fail_io("snapshot " + path + " does not hold " + std::to_string(2 * D + 1) + " doubles per marker");
    ParticleEnsemble<D> ens;
    ens.x.resize(count);
    ens.v.resize(count);
    ens.w.resize(count);
    std::size_t i = 0;
    for (std::uint64_t p = 0; p < count; ++p) {
        for (int a = 0; a < D; ++a) ens.x[p][a] = payload[i++];
        for (int a = 0; a < D; ++a) ens.v[p][a] = payload[i++];
        ens.w[p] = payload[i++];
    }
    return ens;
}

}  // namespace nsv
