// Fluid stages: conservative density advection, mass-consistent momentum
// transport, and the implicit coupled momentum/pressure solve.
//
// Density uses first-order donor-cell upwinding in flux form, so the total
// fluid mass changes only by floating-point roundoff and - because the
// advecting field is discretely divergence-free - each update is a convex
// combination of neighbouring values (max principle, L^p contraction).
//
// Momentum is transported through face-centred control volumes whose
// advecting fluxes are averages of the adjacent cell mass fluxes.  That
// makes the pair (mass, momentum) consistent: a uniform velocity field
// stays exactly uniform, and the transported kinetic energy cannot
// increase (upwind donors + CFL <= 1 give a convex combination).
//
// The implicit step solves the vacuum-degenerate system
//     (c I - mu Lap) u' + G P = b,   -G^T u' = 0,
// with the nonnegative face coefficient c assembled from rho'/dt and the
// deposited drag density.  No density floor is used anywhere: where c = 0
// the operator degenerates to the (still SPD on mean-zero fields) viscous
// part.  The constraint is enforced by working in the divergence-free
// subspace: every operator application is followed by the exact spectral
// Leray projection, and the Krylov method is MINRES preconditioned with a
// constant-coefficient Helmholtz inverse (scalar per Fourier mode, hence
// commuting with the projection and SPD on the subspace).  The projected
// residual norm decreases monotonically by construction; convergence is
// declared only after the *unpreconditioned* momentum residual, with the
// recovered pressure gradient included, passes the requested relative
// tolerance in real space.

#pragma once

#include <string>
#include <vector>

#include "nsv/error.hpp"
#include "nsv/fields.hpp"
#include "nsv/geometry.hpp"
#include "nsv/io_util.hpp"
#include "nsv/norms.hpp"
#include "nsv/spectral.hpp"

namespace nsv {

// ---------------------------------------------------------------------------
// Advection
// ---------------------------------------------------------------------------

// Donor-cell mass flux per face: F_a(iv) = u_a(iv) * rho(donor cell).
template <int D>
inline FaceField<D> compute_mass_fluxes(const Grid<D>& g, const ScalarField& rho, const FaceField<D>& u) {
    FaceField<D> f(g);
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        for (int a = 0; a < D; ++a) {
            const double ua = u[a][lin];
            const std::size_t dn = g.shift_down(lin, a, iv[a]);
            f[a][lin] = ua * (ua >= 0.0 ? rho[dn] : rho[lin]);
        }
    });
    return f;
}

// Largest cell Courant number sum_a max(|u_a(iv)|, |u_a(iv+e_a)|) dt / h.
template <int D>
inline double max_courant(const Grid<D>& g, const FaceField<D>& u, double dt) {
    double worst = 0.0;
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        double s = 0.0;
        for (int a = 0; a < D; ++a) {
            const double lo = std::fabs(u[a][lin]);
            const double hi = std::fabs(u[a][g.shift_up(lin, a, iv[a])]);
            s += lo > hi ? lo : hi;
        }
        if (s > worst) worst = s;
    });
    return worst * dt / g.h;
}

// rho'(iv) = rho(iv) - (dt/h) sum_a (F_a(iv+e_a) - F_a(iv)).
// Throws when the advective CFL condition fails (reporting the worst cell
// Courant number), since the max principle is lost beyond CFL = 1.
template <int D>
inline ScalarField advect_density(const Grid<D>& g, const ScalarField& rho, const FaceField<D>& u,
                                  const FaceField<D>& fluxes, double dt, double* courant_out = nullptr) {
    const double courant = max_courant(g, u, dt);
    if (courant_out) *courant_out = courant;
    if (courant > 1.0 + 1e-12)
        fail_numerics("advective CFL violated: max cell Courant number " + format_double(courant) + " exceeds 1");
    ScalarField out(g.cells());
    const double lam = dt / g.h;
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        double div = 0.0;
        for (int a = 0; a < D; ++a) div += fluxes[a][g.shift_up(lin, a, iv[a])] - fluxes[a][lin];
        out[lin] = rho[lin] - lam * div;
    });
    return out;
}

template <int D>
inline ScalarField advect_density(const Grid<D>& g, const ScalarField& rho, const FaceField<D>& u, double dt) {
    return advect_density(g, rho, u, compute_mass_fluxes(g, rho, u), dt);
}

// Transported face momentum.  The control volume of face (a, iv) straddles
// cells iv-e_a and iv; the advecting flux across its lower-b facet is the
// average of the corresponding cell fluxes,
//     G_b(iv) = (F_b(iv) + F_b(iv - e_a)) / 2   (all b, including b = a),
// and the transported quantity is upwinded by the sign of G_b.  With
// rho_face = (rho(iv-e_a)+rho(iv))/2 this is exactly the face average of
// the density update, so mass and momentum see the same transport and a
// uniform velocity is preserved to roundoff.  In vacuum (all neighbouring
// densities zero) every term vanishes and mtilde = 0 identically.
template <int D>
inline FaceField<D> transport_momentum(const Grid<D>& g, const ScalarField& rho, const FaceField<D>& u,
                                       const FaceField<D>& fluxes, double dt) {
    FaceField<D> mt(g);
    const double lam = dt / g.h;
    for (int a = 0; a < D; ++a) {
        for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
            const std::size_t dn_a = g.shift_down(lin, a, iv[a]);
            double acc = 0.5 * (rho[dn_a] + rho[lin]) * u[a][lin];
            for (int b = 0; b < D; ++b) {
                // Lower facet flux and donor value.
                const std::size_t dn_b = g.shift_down(lin, b, iv[b]);
                const double g_lo = 0.5 * (fluxes[b][lin] + fluxes[b][dn_a]);
                const double phi_lo = g_lo * (g_lo >= 0.0 ? u[a][dn_b] : u[a][lin]);
                // Upper facet flux and donor value.  For b == a the upper
                // facet of the control volume sits at the centre of cell iv,
                // so the shifted flux index folds back onto lin.
                const std::size_t up_b = g.shift_up(lin, b, iv[b]);
                const std::size_t up_ab = (b == a) ? lin : g.shift_up(dn_a, b, iv[b]);
                const double g_hi = 0.5 * (fluxes[b][up_b] + fluxes[b][up_ab]);
                const double phi_hi = g_hi * (g_hi >= 0.0 ? u[a][lin] : u[a][up_b]);
                acc -= lam * (phi_hi - phi_lo);
            }
            mt[a][lin] = acc;
        });
    }
    return mt;
}

// ---------------------------------------------------------------------------
// Implicit momentum / pressure solve
// ---------------------------------------------------------------------------

template <int D>
struct StokesSystem {
    double mu = 0.0;
    FaceField<D> c;  // nonnegative face coefficient (rho'/dt averaged to faces + kappa * drag density)
    FaceField<D> b;  // right-hand side (transported momentum / dt + kappa * drag current)
};

template <int D>
struct StokesResult {
    FaceField<D> u;
    ScalarField p;
    int iterations = 0;
    double residual = 0.0;               // final relative momentum residual (2-norm, pressure included)
    double div_max = 0.0;                // max |div u| after the solve
    std::vector<double> residual_history;  // preconditioned residual norm per iteration (monotone)
};

struct StokesOptions {
    int max_iters = 400;
    bool skip_projection = false;  // fault-injection hook: drop the constraint
};

namespace detail {

// y = (c o x) - mu * Lap x, componentwise on the face lattices.
template <int D>
inline void apply_momentum_operator(const Grid<D>& g, const StokesSystem<D>& sys, const FaceField<D>& x,
                                    FaceField<D>& y) {
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double mu = sys.mu;
    for (int a = 0; a < D; ++a) {
        const ScalarField& xa = x[a];
        const ScalarField& ca = sys.c[a];
        ScalarField& ya = y[a];
        for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
            double lap = -2.0 * static_cast<double>(D) * xa[lin];
            for (int b = 0; b < D; ++b) lap += xa[g.shift_up(lin, b, iv[b])] + xa[g.shift_down(lin, b, iv[b])];
            ya[lin] = ca[lin] * xa[lin] - mu * lap * inv_h2;
        });
    }
}

}  // namespace detail

// Preconditioned MINRES on the Leray-projected momentum operator.  See the
// header comment for the method; the returned pressure is recovered
// spectrally from the final unprojected residual and has zero mean.
template <int D>
StokesResult<D> stokes_drag_solve(const Grid<D>& g, Spectral<D>& spec, const StokesSystem<D>& sys, double eps_lin,
                                  double eps_div, const FaceField<D>* warm_start = nullptr,
                                  const StokesOptions& opts = {}) {
    check_finite(sys.b, "stokes rhs");
    check_finite(sys.c, "stokes coefficient");
    for (int a = 0; a < D; ++a)
        for (double cv : sys.c[a])
            if (cv < 0.0) fail_numerics("stokes coefficient must be nonnegative (got " + format_double(cv) + ")");

    StokesResult<D> res;
    res.u.resize(g);
    res.p.assign(g.cells(), 0.0);

    const double bnorm = ff_norm2(sys.b);
    if (bnorm == 0.0) {
        // Zero data: the unique finite-energy solution is u = 0, P = 0.
        return res;
    }

    // Mean face coefficient drives the constant-coefficient preconditioner.
    double csum = 0.0;
    std::size_t ccount = 0;
    for (int a = 0; a < D; ++a) {
        for (double cv : sys.c[a]) csum += cv;
        ccount += sys.c[a].size();
    }
    const double cbar = csum / static_cast<double>(ccount);

    const bool project = !opts.skip_projection;

    auto apply_op = [&](const FaceField<D>& x, FaceField<D>& y) {
        detail::apply_momentum_operator(g, sys, x, y);
        if (project) spec.leray_project(y);
    };

    // Projected right-hand side and (projected) warm start.
    FaceField<D> b_p = sys.b;
    if (project) spec.leray_project(b_p);
    FaceField<D> x(g);
    if (warm_start) {
        x = *warm_start;
        if (project) spec.leray_project(x);
    }

    // MINRES (Paige & Saunders), preconditioner M^{-1} = (cbar - mu Lap)^{-1}.
    FaceField<D> r1(g), r2(g), y(g), v(g), w(g), w1(g), w2(g), scratch(g);

    apply_op(x, scratch);
    r1 = b_p;
    ff_axpy(r1, -1.0, scratch);
    spec.helmholtz_inverse(y, r1, cbar, sys.mu);
    double beta1 = ff_dot(r1, y);
    if (beta1 < 0.0) fail_solver("stokes preconditioner lost positive definiteness");
    beta1 = std::sqrt(beta1);

    const double rel_target = eps_lin * bnorm;
    int itn = 0;

    if (beta1 > 0.0) {
        double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
        double cs = -1.0, sn = 0.0, oldeps = 0.0;
        r2 = r1;
        w.fill(0.0);
        w1.fill(0.0);
        w2.fill(0.0);

        bool converged = false;
        while (itn < opts.max_iters) {
            ++itn;
            const double s = 1.0 / beta;
            v = y;
            ff_scale(v, s);
            apply_op(v, y);
            if (itn >= 2) ff_axpy(y, -beta / oldb, r1);
            const double alfa = ff_dot(v, y);
            ff_axpy(y, -alfa / beta, r2);
            r1 = r2;
            r2 = y;
            spec.helmholtz_inverse(y, r2, cbar, sys.mu);
            oldb = beta;
            double beta2 = ff_dot(r2, y);
            if (beta2 < 0.0) {
                if (beta2 > -1e-28 * beta1 * beta1) beta2 = 0.0;
                else fail_solver("stokes preconditioner lost positive definiteness during iteration");
            }
            beta = std::sqrt(beta2);

            oldeps = epsln;
            const double delta = cs * dbar + sn * alfa;
            const double gbar = sn * dbar - cs * alfa;
            epsln = sn * beta;
            dbar = -cs * beta;
            double gamma = std::sqrt(gbar * gbar + beta * beta);
            if (gamma < 1e-300) gamma = 1e-300;
            cs = gbar / gamma;
            sn = beta / gamma;
            const double phi = cs * phibar;
            phibar = sn * phibar;

            // x <- x + (phi/gamma) * (v - oldeps*w1 - delta*w2)
            w1 = w2;
            w2 = w;
            w = v;
            ff_axpy(w, -oldeps, w1);
            ff_axpy(w, -delta, w2);
            ff_scale(w, 1.0 / gamma);
            ff_axpy(x, phi, w);

            res.residual_history.push_back(phibar);

            // The preconditioned residual norm phibar is monotone but lives
            // in the M^{-1} inner product; declare victory only on the true
            // 2-norm residual of the projected system.
            if (phibar <= rel_target || itn % 8 == 0 || itn == opts.max_iters || beta == 0.0) {
                apply_op(x, scratch);
                FaceField<D> rt = b_p;
                ff_axpy(rt, -1.0, scratch);
                if (ff_norm2(rt) <= rel_target) {
                    converged = true;
                    break;
                }
            }
            if (beta == 0.0) break;
        }
        if (!converged) {
            apply_op(x, scratch);
            FaceField<D> rt = b_p;
            ff_axpy(rt, -1.0, scratch);
            fail_solver("stokes solve did not reach tolerance " + format_double(eps_lin) + " within " +
                        std::to_string(opts.max_iters) + " iterations (relative residual " +
                        format_double(ff_norm2(rt) / bnorm) + ")");
        }
    }

    if (project) spec.leray_project(x);  // strip accumulated roundoff outside the subspace

    // Pressure from the unprojected residual: G p ~ b - A u in least squares.
    detail::apply_momentum_operator(g, sys, x, scratch);
    FaceField<D> resid = sys.b;
    ff_axpy(resid, -1.0, scratch);
    res.p = spec.pressure_from_residual(resid);

    // Final reported residual includes the pressure gradient.
    FaceField<D> gp(g);
    gradient(g, res.p, gp);
    ff_axpy(resid, -1.0, gp);
    res.residual = ff_norm2(resid) / bnorm;
    res.u = x;
    res.iterations = itn;

    ScalarField div;
    divergence(g, res.u, div);
    res.div_max = max_abs(div);
    if (res.div_max > eps_div)
        fail_solver("velocity divergence " + format_double(res.div_max) + " exceeds tolerance " +
                    format_double(eps_div) + " after the implicit solve");
    if (res.residual > eps_lin)
        fail_solver("momentum residual " + format_double(res.residual) + " exceeds tolerance " +
                    format_double(eps_lin) + " after pressure recovery");
    return res;
}

// ---------------------------------------------------------------------------
// Velocity gradient norms
// ---------------------------------------------------------------------------

struct GradientNorms {
    double l2 = 0.0;    // || grad u ||_{L^2}
    double linf = 0.0;  // max over components and points of |d_b u_a|
};

// d_a u_a lives at cell centres, d_b u_a (b != a) at edge nodes; each of
// the D^2 components is an N^D lattice, giving the full discrete gradient.
template <int D>
inline GradientNorms velocity_gradient_norms(const Grid<D>& g, const FaceField<D>& u) {
    check_finite(u, "velocity");
    GradientNorms out;
    double sum = 0.0;
    const double inv_h = 1.0 / g.h;
    for (int a = 0; a < D; ++a) {
        for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
            for (int b = 0; b < D; ++b) {
                double d;
                if (b == a) {
                    d = (u[a][g.shift_up(lin, a, iv[a])] - u[a][lin]) * inv_h;
                } else {
                    d = (u[a][lin] - u[a][g.shift_down(lin, b, iv[b])]) * inv_h;
                }
                sum += d * d;
                const double ad = std::fabs(d);
                if (ad > out.linf) out.linf = ad;
            }
        });
    }
    out.l2 = std::sqrt(sum * g.cell_volume());
    return out;
}

}  // namespace nsv
