// Independent reference implementations ("oracles") used to validate the
// production kernels.  Each one computes the same physical answer through
// different numerics:
//   * char_closed_form: the drag kinematics integrated analytically, with
//     a series evaluation of the drift factor that shares no code with the
//     production pusher;
//   * exact_w1: the 1-Wasserstein distance between small atomic measures
//     by successive-shortest-path min-cost flow (an exact LP optimum);
//   * dense_stokes_solve: the full saddle-point system assembled as a
//     dense matrix and LU-factorised (no Krylov, no FFT);
//   * FvVlasov1D: a 1d1v conservative finite-volume solve of the kinetic
//     equation under a prescribed velocity field, cross-checking the
//     particle pusher through its moments;
//   * jacobian_probe: finite-difference velocity-map Jacobians along a
//     replayed run, measuring the phase-space compression factor.

#pragma once

#include <functional>
#include <vector>

#include "nsv/config.hpp"
#include "nsv/fluid.hpp"
#include "nsv/geometry.hpp"

namespace nsv {

// ---------------------------------------------------------------------------
// Closed-form characteristics
// ---------------------------------------------------------------------------

template <int D>
struct CharState {
    Vec<D> x{}, v{};
};

// Drift factor (1 - exp(-z))/kappa evaluated via an alternating series for
// small z and directly otherwise; declared here so tests can probe it.
double char_drift_factor(double kappa, double t);

// Exact solution of  dx/dt = v, dv/dt = kappa (u - v)  with constant u.
template <int D>
inline CharState<D> char_closed_form(const Vec<D>& x0, const Vec<D>& v0, const Vec<D>& u, double kappa, double t) {
    CharState<D> s;
    const double decay = std::exp(-kappa * t);
    const double drift = char_drift_factor(kappa, t);
    for (int a = 0; a < D; ++a) {
        const double rel = v0[a] - u[a];
        s.v[a] = u[a] + rel * decay;
        s.x[a] = x0[a] + u[a] * t + rel * drift;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Exact 1-Wasserstein distance between atomic measures
// ---------------------------------------------------------------------------

struct W1Atom {
    std::vector<double> pos;  // point in R^d (d = pos.size(), any small d)
    double mass = 0.0;
};

// Exact W1 (Euclidean ground metric) by min-cost flow; both sides need
// equal total mass (to 1e-12 relative) and at most 64 atoms.
double exact_w1(const std::vector<W1Atom>& from, const std::vector<W1Atom>& to);

// ---------------------------------------------------------------------------
// Dense saddle-point reference solve
// ---------------------------------------------------------------------------

// Assembles [A G; -G^T 0] with a pressure-mean gauge row as one dense
// matrix and solves by LU.  Grids up to 8 cells per axis.  Requires the
// face coefficient to be positive somewhere (otherwise the velocity means
// are undetermined).
template <int D>
void dense_stokes_solve(const Grid<D>& g, const StokesSystem<D>& sys, FaceField<D>& u_out, ScalarField& p_out);

// ---------------------------------------------------------------------------
// 1d1v finite-volume kinetic solve
// ---------------------------------------------------------------------------

class FvVlasov1D {
public:
    // Phase grid: nx cells on [0, L) periodic, nv cells on [-vmax, vmax]
    // with zero-flux velocity boundaries.  nx, nv <= 128.
    FvVlasov1D(int nx, int nv, double L, double vmax);

    double dx() const { return dx_; }
    double dv() const { return dv_; }
    double x_center(int i) const { return (i + 0.5) * dx_; }
    double v_center(int j) const { return -vmax_ + (j + 0.5) * dv_; }
    double& at(int i, int j) { return f_[static_cast<std::size_t>(j) * nx_ + i]; }
    double at(int i, int j) const { return f_[static_cast<std::size_t>(j) * nx_ + i]; }

    double total_mass() const;

    // One conservative upwind step under the drag field kappa (u(x) - v).
    // Throws when either directional CFL number exceeds 1.
    void step(const std::function<double(double)>& u, double kappa, double dt);

    // Run to time T with uniform steps chosen from the CFL target.
    void run(const std::function<double(double)>& u, double kappa, double T, double cfl_target);

    // x-marginals: n_i = sum_j f_ij dv, j_i = sum_j v_j f_ij dv.
    void moments(std::vector<double>& n, std::vector<double>& j) const;

private:
    int nx_, nv_;
    double L_, vmax_, dx_, dv_;
    std::vector<double> f_, work_;
};

// ---------------------------------------------------------------------------
// Flow-map Jacobian probe
// ---------------------------------------------------------------------------

struct JacobianSample {
    double t = 0.0;
    std::vector<double> normalized_det;  // det(D_{v0} V(t)) * exp(kappa * d * t), one per probe
};

// Replays the configured run carrying passive tracer clusters (a centre
// marker plus +/- eps perturbations per velocity axis around n_probes
// markers of the initial ensemble) and returns the finite-difference
// Jacobian determinants of the velocity flow map at the requested times,
// normalised by the analytic drag compression exp(-kappa d t).  eps is the
// absolute velocity perturbation.  Errors out when the differences sink
// into floating-point noise.
std::vector<JacobianSample> jacobian_probe(const SimConfig& cfg, const std::vector<double>& times, int n_probes,
                                           double eps);

}  // namespace nsv
