#include "nsv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nsv/coupler.hpp"
#include "nsv/error.hpp"

namespace nsv {

// ---------------------------------------------------------------------------
// Closed-form characteristics
// ---------------------------------------------------------------------------

double char_drift_factor(double kappa, double t) {
    const double z = kappa * t;
    if (z < 1e-3) {
        // Alternating series of (1 - exp(-z))/kappa = t (1 - z/2 + z^2/6 - ...);
        // truncated after z^4 the relative error is below z^5/720 ~ 1e-18.
        return t * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0 + z * z * z * z / 120.0);
    }
    return (1.0 - std::exp(-z)) / kappa;
}

// ---------------------------------------------------------------------------
// Exact W1 by successive shortest paths
// ---------------------------------------------------------------------------

namespace {

double atom_distance(const W1Atom& a, const W1Atom& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.pos.size(); ++k) {
        const double d = a.pos[k] - b.pos[k];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double exact_w1(const std::vector<W1Atom>& from, const std::vector<W1Atom>& to) {
    const std::size_t m = from.size(), n = to.size();
    if (m == 0 || n == 0) fail_config("exact_w1 needs at least one atom on each side");
    if (m > 64 || n > 64) fail_config("exact_w1 is limited to 64 atoms per side");
    const std::size_t dim = from[0].pos.size();
    for (const W1Atom& a : from)
        if (a.pos.size() != dim || a.mass < 0.0) fail_config("exact_w1: inconsistent source atoms");
    for (const W1Atom& b : to)
        if (b.pos.size() != dim || b.mass < 0.0) fail_config("exact_w1: inconsistent target atoms");

    double total_from = 0.0, total_to = 0.0;
    for (const W1Atom& a : from) total_from += a.mass;
    for (const W1Atom& b : to) total_to += b.mass;
    const double scale = std::max(total_from, total_to);
    if (scale <= 0.0) fail_config("exact_w1: measures have no mass");
    if (std::fabs(total_from - total_to) > 1e-12 * scale)
        fail_numerics("exact_w1: total masses differ by " + format_double(std::fabs(total_from - total_to)) +
                      " (relative tolerance 1e-12)");

    // Transportation problem on the complete bipartite graph.  Forward arcs
    // i -> j have unbounded capacity and cost c(i,j); residual backward arcs
    // exist where flow is positive.  Node potentials keep all reduced costs
    // non-negative so plain Dijkstra applies.
    std::vector<double> cost(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = atom_distance(from[i], to[j]);

    std::vector<double> supply(m), demand(n), flow(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) supply[i] = from[i].mass;
    for (std::size_t j = 0; j < n; ++j) demand[j] = to[j].mass;

    const double mass_eps = 1e-15 * scale;
    const std::size_t nodes = m + n;  // 0..m-1 sources, m..m+n-1 sinks
    std::vector<double> pot(nodes, 0.0), dist(nodes);
    std::vector<int> parent(nodes);  // for sinks: source index; for sources: sink index
    std::vector<char> settled(nodes);

    const double inf = std::numeric_limits<double>::infinity();
    std::size_t guard = 4 * (m + n) * (m + n) + 64;

    auto remaining_demand = [&]() {
        double s = 0.0;
        for (double d : demand) s += d;
        return s;
    };

    while (remaining_demand() > mass_eps) {
        if (guard-- == 0) fail_numerics("exact_w1: augmentation limit exceeded");

        // Dijkstra over the residual graph with reduced costs, run to
        // completion so the potential update below stays valid everywhere.
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(settled.begin(), settled.end(), char(0));
        std::fill(parent.begin(), parent.end(), -1);
        for (std::size_t i = 0; i < m; ++i)
            if (supply[i] > mass_eps) dist[i] = 0.0;

        for (;;) {
            std::size_t best = nodes;
            double bd = inf;
            for (std::size_t v = 0; v < nodes; ++v)
                if (!settled[v] && dist[v] < bd) {
                    bd = dist[v];
                    best = v;
                }
            if (best == nodes) break;
            settled[best] = 1;
            if (best < m) {
                const std::size_t i = best;
                for (std::size_t j = 0; j < n; ++j) {
                    if (settled[m + j]) continue;  // roundoff-negative reduced costs must
                                                   // never reopen a node: a post-settlement
                                                   // parent rewrite can close a parent cycle
                    const double rc = cost[i * n + j] + pot[i] - pot[m + j];
                    if (dist[i] + rc < dist[m + j]) {
                        dist[m + j] = dist[i] + rc;
                        parent[m + j] = static_cast<int>(i);
                    }
                }
            } else {
                const std::size_t j = best - m;
                for (std::size_t i = 0; i < m; ++i) {
                    if (settled[i]) continue;
                    if (flow[i * n + j] <= 0.0) continue;
                    const double rc = -cost[i * n + j] + pot[m + j] - pot[i];
                    if (dist[m + j] + rc < dist[i]) {
                        dist[i] = dist[m + j] + rc;
                        parent[i] = static_cast<int>(j);
                    }
                }
            }
        }

        // Cheapest reachable sink with residual demand.
        std::size_t jstar = n;
        double dstar = inf;
        for (std::size_t j = 0; j < n; ++j)
            if (demand[j] > mass_eps && dist[m + j] < dstar) {
                dstar = dist[m + j];
                jstar = j;
            }
        if (jstar == n) fail_numerics("exact_w1: no augmenting path (unbalanced problem?)");

        // Bottleneck along the alternating path sink <- source <- sink ...
        double delta = demand[jstar];
        {
            std::size_t j = jstar;
            for (;;) {
                const std::size_t i = static_cast<std::size_t>(parent[m + j]);
                if (parent[i] < 0) {
                    delta = std::min(delta, supply[i]);
                    break;
                }
                const std::size_t jprev = static_cast<std::size_t>(parent[i]);
                delta = std::min(delta, flow[i * n + jprev]);
                j = jprev;
            }
        }

        // Apply the augmentation.
        {
            std::size_t j = jstar;
            for (;;) {
                const std::size_t i = static_cast<std::size_t>(parent[m + j]);
                flow[i * n + j] += delta;
                if (parent[i] < 0) {
                    supply[i] -= delta;
                    break;
                }
                const std::size_t jprev = static_cast<std::size_t>(parent[i]);
                flow[i * n + jprev] -= delta;
                j = jprev;
            }
            demand[jstar] -= delta;
        }

        // Johnson potential update, truncated at the augmenting distance.
        for (std::size_t v = 0; v < nodes; ++v) pot[v] += std::min(dist[v], dstar);
    }

    double w1 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) w1 += flow[i * n + j] * cost[i * n + j];
    return w1;
}

// ---------------------------------------------------------------------------
// 1d1v finite-volume kinetic solve
// ---------------------------------------------------------------------------

FvVlasov1D::FvVlasov1D(int nx, int nv, double L, double vmax) : nx_(nx), nv_(nv), L_(L), vmax_(vmax) {
    if (nx < 2 || nx > 128 || nv < 2 || nv > 128) fail_config("FvVlasov1D: grid sizes must lie in [2,128]");
    if (!(L > 0.0) || !(vmax > 0.0)) fail_config("FvVlasov1D: box and velocity bound must be positive");
    dx_ = L / nx;
    dv_ = 2.0 * vmax / nv;
    f_.assign(static_cast<std::size_t>(nx) * nv, 0.0);
    work_.assign(f_.size(), 0.0);
}

double FvVlasov1D::total_mass() const {
    double s = 0.0;
    for (double v : f_) s += v;
    return s * dx_ * dv_;
}

void FvVlasov1D::step(const std::function<double(double)>& u, double kappa, double dt) {
    const std::size_t snx = static_cast<std::size_t>(nx_);

    // Directional CFL numbers (transport speeds at cell centres / v-edges).
    double amax = 0.0;
    std::vector<double> ux(snx);
    for (int i = 0; i < nx_; ++i) ux[static_cast<std::size_t>(i)] = u(x_center(i));
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j <= nv_; ++j) {
            const double vedge = -vmax_ + j * dv_;
            amax = std::max(amax, std::fabs(kappa * (ux[static_cast<std::size_t>(i)] - vedge)));
        }
    const double cfl_x = (vmax_ - 0.5 * dv_) * dt / dx_;  // largest |v| at a cell centre
    const double cfl_v = amax * dt / dv_;
    if (cfl_x > 1.0 + 1e-12)
        fail_numerics("phase-space CFL violated in x: " + format_double(cfl_x) + " exceeds 1");
    if (cfl_v > 1.0 + 1e-12)
        fail_numerics("phase-space CFL violated in v: " + format_double(cfl_v) + " exceeds 1");

    // Upwind fluxes.  fx(i,j): flux across the x-interface on the lower side
    // of cell i (periodic); fv(i,j): flux across the v-interface below cell j
    // (zero at the velocity boundaries, which conserves mass for compactly
    // supported data).
    std::vector<double> fx(f_.size());
    std::vector<double> fv(snx * static_cast<std::size_t>(nv_ + 1));
    for (int j = 0; j < nv_; ++j) {
        const double vj = v_center(j);
        const std::size_t row = static_cast<std::size_t>(j) * snx;
        for (int i = 0; i < nx_; ++i) {
            const int idn = (i == 0) ? nx_ - 1 : i - 1;
            fx[row + static_cast<std::size_t>(i)] =
                (vj >= 0.0) ? vj * f_[row + static_cast<std::size_t>(idn)] : vj * f_[row + static_cast<std::size_t>(i)];
        }
    }
    for (int i = 0; i < nx_; ++i) {
        const double ui = ux[static_cast<std::size_t>(i)];
        for (int j = 0; j <= nv_; ++j) {
            double flx = 0.0;
            if (j > 0 && j < nv_) {
                const double vedge = -vmax_ + j * dv_;
                const double a = kappa * (ui - vedge);
                const double fdn = f_[static_cast<std::size_t>(j - 1) * snx + static_cast<std::size_t>(i)];
                const double fup = f_[static_cast<std::size_t>(j) * snx + static_cast<std::size_t>(i)];
                flx = (a >= 0.0) ? a * fdn : a * fup;
            }
            fv[static_cast<std::size_t>(j) * snx + static_cast<std::size_t>(i)] = flx;
        }
    }

    const double rx = dt / dx_, rv = dt / dv_;
    for (int j = 0; j < nv_; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * snx;
        for (int i = 0; i < nx_; ++i) {
            const int iup = (i + 1 == nx_) ? 0 : i + 1;
            const double div_x = fx[row + static_cast<std::size_t>(iup)] - fx[row + static_cast<std::size_t>(i)];
            const double div_v = fv[(static_cast<std::size_t>(j) + 1) * snx + static_cast<std::size_t>(i)] -
                                 fv[static_cast<std::size_t>(j) * snx + static_cast<std::size_t>(i)];
            work_[row + static_cast<std::size_t>(i)] = f_[row + static_cast<std::size_t>(i)] - rx * div_x - rv * div_v;
        }
    }
    f_.swap(work_);
}

void FvVlasov1D::run(const std::function<double(double)>& u, double kappa, double T, double cfl_target) {
    if (!(T > 0.0)) return;
    if (!(cfl_target > 0.0) || cfl_target > 1.0) fail_config("FvVlasov1D: CFL target must lie in (0,1]");
    double amax = 0.0;
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j <= nv_; ++j)
            amax = std::max(amax, std::fabs(kappa * (u(x_center(i)) - (-vmax_ + j * dv_))));
    const double smax_x = vmax_;  // bound on |v| anywhere in the grid
    double dt = cfl_target * std::min(dx_ / smax_x, amax > 0.0 ? dv_ / amax : std::numeric_limits<double>::infinity());
    const std::int64_t nsteps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(T / dt - 1e-12)));
    dt = T / static_cast<double>(nsteps);
    for (std::int64_t s = 0; s < nsteps; ++s) step(u, kappa, dt);
}

void FvVlasov1D::moments(std::vector<double>& n, std::vector<double>& j) const {
    n.assign(static_cast<std::size_t>(nx_), 0.0);
    j.assign(static_cast<std::size_t>(nx_), 0.0);
    for (int jv = 0; jv < nv_; ++jv) {
        const double vj = v_center(jv);
        const std::size_t row = static_cast<std::size_t>(jv) * static_cast<std::size_t>(nx_);
        for (int i = 0; i < nx_; ++i) {
            const double fi = f_[row + static_cast<std::size_t>(i)];
            n[static_cast<std::size_t>(i)] += fi * dv_;
            j[static_cast<std::size_t>(i)] += fi * vj * dv_;
        }
    }
}

// ---------------------------------------------------------------------------
// Flow-map Jacobian probe
// ---------------------------------------------------------------------------

namespace {

template <int D>
double det_small(const std::array<std::array<double, D>, D>& m) {
    if constexpr (D == 1) {
        return m[0][0];
    } else if constexpr (D == 2) {
        return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    } else {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
}

template <int D>
std::vector<JacobianSample> jacobian_probe_impl(const SimConfig& cfg, const std::vector<double>& times, int n_probes,
                                                double eps) {
    if (n_probes < 1) fail_config("jacobian probe needs at least one probe marker");
    if (!(eps > 0.0)) fail_config("jacobian probe perturbation must be positive");
    std::vector<double> ts = times;
    std::sort(ts.begin(), ts.end());
    if (ts.empty()) fail_config("jacobian probe needs at least one sample time");
    if (ts.front() <= 0.0) fail_config("jacobian probe sample times must be positive");
    if (ts.back() > cfg.t_end + 0.5 * cfg.dt) fail_config("jacobian probe sample time beyond the end of the run");

    const int block = 2 * D + 1;  // centre + (+/- eps) per velocity axis
    std::vector<JacobianSample> samples;
    std::size_t next_time = 0;
    std::size_t nprobe_eff = 0;

    RunCallbacks<D> cb;
    cb.after_init = [&](RunState<D>& S) {
        if (S.ens.empty()) fail_config("jacobian probe requires a particle ensemble");
        nprobe_eff = std::min<std::size_t>(static_cast<std::size_t>(n_probes), S.ens.size());
        S.tracers.x.reserve(nprobe_eff * static_cast<std::size_t>(block));
        S.tracers.v.reserve(nprobe_eff * static_cast<std::size_t>(block));
        for (std::size_t k = 0; k < nprobe_eff; ++k) {
            const std::size_t p = (k * S.ens.size()) / nprobe_eff;
            S.tracers.x.push_back(S.ens.x[p]);
            S.tracers.v.push_back(S.ens.v[p]);
            for (int a = 0; a < D; ++a) {
                for (double sgn : {+1.0, -1.0}) {
                    S.tracers.x.push_back(S.ens.x[p]);
                    Vec<D> v = S.ens.v[p];
                    v[a] += sgn * eps;
                    S.tracers.v.push_back(v);
                }
            }
        }
    };
    cb.after_step = [&](RunState<D>& S) {
        while (next_time < ts.size() && S.t >= ts[next_time] - 0.5 * cfg.dt) {
            JacobianSample js;
            js.t = S.t;
            js.normalized_det.reserve(nprobe_eff);
            const double renorm = std::exp(cfg.kappa * static_cast<double>(D) * S.t);
            for (std::size_t k = 0; k < nprobe_eff; ++k) {
                const std::size_t base = k * static_cast<std::size_t>(block);
                std::array<std::array<double, D>, D> J{};
                double spread = 0.0, vscale = 0.0;
                for (int a = 0; a < D; ++a) {
                    const Vec<D>& vp = S.tracers.v[base + 1 + 2 * static_cast<std::size_t>(a)];
                    const Vec<D>& vm = S.tracers.v[base + 2 + 2 * static_cast<std::size_t>(a)];
                    for (int r = 0; r < D; ++r) {
                        const double diff = vp[r] - vm[r];
                        spread = std::max(spread, std::fabs(diff));
                        vscale = std::max({vscale, std::fabs(vp[r]), std::fabs(vm[r])});
                        J[r][a] = diff / (2.0 * eps);
                    }
                }
                // The centred difference carries ~eps_machine * |v| of rounding
                // noise; demand three extra digits of signal above that.
                if (spread < 1e3 * std::numeric_limits<double>::epsilon() * (vscale + eps))
                    fail_numerics("jacobian probe: velocity differences below the finite-difference noise floor; "
                                  "increase the perturbation");
                js.normalized_det.push_back(det_small<D>(J) * renorm);
            }
            samples.push_back(std::move(js));
            ++next_time;
        }
    };

    run_simulation<D>(cfg, &cb, /*write_outputs=*/false);
    if (next_time != ts.size()) fail_numerics("jacobian probe: not all sample times were reached");
    return samples;
}

}  // namespace

std::vector<JacobianSample> jacobian_probe(const SimConfig& cfg, const std::vector<double>& times, int n_probes,
                                           double eps) {
    if (cfg.dim == 2) return jacobian_probe_impl<2>(cfg, times, n_probes, eps);
    if (cfg.dim == 3) return jacobian_probe_impl<3>(cfg, times, n_probes, eps);
    fail_config("jacobian probe supports 2- and 3-dimensional runs");
}

}  // namespace nsv
