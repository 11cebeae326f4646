// Orchestration of one coupled time step and of whole runs.
//
// Step layout (velocity u^n, density rho^n, markers at t_n):
//   1. the drag fields of the current marker state are already deposited
//      (each state is deposited exactly once, when it is created);
//   2. density advection and momentum transport with u^n produce rho^{n+1}
//      and the transported momentum mtilde;
//   3. the implicit solve gives u^{n+1}, P^{n+1} from
//         c = rho^{n+1}/dt + kappa*n_f,   b = mtilde/dt + kappa*j_f,
//      with the drag fields taken from the start-of-step deposits;
//   4. markers are pushed with u^{n+1} sampled at their old positions
//      (exact exponential drag integrator);
//   5. the new state is deposited and the diagnostics row at t_{n+1} is
//      appended; bootstrap accumulators advance by left-endpoint
//      quadrature.
// Any non-finite diagnostic aborts the run naming the step.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "nsv/config.hpp"
#include "nsv/error.hpp"
#include "nsv/fields.hpp"
#include "nsv/fluid.hpp"
#include "nsv/functionals.hpp"
#include "nsv/geometry.hpp"
#include "nsv/initial_data.hpp"
#include "nsv/io_util.hpp"
#include "nsv/kinetic.hpp"
#include "nsv/norms.hpp"
#include "nsv/ratefit.hpp"
#include "nsv/series.hpp"
#include "nsv/spectral.hpp"
#include "nsv/theory.hpp"
#include "nsv/threading.hpp"

namespace nsv {

// Passive markers advanced by the same push as the physical ensemble but
// never deposited: they probe the particle flow map without back-reaction.
template <int D>
struct TracerBlock {
    std::vector<Vec<D>> x, v;
    bool empty() const { return x.empty(); }
};

// Scalar run-level accumulators (dimension-free, reported in report.json).
struct RunTrackers {
    double nf_l32_max = 0.0;              // realised kinetic ceiling constant
    double rho_min = std::numeric_limits<double>::infinity();
    double rho_max = -std::numeric_limits<double>::infinity();
    double rho_max_initial = 0.0;
    double max_energy_violation = 0.0;    // max over steps of E_{n+1} + dt D_{n+1} - E_n
    double max_cs_ratio = 0.0;            // max |j|^2 / (2 n e)
    double fluid_mass_initial = 0.0;
    double fluid_mass_drift_rel = 0.0;    // max relative deviation over the run
    double max_courant = 0.0;
    double max_rho_l32_increase = 0.0;    // max positive step increment of ||rho||_{3/2}
    std::array<double, 3> momentum_initial{0.0, 0.0, 0.0};
    double momentum_drift = 0.0;          // max Euclidean deviation from the initial total
};

struct RunResult {
    int dim = 0;
    std::int64_t cells = 0;
    std::int64_t steps = 0;
    double dt = 0.0;
    double t_end = 0.0;
    bool has_particles = false;
    bool frozen_fluid = false;
    int threads = 1;
    double wall_seconds = 0.0;
    SeriesTable series;
    std::vector<SolverLogRow> solver_log;
    InitialSummary init;
    TheoryConstants theory;
    RunTrackers trk;
    std::vector<VerdictRow> verdicts;
    std::vector<std::string> notes;
};

template <int D>
struct RunState {
    SimConfig cfg;
    Grid<D> grid;
    Spectral<D> spec;
    ScalarField rho;
    ScalarField p;
    FaceField<D> u, u_prev;
    ParticleEnsemble<D> ens;
    MomentFields<D> cm;   // cell moments of the current marker state
    FaceMoments<D> fm;    // face drag fields of the current marker state
    TracerBlock<D> tracers;
    double t = 0.0;
    std::int64_t step_index = 0;
    SeriesTable series;
    std::vector<SolverLogRow> solver_log;
    InitialSummary init;
    TheoryConstants theory;
    RunTrackers trk;
    StokesOptions stokes_opts;
    double B1 = 0.0, B2 = 0.0, B3 = 0.0;
    double prev_gradu_l2 = 0.0, prev_u_linf = 0.0, prev_gradu_linf = 0.0;
    double prev_rho_l32 = 0.0, prev_E = 0.0;

    explicit RunState(const SimConfig& c)
        : cfg(c), grid(c.cells, c.box), spec(grid), stokes_opts{c.max_solver_iters, false} {
        InitialData<D> data = make_initial_data<D>(cfg, spec, init);
        rho = std::move(data.rho);
        u = std::move(data.u);
        ens = std::move(data.ens);
        u_prev = u;
        p.assign(grid.cells(), 0.0);
        cm = deposit_moments(grid, ens);
        fm = deposit_face_drag(grid, ens);
        theory = theory_constants(cfg.mu, cfg.kappa, init.rho_l32, init.f0, init.energy, cfg.smallness_margin,
                                  cfg.sobolev_const, cfg.cstar);
        trk.rho_max_initial = init.rho_linf;
        trk.fluid_mass_initial = init.rho_mass;
        sample_diagnostics();
        trk.momentum_initial = {series.rows[0][col::mom_x1], series.rows[0][col::mom_x2],
                                series.rows[0][col::mom_x3]};
    }

    RunState(const RunState&) = delete;
    RunState& operator=(const RunState&) = delete;

    void step() {
        const double dt = cfg.dt;
        if (!cfg.freeze_fluid) {
            const FaceField<D> fluxes = compute_mass_fluxes(grid, rho, u);
            double courant = 0.0;
            ScalarField rho_new = advect_density(grid, rho, u, fluxes, dt, &courant);
            if (courant > trk.max_courant) trk.max_courant = courant;
            const FaceField<D> mtilde = transport_momentum(grid, rho, u, fluxes, dt);

            StokesSystem<D> sys;
            sys.mu = cfg.mu;
            sys.c.resize(grid);
            sys.b.resize(grid);
            const double inv_dt = 1.0 / dt;
            for (int a = 0; a < D; ++a) {
                for_each_cell(grid, [&](const IVec<D>& iv, std::size_t lin) {
                    const double rf = face_avg_density(grid, rho_new, a, iv, lin);
                    sys.c[a][lin] = rf * inv_dt + cfg.kappa * fm.n[a][lin];
                    sys.b[a][lin] = mtilde[a][lin] * inv_dt + cfg.kappa * fm.j[a][lin];
                });
            }
            StokesResult<D> sol =
                stokes_drag_solve(grid, spec, sys, cfg.eps_lin, cfg.eps_div, &u, stokes_opts);
            solver_log.push_back({step_index + 1, sol.iterations, sol.residual});
            u_prev = u;
            u = std::move(sol.u);
            p = std::move(sol.p);
            rho = std::move(rho_new);
        } else {
            u_prev = u;
        }

        // Push physical markers and passive tracers with u^{n+1} at the
        // positions held at t_n.
        if (!ens.empty()) {
            std::vector<Vec<D>> u_at;
            interpolate_velocity(grid, u, ens.x, u_at);
            push_particles(grid, ens, u_at, cfg.kappa, dt);
        }
        if (!tracers.empty()) {
            std::vector<Vec<D>> u_tr;
            interpolate_velocity(grid, u, tracers.x, u_tr);
            push_markers(grid, tracers.x, tracers.v, u_tr, cfg.kappa, dt);
        }

        ++step_index;
        t = dt * static_cast<double>(step_index);
        cm = deposit_moments(grid, ens);
        fm = deposit_face_drag(grid, ens);
        sample_diagnostics();
    }

    void sample_diagnostics() {
        SeriesTable::Row r{};
        r[col::t] = t;

        const double e_fluid = fluid_kinetic_energy(grid, rho, u);
        const double e_part = particle_kinetic_energy(ens);
        r[col::E] = e_fluid + e_part;

        std::vector<Vec<D>> u_at;
        interpolate_velocity(grid, u, ens.x, u_at);
        const double mm = drag_mismatch(ens, u_at);
        const GradientNorms gn = velocity_gradient_norms(grid, u);
        r[col::Dfun] = dissipation_functional(cfg.mu, cfg.kappa, gn.l2, mm);
        r[col::Ecal] = high_dissipation(grid, rho, u, u_prev, cfg.dt, cfg.kappa, mm);

        const MomentSups sups = moment_sups(grid, cm);
        r[col::sup_nf] = sups.n;
        r[col::sup_jf] = sups.j;
        r[col::sup_ef] = sups.e;
        if (sups.n_l32 > trk.nf_l32_max) trk.nf_l32_max = sups.n_l32;
        if (sups.max_cs_ratio > trk.max_cs_ratio) trk.max_cs_ratio = sups.max_cs_ratio;

        r[col::R_supp] = support_radius(ens);
        r[col::w1_sur] = abs_velocity_moment(ens);
        r[col::gradu_l2] = gn.l2;
        r[col::gradu_linf] = gn.linf;
        r[col::u_linf] = ff_max_abs(u);
        ScalarField div;
        divergence(grid, u, div);
        r[col::div_linf] = max_abs(div);
        const double rho_l32 = cell_lp_norm(grid, rho, 1.5);
        r[col::rho_l32] = rho_l32;
        r[col::gradrho_l2] = cell_gradient_l2(grid, rho);
        r[col::mass_f] = ens.total_mass();
        const std::array<double, 3> mom = total_momentum(grid, rho, u, ens);
        r[col::mom_x1] = mom[0];
        r[col::mom_x2] = mom[1];
        r[col::mom_x3] = mom[2];

        // Bootstrap accumulators: left-endpoint quadrature over the steps
        // completed so far.
        if (step_index > 0) {
            const double mu3 = cfg.mu * cfg.mu * cfg.mu;
            B1 += cfg.dt * (prev_gradu_l2 * prev_gradu_l2) * (prev_gradu_l2 * prev_gradu_l2) / mu3;
            B2 += cfg.dt * cfg.kappa * prev_u_linf;
            B3 += cfg.dt * 20.0 * cfg.kappa * prev_gradu_linf;
        }
        r[col::B1] = B1;
        r[col::B2] = B2;
        r[col::B3] = B3;

        for (int c = 0; c < col::count; ++c) {
            if (!std::isfinite(r[static_cast<std::size_t>(c)]))
                fail_numerics("non-finite diagnostic '" + std::string(series_column_name(c)) + "' (t = " +
                              format_double(t) + ")");
        }

        // Run-level trackers.
        for (double v : rho) {
            if (v < trk.rho_min) trk.rho_min = v;
            if (v > trk.rho_max) trk.rho_max = v;
        }
        double mass = 0.0;
        for (double v : rho) mass += v;
        mass *= grid.cell_volume();
        if (trk.fluid_mass_initial > 0.0) {
            const double drift = std::fabs(mass - trk.fluid_mass_initial) / trk.fluid_mass_initial;
            if (drift > trk.fluid_mass_drift_rel) trk.fluid_mass_drift_rel = drift;
        }
        if (step_index > 0) {
            const double inc = rho_l32 - prev_rho_l32;
            if (inc > trk.max_rho_l32_increase) trk.max_rho_l32_increase = inc;
            const double viol = r[col::E] + cfg.dt * r[col::Dfun] - prev_E;
            if (viol > trk.max_energy_violation) trk.max_energy_violation = viol;
            double md = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double d = mom[static_cast<std::size_t>(a)] - trk.momentum_initial[static_cast<std::size_t>(a)];
                md += d * d;
            }
            md = std::sqrt(md);
            if (md > trk.momentum_drift) trk.momentum_drift = md;
        }
        prev_gradu_l2 = gn.l2;
        prev_u_linf = r[col::u_linf];
        prev_gradu_linf = gn.linf;
        prev_rho_l32 = rho_l32;
        prev_E = r[col::E];

        series.append(r);
    }
};

template <int D>
struct RunCallbacks {
    std::function<void(RunState<D>&)> after_init;  // e.g. install tracer blocks
    std::function<void(RunState<D>&)> after_step;  // e.g. sample tracers at chosen times
};

// Output writers (report.cpp).
void write_report_json(const std::string& path, const SimConfig& cfg, const RunResult& res);
std::string report_to_json(const SimConfig& cfg, const RunResult& res);

template <int D>
inline void maybe_snapshot(RunState<D>& S) {
    if (S.cfg.snapshot_every <= 0 || S.ens.empty()) return;
    if (S.step_index % S.cfg.snapshot_every != 0) return;
    char name[32];
    std::snprintf(name, sizeof(name), "particles_%06lld.nsvp", static_cast<long long>(S.step_index));
    write_snapshot(S.cfg.out_dir + "/" + name, S.ens);
}

template <int D>
RunResult run_simulation(const SimConfig& cfg, const RunCallbacks<D>* cb = nullptr, bool write_outputs = true) {
    if (cfg.dim != D) fail_config("run_simulation instantiated for the wrong dimension");
    const auto t_start = std::chrono::steady_clock::now();
    if (write_outputs) ensure_directory(cfg.out_dir);

    auto S = std::make_unique<RunState<D>>(cfg);
    if (cb && cb->after_init) cb->after_init(*S);
    maybe_snapshot(*S);

    const std::int64_t nsteps = cfg.steps();
    for (std::int64_t n = 0; n < nsteps; ++n) {
        try {
            S->step();
        } catch (const SimError& e) {
            // Every mid-run abort names the step at which it happened.
            throw SimError(e.kind(), "step " + std::to_string(n + 1) + ": " + e.what());
        }
        maybe_snapshot(*S);
        if (cb && cb->after_step) cb->after_step(*S);
    }

    RunResult res;
    res.dim = D;
    res.cells = cfg.cells;
    res.steps = nsteps;
    res.dt = cfg.dt;
    res.t_end = cfg.t_end;
    res.has_particles = !S->ens.empty();
    res.frozen_fluid = cfg.freeze_fluid;
    res.threads = thread_count();
    res.series = std::move(S->series);
    res.solver_log = std::move(S->solver_log);
    res.init = S->init;
    res.theory = S->theory;
    res.trk = S->trk;

    DecayReportOptions opts;
    opts.tol = cfg.tol;
    opts.slack = cfg.slack;
    opts.t0 = cfg.fit_t0;
    opts.t1 = cfg.fit_t1;
    opts.dt = cfg.dt;
    opts.has_particles = res.has_particles;
    try {
        res.verdicts = decay_report(res.series, res.theory, opts);
    } catch (const SimError& e) {
        res.notes.push_back(std::string("decay report skipped: ") + e.what());
    }
    if (!res.theory.within_smallness)
        res.notes.push_back("smallness ratio sigma exceeds 1; decay verdicts are informational");
    if (!res.theory.kappa_at_least_one)
        res.notes.push_back("drag coefficient below 1; moment-ceiling guarantees are informational");

    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    if (write_outputs) {
        atomic_write_file(cfg.out_dir + "/series.csv", res.series.to_csv());
        atomic_write_file(cfg.out_dir + "/solver_log.csv", solver_log_to_csv(res.solver_log));
        write_report_json(cfg.out_dir + "/report.json", cfg, res);
    }
    return res;
}

// Runtime dimension dispatch used by the CLI.
RunResult run_simulation_any(const SimConfig& cfg, bool write_outputs = true);

}  // namespace nsv
