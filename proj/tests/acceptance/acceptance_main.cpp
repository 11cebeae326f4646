// Acceptance gate: runs the four embedded reference scenarios plus the
// standalone oracles and checks every release criterion at its stated
// tolerance.  One PASS/FAIL line per criterion; the exit status is the
// number of failed criteria, so a zero exit means the build is good.
//
// The criteria, in the order they are printed:
//    1  discrete energy inequality + first-order shrink of the defect
//    2  density maximum principle (no undershoot, no overshoot)
//    3  uniform kinetic moment ceilings inside the smallness regime
//    4  dissipation coercivity and the exponential energy envelope
//    5  concentration rates (exact drag rate; coupled rates >= 0.95 alpha2)
//    6  velocity-transport surrogate: energy bound + exact W1 fixture
//    7  marker pusher vs closed-form characteristics
//    8  flow-map Jacobian compression factor stays above 1/2
//    9  density gradient never doubles
//   10  particle moments vs finite-volume kinetic reference
//   11  conservation: particle mass, fluid mass, momentum-drift refinement
//   12  thread-count determinism of the diagnostic series

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nsv/config.hpp"
#include "nsv/coupler.hpp"
#include "nsv/functionals.hpp"
#include "nsv/io_util.hpp"
#include "nsv/oracle.hpp"
#include "nsv/ratefit.hpp"
#include "nsv/series.hpp"
#include "nsv/theory.hpp"
#include "nsv/threading.hpp"
#include "nsv/verify.hpp"

namespace {

int g_failed = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%2d] %-34s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failed;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return std::string(buf);
}

// Looks up an embedded reference scenario and runs it without writing any
// output files (snapshots are disabled for the same reason: nothing should
// touch the filesystem unless a criterion needs the bytes on disk).
nsv::SimConfig scenario_config(const std::string& name) {
    for (const nsv::ScenarioInfo& sc : nsv::reference_scenarios())
        if (sc.name == name) return nsv::parse_config(sc.config_json, "scenario " + name);
    std::fprintf(stderr, "unknown reference scenario '%s'\n", name.c_str());
    std::exit(2);
}

nsv::RunResult run_reference(const std::string& name, double dt_override = 0.0) {
    nsv::SimConfig cfg = scenario_config(name);
    cfg.snapshot_every = 0;
    if (dt_override > 0.0) cfg.dt = dt_override;
    nsv::RunResult res = nsv::run_simulation_any(cfg, /*write_outputs=*/false);
    std::printf("     ran %-14s dt %-7g steps %-5lld wall %.1f s\n", name.c_str(), cfg.dt,
                static_cast<long long>(res.steps), res.wall_seconds);
    std::fflush(stdout);
    return res;
}

double column_max(const nsv::SeriesTable& s, int c) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& r : s.rows) m = std::max(m, r[static_cast<std::size_t>(c)]);
    return m;
}

double fitted_rate(const nsv::RunResult& res, int c, double t0, double t1) {
    return nsv::fit_exponential(res.series.column(nsv::col::t), res.series.column(c), t0, t1).lambda;
}

}  // namespace

int main() {
    using namespace nsv;
    set_thread_count(resolve_thread_count(0));

    std::printf("reference runs\n");
    const RunResult drag = run_reference("drag-only-2d");
    const RunResult visc = run_reference("fluid-decay-2d");
    const RunResult c2_coarse = run_reference("coupled-2d", 0.004);
    const RunResult c2 = run_reference("coupled-2d");  // dt = 0.002, the reference step
    const RunResult c2_fine = run_reference("coupled-2d", 0.001);
    const RunResult c3 = run_reference("coupled-3d");

    struct Named {
        const char* name;
        const RunResult* res;
    };
    const std::vector<Named> all_runs = {
        {"drag-only-2d", &drag}, {"fluid-decay-2d", &visc}, {"coupled-2d", &c2}, {"coupled-3d", &c3}};

    std::printf("criteria\n");

    // ------------------------------------------------------------------
    // 1. Energy inequality: E_{n+1} - E_n + dt D_{n+1} <= eps_E on every
    //    reference run, with eps_E / dt shrinking under step halving
    //    (first-order consistency of the defect) and the 2-D reference
    //    configuration finishing within its time budget.
    // ------------------------------------------------------------------
    {
        bool ok = true;
        double worst = 0.0;  // violation normalised by the per-run budget
        for (const Named& nr : all_runs) {
            const double e0 = nr.res->series.rows.front()[col::E];
            const double budget = std::max(1e-3 * e0, 1e-15);
            worst = std::max(worst, nr.res->trk.max_energy_violation / budget);
            ok = ok && nr.res->trk.max_energy_violation <= budget;
        }
        const double v_coarse = c2_coarse.trk.max_energy_violation / c2_coarse.dt;
        const double v_mid = c2.trk.max_energy_violation / c2.dt;
        const double v_fine = c2_fine.trk.max_energy_violation / c2_fine.dt;
        const double floor = 1e-14 * c2.series.rows.front()[col::E];
        const bool half1 = v_mid <= 0.7 * v_coarse || v_mid <= floor;
        const bool half2 = v_fine <= 0.7 * v_mid || v_fine <= floor;
        const bool timed = c2.wall_seconds < 30.0;
        ok = ok && half1 && half2 && timed;
        verdict(1, "energy inequality + dt refinement", ok,
                fmt("defect/dt %.3g -> %.3g -> %.3g, worst budget share %.2g, 2-D run %.1f s (< 30)",
                    v_coarse, v_mid, v_fine, worst, c2.wall_seconds));
    }

    // ------------------------------------------------------------------
    // 2. Density maximum principle on every run: no negative undershoot
    //    beyond -1e-14 rho_max and no overshoot beyond rho_max (1 + 1e-14).
    // ------------------------------------------------------------------
    {
        bool ok = true;
        double worst_under = 0.0, worst_over = 0.0;
        for (const Named& nr : all_runs) {
            const double r0 = nr.res->trk.rho_max_initial;
            worst_under = std::max(worst_under, -nr.res->trk.rho_min / r0);
            worst_over = std::max(worst_over, nr.res->trk.rho_max / r0 - 1.0);
            ok = ok && nr.res->trk.rho_min >= -1e-14 * r0;
            ok = ok && nr.res->trk.rho_max <= r0 * (1.0 + 1e-14);
        }
        verdict(2, "density maximum principle", ok,
                fmt("worst undershoot %.2g, worst overshoot %.2g (tol 1e-14)", worst_under, worst_over));
    }

    // ------------------------------------------------------------------
    // 3. Kinetic moment ceilings on the 3-D coupled run: the smallness
    //    budget holds and sup_x of n_f, |j_f|, e_f stays below twice the
    //    initial profile bounds at every sample, within the time budget.
    // ------------------------------------------------------------------
    {
        const double n_max = column_max(c3.series, col::sup_nf);
        const double j_max = column_max(c3.series, col::sup_jf);
        const double e_max = column_max(c3.series, col::sup_ef);
        const bool ok = c3.theory.within_smallness && n_max <= c3.theory.ceiling_n &&
                        j_max <= c3.theory.ceiling_j && e_max <= c3.theory.ceiling_e &&
                        c3.wall_seconds < 600.0;
        verdict(3, "uniform moment ceilings (3-D)", ok,
                fmt("sigma %.3g, n %.3g/%.3g, j %.3g/%.3g, e %.3g/%.3g, wall %.0f s (< 600)",
                    c3.theory.sigma, n_max, c3.theory.ceiling_n, j_max, c3.theory.ceiling_j, e_max,
                    c3.theory.ceiling_e, c3.wall_seconds));
    }

    // ------------------------------------------------------------------
    // 4. Coercivity and envelope on the 3-D coupled run, with the decay
    //    rate re-evaluated at the ceiling constant realised by the run:
    //    D >= 2 alpha E at every sample and E(t) <= 1.05 e^{-2 alpha t} E0.
    // ------------------------------------------------------------------
    {
        const double alpha = alpha_rate(c3.theory.mu, c3.theory.kappa, c3.theory.cs, c3.theory.rho0_l32,
                                        c3.trk.nf_l32_max);
        const double e0 = c3.series.rows.front()[col::E];
        double min_coerc = std::numeric_limits<double>::infinity();
        double max_env = 0.0;
        for (const auto& r : c3.series.rows) {
            if (r[col::E] > 1e-300)
                min_coerc = std::min(min_coerc, r[col::Dfun] / (2.0 * alpha * r[col::E]));
            max_env = std::max(max_env, r[col::E] / (e0 * std::exp(-2.0 * alpha * r[col::t])));
        }
        const bool ok = min_coerc >= 1.0 && max_env <= 1.05;
        verdict(4, "coercivity + energy envelope (3-D)", ok,
                fmt("alpha_realised %.4g, min D/(2 alpha E) %.3f (>= 1), max envelope ratio %.3f (<= 1.05)",
                    alpha, min_coerc, max_env));
    }

    // ------------------------------------------------------------------
    // 5. Concentration.  Drag-only: the exact integrator must reproduce
    //    the support decay rate kappa to 1e-6 relative, and kappa must
    //    dominate the theoretical kinetic rate alpha2.  Coupled 3-D: the
    //    fitted rates of R_supp, sup|j_f| and sup e_f each reach at least
    //    0.95 alpha2 over the tail window.
    // ------------------------------------------------------------------
    {
        const SimConfig drag_cfg = scenario_config("drag-only-2d");
        const double r_rate = fitted_rate(drag, col::R_supp, 1.0, 3.0);
        const double rel = std::fabs(r_rate - drag_cfg.kappa) / drag_cfg.kappa;
        const bool drag_ok = rel <= 1e-6 && drag_cfg.kappa >= drag.theory.alpha2;

        const double a2 = c3.theory.alpha2;
        const double fr = fitted_rate(c3, col::R_supp, 1.0, c3.t_end);
        const double fj = fitted_rate(c3, col::sup_jf, 1.0, c3.t_end);
        const double fe = fitted_rate(c3, col::sup_ef, 1.0, c3.t_end);
        const bool coupled_ok = fr >= 0.95 * a2 && fj >= 0.95 * a2 && fe >= 0.95 * a2;
        verdict(5, "concentration rates", drag_ok && coupled_ok,
                fmt("drag |fit-kappa|/kappa %.2g (<= 1e-6); coupled R %.3g, j %.3g, e %.3g vs 0.95 alpha2 %.3g",
                    rel, fr, fj, fe, 0.95 * a2));
    }

    // ------------------------------------------------------------------
    // 6. Velocity-transport surrogate.  Along every run the surrogate is
    //    bounded by sqrt(2 m_f E); and on a 32-atom fixture it coincides
    //    with the exact LP transport distance to the rest state.
    // ------------------------------------------------------------------
    {
        bool bound_ok = true;
        double worst = 0.0;
        for (const Named& nr : all_runs) {
            for (const auto& r : nr.res->series.rows) {
                const double b = w1_moment_bound(r[col::mass_f], r[col::E]);
                if (b <= 0.0) continue;
                worst = std::max(worst, r[col::w1_sur] / b);
                bound_ok = bound_ok && r[col::w1_sur] <= b * (1.0 + 1e-10);
            }
        }

        std::mt19937 gen(2026);
        std::uniform_real_distribution<double> vel(-0.4, 0.4), wgt(0.5, 1.5);
        std::vector<W1Atom> cloud(32);
        double total = 0.0, surrogate = 0.0;
        for (W1Atom& a : cloud) {
            a.pos = {vel(gen), vel(gen)};
            a.mass = wgt(gen);
            total += a.mass;
            surrogate += a.mass * std::hypot(a.pos[0], a.pos[1]);
        }
        const std::vector<W1Atom> rest = {W1Atom{{0.0, 0.0}, total}};
        const double w1 = exact_w1(cloud, rest);
        const bool fixture_ok = std::fabs(w1 - surrogate) <= 1e-10 * std::max(1.0, surrogate);
        verdict(6, "transport surrogate + exact W1", bound_ok && fixture_ok,
                fmt("max surrogate/bound %.6f (<= 1+1e-10); |W1 - surrogate| %.2g (<= 1e-10)", worst,
                    std::fabs(w1 - surrogate)));
    }

    // ------------------------------------------------------------------
    // 7. The production pusher against closed-form characteristics over
    //    drag numbers spanning 1e-6 .. 1e3.
    // ------------------------------------------------------------------
    {
        const double err = characteristics_max_rel_error(1000);
        verdict(7, "characteristics closed form", err <= 1e-13,
                fmt("max relative error %.3g over 1000 cases (<= 1e-13)", err));
    }

    // ------------------------------------------------------------------
    // 8. Flow-map Jacobians on the coupled 3-D configuration: with the
    //    bootstrap gradient budget B3 <= 1 the normalised determinant of
    //    the velocity flow map stays >= 0.5 at t = 1, 2, 5.
    // ------------------------------------------------------------------
    {
        const double b3_max = column_max(c3.series, col::B3);
        SimConfig cfg = scenario_config("coupled-3d");
        cfg.snapshot_every = 0;
        std::vector<JacobianSample> samples = jacobian_probe(cfg, {1.0, 2.0, 5.0}, 100, 1e-4);
        double min_det = std::numeric_limits<double>::infinity();
        for (const JacobianSample& s : samples)
            for (double d : s.normalized_det) min_det = std::min(min_det, d);
        const bool ok = b3_max <= 1.0 && min_det >= 0.5;
        verdict(8, "flow-map jacobian compression", ok,
                fmt("B3 max %.3g (<= 1), min normalised det %.4f (>= 0.5) over 100 probes at t = 1, 2, 5",
                    b3_max, min_det));
    }

    // ------------------------------------------------------------------
    // 9. The density gradient never doubles: ||grad rho(t)||_2 stays
    //    below 2 ||grad rho_0||_2 (plus a roundoff floor for runs that
    //    start exactly uniform) on every run.
    // ------------------------------------------------------------------
    {
        bool ok = true;
        double worst = 0.0;
        for (const Named& nr : all_runs) {
            const double g0 = nr.res->series.rows.front()[col::gradrho_l2];
            const double gmax = column_max(nr.res->series, col::gradrho_l2);
            const double bound = 2.0 * g0 + 1e-10;
            worst = std::max(worst, gmax / bound);
            ok = ok && gmax <= bound;
        }
        verdict(9, "density gradient bound", ok, fmt("worst ||grad rho||/bound %.3f (<= 1)", worst));
    }

    // ------------------------------------------------------------------
    // 10. Particle moments against the finite-volume kinetic reference
    //     under the prescribed shear, at 1e5 markers.
    // ------------------------------------------------------------------
    {
        const FvComparisonResult fv = fv_particle_comparison(100000);
        const bool ok = fv.n_rel_l1 <= 0.03 && fv.j_rel_l1 <= 0.03 && fv.wall_seconds < 60.0;
        verdict(10, "finite-volume kinetic reference", ok,
                fmt("L1 errors n %.4f, j %.4f (<= 0.03), wall %.1f s (< 60)", fv.n_rel_l1, fv.j_rel_l1,
                    fv.wall_seconds));
    }

    // ------------------------------------------------------------------
    // 11. Conservation: particle mass is bitwise constant; fluid mass
    //     stays within a machine-roundoff envelope; the momentum drift
    //     per unit time shrinks by at least 40% per step halving.
    // ------------------------------------------------------------------
    {
        bool ok = true;
        double pm_worst = 0.0, fm_worst = 0.0;
        for (const Named& nr : all_runs) {
            const double pm0 = nr.res->series.rows.front()[col::mass_f];
            for (const auto& r : nr.res->series.rows)
                pm_worst = std::max(pm_worst, std::fabs(r[col::mass_f] - pm0));
            fm_worst = std::max(fm_worst, nr.res->trk.fluid_mass_drift_rel);
        }
        ok = ok && pm_worst == 0.0 && fm_worst <= 1e-12;

        const double m_coarse = c2_coarse.trk.momentum_drift / c2_coarse.t_end;
        const double m_mid = c2.trk.momentum_drift / c2.t_end;
        const double m_fine = c2_fine.trk.momentum_drift / c2_fine.t_end;
        const bool half1 = m_mid <= 0.6 * m_coarse || m_mid <= 1e-13;
        const bool half2 = m_fine <= 0.6 * m_mid || m_fine <= 1e-13;
        ok = ok && half1 && half2;
        verdict(11, "mass + momentum conservation", ok,
                fmt("particle-mass drift %.2g (== 0), fluid-mass rel drift %.2g (<= 1e-12), momentum/t %.3g -> %.3g -> %.3g",
                    pm_worst, fm_worst, m_coarse, m_mid, m_fine));
    }

    // ------------------------------------------------------------------
    // 12. Determinism: the diagnostic series written by a 1-thread run
    //     and a 4-thread run of the same configuration must be byte
    //     identical.
    // ------------------------------------------------------------------
    {
        SimConfig cfg = scenario_config("coupled-2d");
        cfg.snapshot_every = 0;
        cfg.t_end = 0.5;
        cfg.out_dir = "out/acceptance/threads-1";
        set_thread_count(1);
        run_simulation_any(cfg, /*write_outputs=*/true);
        cfg.out_dir = "out/acceptance/threads-4";
        set_thread_count(4);
        run_simulation_any(cfg, /*write_outputs=*/true);
        set_thread_count(1);
        const std::string s1 = read_file("out/acceptance/threads-1/series.csv");
        const std::string s4 = read_file("out/acceptance/threads-4/series.csv");
        verdict(12, "thread-count determinism", !s1.empty() && s1 == s4,
                fmt("series.csv bytes: %zu vs %zu, %s", s1.size(), s4.size(),
                    s1 == s4 ? "identical" : "DIFFER"));
    }

    std::printf("acceptance: %d of 12 criteria passed\n", 12 - g_failed);
    return g_failed;
}
