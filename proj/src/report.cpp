#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "nsv/coupler.hpp"

namespace nsv {

using nlohmann::json;

namespace {

json series_row_json(const SeriesTable::Row& r) {
    json j;
    for (int c = 0; c < col::count; ++c) j[series_column_name(c)] = r[static_cast<std::size_t>(c)];
    return j;
}

double column_max(const SeriesTable& s, int c) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& r : s.rows) m = std::max(m, r[static_cast<std::size_t>(c)]);
    return m;
}

}  // namespace

std::string report_to_json(const SimConfig& cfg, const RunResult& res) {
    json root;

    {
        json r;
        r["dimension"] = res.dim;
        r["cells"] = res.cells;
        r["box_length"] = cfg.box;
        r["dt"] = res.dt;
        r["t_end"] = res.t_end;
        r["steps"] = res.steps;
        r["seed"] = cfg.seed;
        r["scenario"] = scenario_name(cfg.scenario);
        r["frozen_fluid"] = res.frozen_fluid;
        r["particles"] = cfg.particles;
        r["has_particles"] = res.has_particles;
        r["threads"] = res.threads;
        r["wall_seconds"] = res.wall_seconds;
        root["run"] = r;
    }
    {
        const TheoryConstants& t = res.theory;
        json r;
        r["sobolev_const"] = t.cs;
        r["cstar"] = t.cstar;
        r["cstar_realized"] = res.trk.nf_l32_max;
        r["rho0_l32"] = t.rho0_l32;
        r["alpha"] = t.alpha;
        r["alpha_realized"] = alpha_rate(t.mu, t.kappa, t.cs, t.rho0_l32, res.trk.nf_l32_max);
        r["alpha1"] = t.alpha1;
        r["alpha2"] = t.alpha2;
        r["sigma"] = t.sigma;
        r["within_smallness"] = t.within_smallness;
        r["kappa_at_least_one"] = t.kappa_at_least_one;
        r["ceiling_n"] = t.ceiling_n;
        r["ceiling_j"] = t.ceiling_j;
        r["ceiling_e"] = t.ceiling_e;
        root["theory"] = r;
    }
    {
        const InitialSummary& i = res.init;
        json r;
        r["energy"] = i.energy;
        r["energy_fluid"] = i.energy_fluid;
        r["energy_particles"] = i.energy_particles;
        r["drag_mismatch"] = i.mismatch;
        r["gradu_l2"] = i.gradu_l2;
        r["rho_mass"] = i.rho_mass;
        r["rho_l32"] = i.rho_l32;
        r["rho_linf"] = i.rho_linf;
        r["gradrho_l2"] = i.gradrho_l2;
        r["u_max"] = i.u_max;
        r["support_radius"] = i.support_radius;
        r["f0_mass"] = i.f0.mass;
        r["f0_linfx_l1v"] = i.f0.n_base;
        r["f0_weighted_j"] = i.f0.j_base;
        r["f0_weighted_e"] = i.f0.e_base;
        root["initial"] = r;
    }
    if (!res.series.rows.empty()) {
        root["final"] = series_row_json(res.series.rows.back());
        const SeriesTable::Row& last = res.series.rows.back();
        json b;
        b["B1"] = last[col::B1];
        b["B2"] = last[col::B2];
        b["B3"] = last[col::B3];
        const double total = last[col::B1] + last[col::B2] + last[col::B3];
        b["total"] = total;
        b["within_budget"] = total <= 1.0;
        root["budget"] = b;

        json c;
        c["max_sup_nf"] = column_max(res.series, col::sup_nf);
        c["max_sup_jf"] = column_max(res.series, col::sup_jf);
        c["max_sup_ef"] = column_max(res.series, col::sup_ef);
        c["ok"] = res.has_particles ? (c["max_sup_nf"].get<double>() <= res.theory.ceiling_n &&
                                       c["max_sup_jf"].get<double>() <= res.theory.ceiling_j &&
                                       c["max_sup_ef"].get<double>() <= res.theory.ceiling_e)
                                    : true;
        root["ceilings"] = c;

        // Coercivity D >= 2 alpha E scanned over all samples, with both the
        // configured ceiling constant and the realised one.
        const double alpha_real = alpha_rate(res.theory.mu, res.theory.kappa, res.theory.cs, res.theory.rho0_l32,
                                             res.trk.nf_l32_max);
        double min_cfg = std::numeric_limits<double>::infinity();
        double min_real = std::numeric_limits<double>::infinity();
        bool any_zero_energy = false;
        for (const auto& r : res.series.rows) {
            const double E = r[col::E], Dv = r[col::Dfun];
            if (E <= 0.0) {
                any_zero_energy = true;
                continue;
            }
            min_cfg = std::min(min_cfg, coercivity_ratio(E, Dv, res.theory.alpha));
            min_real = std::min(min_real, coercivity_ratio(E, Dv, alpha_real));
        }
        json co;
        co["min_ratio_alpha"] = min_cfg;
        co["min_ratio_alpha_realized"] = min_real;
        co["zero_energy_samples"] = any_zero_energy;
        root["coercivity"] = co;

        // Concentration surrogate against its Cauchy-Schwarz bound.
        double worst = 0.0;
        for (const auto& r : res.series.rows) {
            const double bound = w1_moment_bound(r[col::mass_f], r[col::E]);
            if (bound > 0.0) worst = std::max(worst, r[col::w1_sur] / bound);
            else if (r[col::w1_sur] > 0.0) worst = std::numeric_limits<double>::infinity();
        }
        json w;
        w["final_moment"] = last[col::w1_sur];
        w["final_bound"] = w1_moment_bound(last[col::mass_f], last[col::E]);
        w["max_ratio_over_bound"] = worst;
        root["concentration"] = w;

        // Density gradient control relative to the initial value.
        const double g0 = res.series.rows.front()[col::gradrho_l2];
        json gd;
        gd["initial"] = g0;
        gd["max"] = column_max(res.series, col::gradrho_l2);
        gd["max_ratio"] = g0 > 0.0 ? gd["max"].get<double>() / g0 : (gd["max"].get<double>() > 0.0 ? -1.0 : 1.0);
        root["grad_density"] = gd;
    }
    {
        const RunTrackers& k = res.trk;
        json c;
        c["particle_mass_initial"] = res.series.rows.empty() ? 0.0 : res.series.rows.front()[col::mass_f];
        double pm_drift = 0.0;
        if (!res.series.rows.empty()) {
            const double m0 = res.series.rows.front()[col::mass_f];
            for (const auto& r : res.series.rows) pm_drift = std::max(pm_drift, std::fabs(r[col::mass_f] - m0));
        }
        c["particle_mass_max_abs_drift"] = pm_drift;
        c["fluid_mass_initial"] = k.fluid_mass_initial;
        c["fluid_mass_max_rel_drift"] = k.fluid_mass_drift_rel;
        c["momentum_initial"] = k.momentum_initial;
        c["momentum_max_drift"] = k.momentum_drift;
        root["conservation"] = c;

        json mp;
        mp["rho_min"] = k.rho_min;
        mp["rho_max"] = k.rho_max;
        mp["rho_max_initial"] = k.rho_max_initial;
        root["max_principle"] = mp;

        json tr;
        tr["max_rho_l32_step_increase"] = k.max_rho_l32_increase;
        tr["max_courant"] = k.max_courant;
        root["transport"] = tr;

        json en;
        en["max_step_violation"] = k.max_energy_violation;
        en["quadratic_envelope_coeff"] = res.dt > 0.0 ? k.max_energy_violation / (res.dt * res.dt) : 0.0;
        root["energy_inequality"] = en;

        json cs;
        cs["max_jj_over_2ne"] = k.max_cs_ratio;
        root["cauchy_schwarz"] = cs;
    }
    {
        json v = json::array();
        for (const VerdictRow& r : res.verdicts) {
            json row;
            row["check"] = r.check;
            row["claimed_rate"] = r.claimed_rate;
            row["fitted_rate"] = r.fitted_rate;
            row["pass"] = r.pass;
            v.push_back(row);
        }
        root["verdicts"] = v;
        root["notes"] = res.notes;
    }
    root["config"] = json::parse(config_to_json(cfg));
    return root.dump(2) + "\n";
}

void write_report_json(const std::string& path, const SimConfig& cfg, const RunResult& res) {
    atomic_write_file(path, report_to_json(cfg, res));
}

RunResult run_simulation_any(const SimConfig& cfg, bool write_outputs) {
    if (cfg.dim == 2) return run_simulation<2>(cfg, nullptr, write_outputs);
    return run_simulation<3>(cfg, nullptr, write_outputs);
}

}  // namespace nsv
