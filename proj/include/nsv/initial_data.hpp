// Initial data: density scenarios, a discretely divergence-free velocity
// from staggered stream potentials, and low-discrepancy particle sampling
// of the product phase-space bump.
//
// The velocity is built as a discrete curl, so its staggered divergence
// vanishes by telescoping before the Leray projection even runs; the
// projection only strips roundoff.  Particle velocities are sampled in
// antithetic pairs (v_{2m+1} = -v_{2m}), which leaves the distribution
// unchanged (the velocity profile is radially symmetric) and makes the
// initial total particle momentum vanish exactly for even counts.

#pragma once

#include <string>

#include "nsv/config.hpp"
#include "nsv/error.hpp"
#include "nsv/fields.hpp"
#include "nsv/fluid.hpp"
#include "nsv/functionals.hpp"
#include "nsv/geometry.hpp"
#include "nsv/io_util.hpp"
#include "nsv/kinetic.hpp"
#include "nsv/profiles.hpp"
#include "nsv/spectral.hpp"

namespace nsv {

template <int D>
struct InitialData {
    ScalarField rho;
    FaceField<D> u;
    ParticleEnsemble<D> ens;
};

// Dimension-free summary frozen into report.json.
struct InitialSummary {
    double energy = 0.0;          // E(0), discrete
    double energy_fluid = 0.0;
    double energy_particles = 0.0;
    double mismatch = 0.0;        // sum w |u0(x_p) - v_p|^2
    double gradu_l2 = 0.0;
    double rho_mass = 0.0;
    double rho_l32 = 0.0;
    double rho_linf = 0.0;
    double gradrho_l2 = 0.0;
    double u_max = 0.0;           // max |face value|
    double support_radius = 0.0;  // max sampled |v|
    KineticNorms f0;              // closed-form norms of the analytic f0
};

// ---------------------------------------------------------------------------
// Density scenarios
// ---------------------------------------------------------------------------

template <int D>
inline ScalarField initial_density(const Grid<D>& g, const SimConfig& cfg) {
    ScalarField rho(g.cells(), 0.0);
    if (cfg.scenario == Scenario::uniform) {
        for (double& v : rho) v = cfg.rho_max;
        return rho;
    }
    if (cfg.scenario == Scenario::vacuum_blob) {
        for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
            const Vec<D> x = g.cell_center(iv);
            double r2 = 0.0;
            for (int a = 0; a < D; ++a) {
                const double d = x[a] - cfg.rho_center[a];
                r2 += d * d;
            }
            rho[lin] = cfg.rho_max * bump(std::sqrt(r2) / cfg.rho_radius);
        });
        return rho;
    }
    // custom-table: CSV with header x1,..,xd,value covering every cell
    // centre exactly once.
    const CsvTable t = read_csv(cfg.table_path);
    std::vector<std::string> want;
    for (int a = 0; a < D; ++a) want.push_back("x" + std::to_string(a + 1));
    want.push_back("value");
    if (t.header != want) {
        std::string got;
        for (std::size_t i = 0; i < t.header.size(); ++i) got += (i ? "," : "") + t.header[i];
        fail_config("density table " + cfg.table_path + " must have header x1,..,x" + std::to_string(D) +
                    ",value (got '" + got + "')");
    }
    std::vector<char> seen(g.cells(), 0);
    std::size_t filled = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != static_cast<std::size_t>(D + 1))
            fail_config("density table row " + std::to_string(r + 2) + " has " + std::to_string(row.size()) +
                        " fields, expected " + std::to_string(D + 1));
        IVec<D> iv{};
        for (int a = 0; a < D; ++a) {
            const double x = parse_double_strict(row[static_cast<std::size_t>(a)], "density table coordinate");
            const double s = x / g.h - 0.5;
            const double rs = std::nearbyint(s);
            if (std::fabs(s - rs) > 1e-9 * static_cast<double>(g.n) || rs < 0.0 || rs >= static_cast<double>(g.n))
                fail_config("density table row " + std::to_string(r + 2) +
                            ": coordinate " + row[static_cast<std::size_t>(a)] + " is not a cell centre");
            iv[a] = static_cast<std::int64_t>(rs);
        }
        const double val = parse_double_strict(row[static_cast<std::size_t>(D)], "density table value");
        if (!(val >= 0.0)) fail_config("density table row " + std::to_string(r + 2) + ": value must be nonnegative");
        const std::size_t lin = g.index(iv);
        if (seen[lin]) fail_config("density table row " + std::to_string(r + 2) + ": duplicate cell centre");
        seen[lin] = 1;
        rho[lin] = val;
        ++filled;
    }
    if (filled != g.cells())
        fail_config("density table " + cfg.table_path + " covers " + std::to_string(filled) + " of " +
                    std::to_string(g.cells()) + " cell centres");
    return rho;
}

// ---------------------------------------------------------------------------
// Velocity from stream potentials
// ---------------------------------------------------------------------------

template <int D>
inline FaceField<D> initial_velocity(const Grid<D>& g, const SimConfig& cfg, Spectral<D>& spec) {
    FaceField<D> u(g);
    if (cfg.u0_amplitude <= 0.0) return u;

    auto psi = [&](const Vec<D>& x) {
        double r2 = 0.0;
        for (int a = 0; a < D; ++a) {
            const double d = x[a] - cfg.u0_center[a];
            r2 += d * d;
        }
        return bump(std::sqrt(r2) / cfg.u0_radius);
    };
    const double inv_h = 1.0 / g.h;

    if constexpr (D == 1) {
        // A periodic 1-D divergence-free field is constant; there is no
        // localised incompressible flow to build.  Used only by oracles.
        fail_config("u0_amplitude must be 0 in one dimension");
    } else if constexpr (D == 2) {
        // u = (d2 psi, -d1 psi) with psi on the corner lattice (i h, j h).
        for_each_cell(g, [&](const IVec<2>& iv, std::size_t lin) {
            const double x0 = static_cast<double>(iv[0]) * g.h;
            const double x1 = static_cast<double>(iv[1]) * g.h;
            const double p00 = psi({x0, x1});
            const double p10 = psi({x0 + g.h, x1});
            const double p01 = psi({x0, x1 + g.h});
            u[0][lin] = (p01 - p00) * inv_h;
            u[1][lin] = -(p10 - p00) * inv_h;
        });
    } else {
        // Two edge potentials: Psi_z on (i h, j h, (k+1/2) h) gives
        // (d2 Psi_z, -d1 Psi_z, 0); Psi_y on (i h, (j+1/2) h, k h) gives
        // (-d3 Psi_y, 0, d1 Psi_y).  Each discrete curl telescopes to a
        // divergence-free staggered field.
        for_each_cell(g, [&](const IVec<3>& iv, std::size_t lin) {
            const double x0 = static_cast<double>(iv[0]) * g.h;
            const double x1 = static_cast<double>(iv[1]) * g.h;
            const double x2 = static_cast<double>(iv[2]) * g.h;
            const double zc = x2 + 0.5 * g.h;  // Psi_z node height
            const double yc = x1 + 0.5 * g.h;  // Psi_y node offset
            // u_x = d2 Psi_z - d3 Psi_y at (x0, x1 + h/2, x2 + h/2)
            u[0][lin] = (psi({x0, x1 + g.h, zc}) - psi({x0, x1, zc})) * inv_h -
                        (psi({x0, yc, x2 + g.h}) - psi({x0, yc, x2})) * inv_h;
            // u_y = -d1 Psi_z at (x0 + h/2, x1, x2 + h/2)
            u[1][lin] = -(psi({x0 + g.h, x1, zc}) - psi({x0, x1, zc})) * inv_h;
            // u_z = d1 Psi_y at (x0 + h/2, x1 + h/2, x2)
            u[2][lin] = (psi({x0 + g.h, yc, x2}) - psi({x0, yc, x2})) * inv_h;
        });
    }

    spec.leray_project(u);  // strips only roundoff; the curl is discretely solenoidal
    const double vmax = ff_max_abs(u);
    if (vmax > 0.0) ff_scale(u, cfg.u0_amplitude / vmax);
    return u;
}

// ---------------------------------------------------------------------------
// Particle sampling
// ---------------------------------------------------------------------------

template <int D>
inline Vec<D> direction_from_uniforms([[maybe_unused]] double u1, [[maybe_unused]] double u2) {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    Vec<D> dir{};
    if constexpr (D == 1) {
        dir[0] = (u1 < 0.5) ? -1.0 : 1.0;
    } else if constexpr (D == 2) {
        dir[0] = std::cos(two_pi * u1);
        dir[1] = std::sin(two_pi * u1);
    } else {
        const double z = 2.0 * u1 - 1.0;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        dir[0] = s * std::cos(two_pi * u2);
        dir[1] = s * std::sin(two_pi * u2);
        dir[2] = z;
    }
    return dir;
}

template <int D>
inline ParticleEnsemble<D> sample_particles(const Grid<D>& g, const SimConfig& cfg) {
    ParticleEnsemble<D> ens;
    if (!cfg.has_particles()) return ens;
    const std::size_t np = static_cast<std::size_t>(cfg.particles);
    ens.x.resize(np);
    ens.v.resize(np);
    ens.w.assign(np, cfg.f_mass / static_cast<double>(np));

    const std::uint64_t start = 1 + (cfg.seed % 1048576) * 64;
    Vec<D> vprev{};
    for (std::size_t p = 0; p < np; ++p) {
        const std::uint64_t idx = start + p;
        const double rx = cfg.f_radius * bump_radius_from_uniform(D, halton(idx, 2));
        const Vec<D> dx = direction_from_uniforms<D>(halton(idx, 3), halton(idx, 5));
        for (int a = 0; a < D; ++a) ens.x[p][a] = g.wrap_position(cfg.f_center[a] + rx * dx[a]);
        if (p % 2 == 1) {
            // antithetic partner: exact momentum cancellation pairwise
            for (int a = 0; a < D; ++a) ens.v[p][a] = -vprev[a];
        } else {
            const double rv = cfg.v_radius * bump_radius_from_uniform(D, halton(idx, 7));
            const Vec<D> dv = direction_from_uniforms<D>(halton(idx, 11), halton(idx, 13));
            for (int a = 0; a < D; ++a) ens.v[p][a] = rv * dv[a];
            vprev = ens.v[p];
        }
    }
    return ens;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

template <int D>
inline InitialData<D> make_initial_data(const SimConfig& cfg, Spectral<D>& spec, InitialSummary& out) {
    const Grid<D> g(cfg.cells, cfg.box);
    InitialData<D> data;
    data.rho = initial_density<D>(g, cfg);
    check_finite(data.rho, "initial density");
    data.u = initial_velocity<D>(g, cfg, spec);
    data.ens = sample_particles<D>(g, cfg);

    out.f0 = kinetic_profile_norms(D, cfg.f_mass, cfg.f_radius, cfg.v_radius);
    out.rho_mass = 0.0;
    for (double v : data.rho) out.rho_mass += v;
    out.rho_mass *= g.cell_volume();
    out.rho_l32 = cell_lp_norm(g, data.rho, 1.5);
    out.rho_linf = max_abs(data.rho);
    out.gradrho_l2 = cell_gradient_l2(g, data.rho);
    out.u_max = ff_max_abs(data.u);
    out.support_radius = support_radius(data.ens);
    out.energy_fluid = fluid_kinetic_energy(g, data.rho, data.u);
    out.energy_particles = particle_kinetic_energy(data.ens);
    out.energy = out.energy_fluid + out.energy_particles;
    out.gradu_l2 = velocity_gradient_norms(g, data.u).l2;
    std::vector<Vec<D>> u_at;
    interpolate_velocity(g, data.u, data.ens.x, u_at);
    out.mismatch = drag_mismatch(data.ens, u_at);

    // CFL of the realised initial data (the config-time guard used the
    // declared scales; this one uses the actual fields).
    const double vmax = std::max(out.u_max, out.support_radius);
    if (vmax > 0.0 && cfg.dt * vmax / g.h > 1.0)
        fail_config("key 'domain.dt': realised initial velocities violate the CFL guard (dt*vmax/h = " +
                    format_double(cfg.dt * vmax / g.h) + ")");
    return data;
}

}  // namespace nsv
