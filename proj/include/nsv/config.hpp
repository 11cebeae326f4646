// Run configuration: JSON schema, validation, derived quantities.
//
// Top-level objects are exactly {domain, fluid, kinetic, theory, output};
// unknown keys anywhere are a hard error so typos cannot silently fall
// back to defaults.  Validation failures name the offending key.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace nsv {

enum class Scenario { vacuum_blob, uniform, custom_table };

std::string scenario_name(Scenario s);

struct SimConfig {
    // domain
    int dim = 3;                  // 2 or 3
    double box = 1.0;             // L
    std::int64_t cells = 32;      // N per axis
    double dt = 5e-3;
    double t_end = 1.0;

    // fluid
    double mu = 1.0;                                   // viscosity
    Scenario scenario = Scenario::vacuum_blob;
    double rho_max = 1.0;                              // peak initial density
    std::array<double, 3> rho_center{0.5, 0.5, 0.5};   // blob centre
    double rho_radius = 0.25;                          // blob support radius
    double u0_amplitude = 0.0;                         // peak |u0|
    std::array<double, 3> u0_center{0.5, 0.5, 0.5};
    double u0_radius = 0.3;                            // stream-bump radius
    std::string table_path;                            // custom-table scenario
    double eps_lin = 1e-9;                             // momentum residual tol
    double eps_div = 1e-10;                            // divergence tol
    int max_solver_iters = 400;
    bool freeze_fluid = false;                         // keep u fixed at u0 (drag-only studies)

    // kinetic
    double kappa = 1.0;                                // drag coefficient
    std::int64_t particles = 1;                        // requested marker count (>= 1)
    std::uint64_t seed = 0;
    double f_mass = 0.0;                               // total phase-space mass of f0 (0 = no particles)
    std::array<double, 3> f_center{0.5, 0.5, 0.5};
    double f_radius = 0.2;                             // spatial support radius of f0
    double v_radius = 0.25;                            // velocity support radius R0

    // theory
    std::optional<double> sobolev_const;               // default: sharp 3-D constant
    std::optional<double> cstar;                       // default: kinetic ceiling from f0
    double smallness_margin = 1.0;                     // epsilon_0 in the smallness ratio
    std::optional<double> fit_t0, fit_t1;              // rate-fit window
    double slack = 0.05;                               // one-sided rate slack
    double tol = 0.05;                                 // pointwise envelope tolerance

    // output
    std::string out_dir = "out";
    std::int64_t snapshot_every = 0;                   // steps between particle snapshots (0 = off)

    // derived
    double h() const { return box / static_cast<double>(cells); }
    std::int64_t steps() const;
    bool has_particles() const { return f_mass > 0.0; }
};

// Parse + validate a JSON document (text).  `origin` is used in messages.
SimConfig parse_config(const std::string& json_text, const std::string& origin);
SimConfig load_config_file(const std::string& path);

// Full validation; throws SimError(config) naming the first offending key.
void validate_config(const SimConfig& c);

// JSON echo of the configuration (used in report.json).
std::string config_to_json(const SimConfig& c);

}  // namespace nsv
