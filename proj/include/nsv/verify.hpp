// Built-in verification: reference scenarios with known analytic structure,
// property checks on finished runs, and canned oracle cross-checks.
//
// Each reference scenario is a complete embedded configuration chosen so
// that some part of the dynamics has a closed-form answer (pure drag decay,
// single-mode viscous decay) or a theory-level guarantee (moment ceilings,
// coercivity, concentration) that the run must reproduce.  `verify` runs
// them, evaluates rate verdicts and property checks, writes the per-run
// output files plus verdicts.csv, and reports one PASS/FAIL line per check.

#pragma once

#include <string>
#include <vector>

#include "nsv/config.hpp"
#include "nsv/coupler.hpp"

namespace nsv {

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::string config_json;
    double momentum_bound;  // scenario-specific drift allowance
};

const std::vector<ScenarioInfo>& reference_scenarios();

struct PropertyCheck {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool lower_is_fail = false;  // true: pass iff measured >= bound
    bool pass = false;
};

// Dimension-agnostic checks every finished run must satisfy (conservation,
// positivity, divergence, ceilings, coercivity, concentration).
std::vector<PropertyCheck> standard_property_checks(const SimConfig& cfg, const RunResult& res,
                                                    double momentum_bound);

struct VerifyOptions {
    std::string scenario_filter;  // empty = all scenarios
    std::string config_path;      // run the suite on this config instead of the scenarios
    std::string fault = "none";   // "none" or "no-projection"
    std::string out_root = "verify_out";
};

// Returns the number of failed checks (0 = everything passed).
int run_verification(const VerifyOptions& opts);

// Canned oracle cross-checks (characteristics, transport distance, dense
// solve, finite-volume kinetics, jacobian probe); returns failure count.
int run_oracle_checks(const std::string& filter);

// Worst relative error of the production pusher against the closed-form
// characteristics over n_cases spanning drag numbers from 1e-6 to 1e3.
double characteristics_max_rel_error(int n_cases);

// Moment-level comparison of the 1d1v particle evolution under a
// prescribed shear profile against the finite-volume reference.
struct FvComparisonResult {
    double n_rel_l1 = 0.0;   // ||n_part - n_fv||_L1 / mass
    double j_rel_l1 = 0.0;   // ||j_part - j_fv||_L1 / (mass * v_radius)
    double wall_seconds = 0.0;
};
FvComparisonResult fv_particle_comparison(std::int64_t n_particles);

}  // namespace nsv
