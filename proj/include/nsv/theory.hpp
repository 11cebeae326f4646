// Decay-rate constants and smallness bookkeeping.
//
// Given the dissipation scales (mu, kappa), the L^{3/2} norm of the
// initial fluid density, and the closed-form norms of the initial
// particle distribution, this module evaluates:
//   * the sharp Sobolev constant used by default,
//   * the kinetic moment ceiling C_* and the uniform moment ceilings,
//   * the energy decay rate alpha and the auxiliary rates alpha1, alpha2
//     governing the kinetic moments and the velocity-support radius,
//   * the smallness ratio sigma comparing the initial energy with the
//     admissible budget min(mu^{10/7}, mu^{13}) kappa^{-16} eps0.
// All values are plain arithmetic on the inputs; nothing here touches the
// grid, so the module is exactly reproducible and cheap to audit.

#pragma once

#include <optional>

#include "nsv/profiles.hpp"

namespace nsv {

// Sharp constant in ||u||_{L^6(R^3)}^2 <= C ||grad u||_{L^2}^2, i.e. the
// square of the optimal Sobolev embedding constant: (2/pi)^(4/3) / 3.
double sharp_sobolev_constant();

struct TheoryConstants {
    double mu = 0.0;
    double kappa = 0.0;
    double cs = 0.0;          // Sobolev constant in use
    double cstar = 0.0;       // moment ceiling constant in use
    double rho0_l32 = 0.0;    // ||rho_0||_{L^{3/2}}
    double alpha = 0.0;       // energy decay rate
    double alpha1 = 0.0;      // auxiliary fluid rate
    double alpha2 = 0.0;      // kinetic moment / support decay rate
    double sigma = 0.0;       // smallness ratio (<= 1 inside the theory regime)
    double ceiling_n = 0.0;   // uniform bound claimed for sup_x n_f
    double ceiling_j = 0.0;   //   "        "        "    sup_x |j_f|
    double ceiling_e = 0.0;   //   "        "        "    sup_x e_f
    bool kappa_at_least_one = true;
    bool within_smallness = true;  // sigma <= 1
};

// eps0 is the configured smallness margin; cs_override / cstar_override
// replace the defaults when the user pins them in the config.
TheoryConstants theory_constants(double mu, double kappa, double rho0_l32, const KineticNorms& f0, double E0,
                                 double eps0, std::optional<double> cs_override, std::optional<double> cstar_override);

// The energy decay rate for an arbitrary moment ceiling constant; used to
// re-evaluate alpha with the ceiling realised along a run.
double alpha_rate(double mu, double kappa, double cs, double rho0_l32, double cstar);

}  // namespace nsv
