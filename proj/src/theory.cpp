#include "nsv/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsv/error.hpp"

namespace nsv {

double sharp_sobolev_constant() {
    // Talenti's optimal constant for ||u||_{L^6(R^3)} <= S ||grad u||_{L^2}:
    // S = 4^(1/3) / (sqrt(3) pi^(2/3)), so S^2 = (2/pi)^(4/3) / 3.
    constexpr double pi = 3.14159265358979323846;
    return std::pow(2.0 / pi, 4.0 / 3.0) / 3.0;
}

double alpha_rate(double mu, double kappa, double cs, double rho0_l32, double cstar) {
    return std::min(mu, kappa) / (2.0 + cs * (rho0_l32 + 2.0 * cstar));
}

TheoryConstants theory_constants(double mu, double kappa, double rho0_l32, const KineticNorms& f0, double E0,
                                 double eps0, std::optional<double> cs_override,
                                 std::optional<double> cstar_override) {
    if (!(mu > 0.0) || !(kappa > 0.0)) fail_config("theory constants need positive viscosity and drag");
    TheoryConstants t;
    t.mu = mu;
    t.kappa = kappa;
    t.rho0_l32 = rho0_l32;
    t.cs = cs_override ? *cs_override : sharp_sobolev_constant();

    // Kinetic ceiling constant: twice the interpolation bound
    // ||f||_{L1}^{2/3} ||f||_{L1_v(Linf_x)}^{1/3} evaluated on f0.
    const double interp = (f0.mass > 0.0) ? std::pow(f0.mass, 2.0 / 3.0) * std::cbrt(f0.n_base) : 0.0;
    t.cstar = cstar_override ? *cstar_override : 2.0 * interp;

    t.alpha = alpha_rate(mu, kappa, t.cs, rho0_l32, t.cstar);
    t.alpha1 = std::min(mu, 1.0) / (2.0 + t.cs * (rho0_l32 + 4.0 * interp));
    t.alpha2 = std::min(0.5 * kappa, 0.25 * t.alpha1);

    // Uniform moment ceilings: twice the corresponding initial norms.
    t.ceiling_n = 2.0 * f0.n_base;
    t.ceiling_j = 2.0 * f0.j_base;
    t.ceiling_e = 2.0 * f0.e_base;

    // Smallness ratio against E0 <= min(mu^{10/7}, mu^{13}) kappa^{-16} eps0.
    const double budget = std::min(std::pow(mu, 10.0 / 7.0), std::pow(mu, 13.0)) * std::pow(kappa, -16.0) * eps0;
    t.sigma = budget > 0.0 ? E0 / budget : std::numeric_limits<double>::infinity();
    t.within_smallness = t.sigma <= 1.0;
    t.kappa_at_least_one = kappa >= 1.0;
    return t;
}

}  // namespace nsv
