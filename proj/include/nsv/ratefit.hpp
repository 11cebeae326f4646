// Exponential rate fitting on diagnostic series and the claimed-vs-fitted
// decay verdicts.
//
// Fits are ordinary least squares on log(y) over a time window; the
// comparison against a claimed rate is one-sided (fitted decay at least
// (1 - slack) times the claim), because the theory provides lower bounds
// on decay, never upper bounds.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsv/series.hpp"
#include "nsv/theory.hpp"

namespace nsv {

struct RateFit {
    double lambda = 0.0;            // decay rate: y ~ exp(-lambda t)
    double log_prefactor = 0.0;     // intercept of the log fit
    double max_rel_residual = 0.0;  // max |exp(fit - log y) - 1| over the window
    int samples = 0;
};

// Requires at least three strictly positive samples inside [t0, t1].
RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1);

struct VerdictRow {
    std::string check;
    double claimed_rate = 0.0;
    double fitted_rate = 0.0;
    bool pass = false;
};

struct DecayReportOptions {
    double tol = 0.05;    // pointwise envelope allowance (1 + tol)
    double slack = 0.05;  // one-sided rate slack
    std::optional<double> t0, t1;  // fit window; default [max(1, 5 dt), t_end]
    double dt = 0.0;
    bool has_particles = true;
};

// Claimed-vs-fitted decay checks on a finished series.  Rows for
// quantities that are identically zero (for example kinetic moments of a
// particle-free run) are omitted rather than fitted against noise.
std::vector<VerdictRow> decay_report(const SeriesTable& series, const TheoryConstants& th,
                                     const DecayReportOptions& opts);

std::string verdicts_to_csv(const std::vector<VerdictRow>& rows);

}  // namespace nsv
