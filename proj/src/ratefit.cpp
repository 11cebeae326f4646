#include "nsv/ratefit.hpp"

#include <algorithm>
#include <cmath>

#include "nsv/error.hpp"
#include "nsv/io_util.hpp"

namespace nsv {

RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
    if (t.size() != y.size()) fail_numerics("rate fit: time and value arrays differ in length");
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        if (!(y[i] > 0.0))
            fail_numerics("rate fit: sample at t = " + format_double(t[i]) +
                          " is not strictly positive (value " + format_double(y[i]) + ")");
        ts.push_back(t[i]);
        ls.push_back(std::log(y[i]));
    }
    if (ts.size() < 3)
        fail_numerics("rate fit: window [" + format_double(t0) + ", " + format_double(t1) + "] holds only " +
                      std::to_string(ts.size()) + " samples (need at least 3)");

    const double n = static_cast<double>(ts.size());
    double st = 0.0, sl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
    }
    const double tbar = st / n, lbar = sl / n;
    double stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double dt = ts[i] - tbar;
        stt += dt * dt;
        stl += dt * (ls[i] - lbar);
    }
    if (!(stt > 0.0)) fail_numerics("rate fit: degenerate window (all samples at one time)");

    RateFit f;
    const double slope = stl / stt;
    f.lambda = -slope;
    f.log_prefactor = lbar - slope * tbar;
    f.samples = static_cast<int>(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double fit = f.log_prefactor + slope * ts[i];
        f.max_rel_residual = std::max(f.max_rel_residual, std::fabs(std::expm1(fit - ls[i])));
    }
    return f;
}

namespace {

bool column_positive_in_window(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1,
                               int& count) {
    count = 0;
    bool pos = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        ++count;
        if (!(y[i] > 0.0)) pos = false;
    }
    return pos && count >= 3;
}

}  // namespace

std::vector<VerdictRow> decay_report(const SeriesTable& series, const TheoryConstants& th,
                                     const DecayReportOptions& opts) {
    std::vector<VerdictRow> rows;
    if (series.size() < 2) return rows;

    const std::vector<double> t = series.column(col::t);
    const double t_end = t.back();
    double t0 = opts.t0 ? *opts.t0 : std::max(1.0, 5.0 * opts.dt);
    double t1 = opts.t1 ? *opts.t1 : t_end;
    if (t0 >= t1) t0 = 0.5 * t1;  // degenerate default window on short runs

    auto rate_row = [&](const std::string& name, int column, double claimed) {
        const std::vector<double> y = series.column(column);
        int cnt = 0;
        if (!column_positive_in_window(t, y, t0, t1, cnt)) return;  // nothing meaningful to fit
        const RateFit f = fit_exponential(t, y, t0, t1);
        VerdictRow r;
        r.check = name;
        r.claimed_rate = claimed;
        r.fitted_rate = f.lambda;
        r.pass = f.lambda >= claimed * (1.0 - opts.slack);
        rows.push_back(r);
    };

    // Pointwise energy envelope E(t) <= exp(-2 alpha t) E(0) (1 + tol).
    {
        const std::vector<double> e = series.column(col::E);
        if (e.front() > 0.0) {
            bool ok = true;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const double envelope = e.front() * std::exp(-2.0 * th.alpha * t[i]) * (1.0 + opts.tol);
                if (e[i] > envelope) {
                    ok = false;
                    break;
                }
            }
            VerdictRow r;
            r.check = "E_envelope";
            r.claimed_rate = 2.0 * th.alpha;
            int cnt = 0;
            r.fitted_rate = column_positive_in_window(t, e, t0, t1, cnt) ? fit_exponential(t, e, t0, t1).lambda : 0.0;
            r.pass = ok;
            rows.push_back(r);
        }
    }

    rate_row("E_rate", col::E, 2.0 * th.alpha);
    rate_row("E_rate_alt", col::E, th.alpha1);
    if (opts.has_particles) {
        rate_row("R_supp_rate", col::R_supp, th.alpha2);
        rate_row("jf_rate", col::sup_jf, th.alpha2);
        rate_row("ef_rate", col::sup_ef, th.alpha2);
        rate_row("w1_rate", col::w1_sur, th.alpha2);
    }
    return rows;
}

std::string verdicts_to_csv(const std::vector<VerdictRow>& rows) {
    std::string out = "check,claimed_rate,fitted_rate,pass\n";
    for (const VerdictRow& r : rows) {
        out += r.check;
        out += ',';
        out += format_double(r.claimed_rate);
        out += ',';
        out += format_double(r.fitted_rate);
        out += ',';
        out += r.pass ? "true" : "false";
        out += '\n';
    }
    return out;
}

}  // namespace nsv
