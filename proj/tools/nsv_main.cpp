// Command-line entry point.
//
//   nsv run    --config cfg.json          full simulation, outputs to the
//                                         configured directory
//   nsv verify [--scenario NAME]          built-in reference scenarios with
//              [--config cfg.json]        rate verdicts and property checks
//              [--fault no-projection]    (--config runs the same suite on a
//              [--out DIR]                user configuration)
//   nsv fit    --series series.csv        exponential rate fit on one
//              --column E --t0 1 --t1 2   diagnostic column, optionally
//              [--rate R] [--slack s]     judged against a claimed rate
//   nsv oracle [--check NAME]             independent reference cross-checks
//
// Exit codes: 0 success, 1 numerical/verification failure, 2 configuration
// or usage error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsv/config.hpp"
#include "nsv/coupler.hpp"
#include "nsv/error.hpp"
#include "nsv/io_util.hpp"
#include "nsv/ratefit.hpp"
#include "nsv/threading.hpp"
#include "nsv/verify.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    const nsv::SimConfig cfg = nsv::load_config_file(config_path);
    if (cfg.kappa < 1.0)
        std::printf("warning: drag coefficient %.6g below 1; moment-ceiling guarantees are informational\n",
                    cfg.kappa);
    const nsv::RunResult res = nsv::run_simulation_any(cfg);

    std::printf("run finished: %lld steps, dt %.6g, t_end %.6g, %.2f s wall, %d thread(s)\n",
                static_cast<long long>(res.steps), res.dt, res.t_end, res.wall_seconds, res.threads);
    const auto& last = res.series.rows.back();
    std::printf("  energy %.6g -> %.6g   dissipation rate alpha %.6g   smallness sigma %.6g\n",
                res.series.rows.front()[nsv::col::E], last[nsv::col::E], res.theory.alpha, res.theory.sigma);
    for (const std::string& n : res.notes) std::printf("  note: %s\n", n.c_str());
    int bad = 0;
    for (const auto& v : res.verdicts) {
        std::printf("  rate %-26s claimed %-12.6g fitted %-12.6g %s\n", v.check.c_str(), v.claimed_rate,
                    v.fitted_rate, v.pass ? "PASS" : "FAIL");
        if (!v.pass) ++bad;
    }
    std::printf("  outputs in %s (series.csv, solver_log.csv, report.json)\n", cfg.out_dir.c_str());
    return bad == 0 ? 0 : 1;
}

int cmd_fit(const std::string& series_path, const std::string& column, double t0, double t1, double claimed,
            bool has_claim, double slack) {
    const nsv::CsvTable tab = nsv::read_csv(series_path);
    const int tc = tab.column("t");
    const int yc = tab.column(column);
    if (tc < 0) nsv::fail_config("series file " + series_path + " has no 't' column");
    if (yc < 0) nsv::fail_config("series file " + series_path + " has no '" + column + "' column");
    std::vector<double> t, y;
    t.reserve(tab.rows.size());
    y.reserve(tab.rows.size());
    for (const auto& row : tab.rows) {
        t.push_back(nsv::parse_double_strict(row[static_cast<std::size_t>(tc)], "t"));
        y.push_back(nsv::parse_double_strict(row[static_cast<std::size_t>(yc)], column));
    }
    const nsv::RateFit fit = nsv::fit_exponential(t, y, t0, t1);
    std::printf("fit %s over [%.6g, %.6g]: rate %.10g (%d samples, max relative residual %.3g)\n", column.c_str(),
                t0, t1, fit.lambda, fit.samples, fit.max_rel_residual);
    if (!has_claim) return 0;
    const bool pass = fit.lambda >= claimed * (1.0 - slack);
    std::printf("claimed %.10g, slack %.3g: %s\n", claimed, slack, pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vacuum-capable fluid/kinetic drag simulator and verification harness"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads for particle maps (0 = NSV_THREADS or 1)");

    auto* run = app.add_subcommand("run", "run a configured simulation");
    std::string config_path;
    run->add_option("--config", config_path, "JSON configuration file")->required();

    auto* verify = app.add_subcommand("verify", "run the built-in reference scenarios");
    nsv::VerifyOptions vopts;
    verify->add_option("--scenario", vopts.scenario_filter, "run only the named scenario");
    verify->add_option("--config", vopts.config_path, "run the property suite on this configuration instead");
    verify->add_option("--fault", vopts.fault, "inject a fault (none, no-projection)");
    verify->add_option("--out", vopts.out_root, "output root directory");

    auto* fit = app.add_subcommand("fit", "fit an exponential rate to a series column");
    std::string series_path, column = "E";
    double t0 = 0.0, t1 = 0.0, claimed = 0.0, slack = 0.05;
    fit->add_option("--series", series_path, "series.csv produced by a run")->required();
    fit->add_option("--column", column, "column name (default E)");
    fit->add_option("--t0", t0, "window start")->required();
    fit->add_option("--t1", t1, "window end")->required();
    auto* rate_opt = fit->add_option("--rate", claimed, "claimed decay rate to judge against");
    fit->add_option("--slack", slack, "one-sided slack for the judgement (default 0.05)");

    auto* oracle = app.add_subcommand("oracle", "run independent reference cross-checks");
    std::string oracle_filter;
    oracle->add_option("--check", oracle_filter,
                       "characteristics, transport-distance, dense-solve, kinetic-moments, jacobian");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        nsv::set_thread_count(nsv::resolve_thread_count(threads));
        if (run->parsed()) return cmd_run(config_path);
        if (verify->parsed()) return nsv::run_verification(vopts) == 0 ? 0 : 1;
        if (fit->parsed()) return cmd_fit(series_path, column, t0, t1, claimed, rate_opt->count() > 0, slack);
        if (oracle->parsed()) return nsv::run_oracle_checks(oracle_filter) == 0 ? 0 : 1;
    } catch (const nsv::SimError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.kind() == nsv::ErrorKind::config ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
