#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsv/ratefit.hpp"

#include "test_util.hpp"

using namespace nsv;

namespace {

// Synthetic series: exact exponentials in every decaying column.  The
// claimed rates are chosen so the fitted values clear them with margin.
SeriesTable synthetic_series(double dt, double t_end, double e0, double rate_e, double r0, double rate_r,
                             bool zero_ef = false) {
    SeriesTable s;
    const int n = static_cast<int>(std::llround(t_end / dt));
    for (int i = 0; i <= n; ++i) {
        SeriesTable::Row row{};
        const double t = i * dt;
        row[col::t] = t;
        row[col::E] = e0 * std::exp(-rate_e * t);
        row[col::R_supp] = r0 * std::exp(-rate_r * t);
        row[col::sup_jf] = 0.5 * r0 * std::exp(-rate_r * t);
        row[col::sup_ef] = zero_ef ? 0.0 : 0.25 * r0 * std::exp(-rate_r * t);
        row[col::w1_sur] = 0.3 * r0 * std::exp(-rate_r * t);
        s.append(row);
    }
    return s;
}

TheoryConstants hand_theory() {
    TheoryConstants th;
    th.alpha = 0.4;
    th.alpha1 = 0.3;
    th.alpha2 = 0.1;
    return th;
}

}  // namespace

// ===========================================================================
// Least-squares exponential fit
// ===========================================================================

TEST_CASE("fit recovers an exact exponential") {
    std::vector<double> t, y;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.01 * i);
        y.push_back(3.7 * std::exp(-1.9 * 0.01 * i));
    }
    const RateFit f = fit_exponential(t, y, 0.0, 2.0);
    CHECK(f.lambda == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(std::exp(f.log_prefactor) == doctest::Approx(3.7).epsilon(1e-12));
    CHECK(f.max_rel_residual < 1e-12);
    CHECK(f.samples == 201);
}

TEST_CASE("the window selects which regime is fitted") {
    // Rate 3 before t = 1, rate 0.5 after: the fit must see only the tail.
    std::vector<double> t, y;
    for (int i = 0; i <= 300; ++i) {
        const double ti = 0.01 * i;
        t.push_back(ti);
        y.push_back(ti <= 1.0 ? std::exp(-3.0 * ti) : std::exp(-3.0) * std::exp(-0.5 * (ti - 1.0)));
    }
    const RateFit tail = fit_exponential(t, y, 1.0, 3.0);
    CHECK(tail.lambda == doctest::Approx(0.5).epsilon(1e-10));
    const RateFit head = fit_exponential(t, y, 0.0, 1.0);
    CHECK(head.lambda == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("fit failure modes are reported precisely") {
    std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    SUBCASE("length mismatch") {
        std::vector<double> y{1.0, 0.5};
        auto c = test_util::capture([&] { fit_exponential(t, y, 0.0, 3.0); });
        REQUIRE(c.threw);
        CHECK(c.kind == ErrorKind::numerics);
        CHECK(test_util::contains(c.msg, "time and value arrays differ in length"));
    }
    SUBCASE("nonpositive sample") {
        std::vector<double> y{1.0, 0.5, 0.0, 0.1};
        auto c = test_util::capture([&] { fit_exponential(t, y, 0.0, 3.0); });
        REQUIRE(c.threw);
        CHECK(test_util::contains(c.msg, "is not strictly positive"));
        CHECK(test_util::contains(c.msg, "t = 2"));
    }
    SUBCASE("too few samples in window") {
        std::vector<double> y{1.0, 0.5, 0.25, 0.125};
        auto c = test_util::capture([&] { fit_exponential(t, y, 0.5, 1.5); });
        REQUIRE(c.threw);
        CHECK(test_util::contains(c.msg, "holds only 1 samples (need at least 3)"));
    }
    SUBCASE("all samples at one time") {
        std::vector<double> tt{1.0, 1.0, 1.0};
        std::vector<double> y{0.5, 0.5, 0.5};
        auto c = test_util::capture([&] { fit_exponential(tt, y, 0.0, 2.0); });
        REQUIRE(c.threw);
        CHECK(test_util::contains(c.msg, "degenerate window"));
    }
}

// ===========================================================================
// Verdict assembly
// ===========================================================================

TEST_CASE("decay report checks every decaying series against its claim") {
    const SeriesTable s = synthetic_series(0.01, 3.0, 0.02, 0.9, 0.4, 0.12);
    DecayReportOptions opts;
    opts.dt = 0.01;
    opts.has_particles = true;
    const std::vector<VerdictRow> rows = decay_report(s, hand_theory(), opts);

    REQUIRE(rows.size() == 7);
    CHECK(rows[0].check == "E_envelope");
    CHECK(rows[0].claimed_rate == doctest::Approx(0.8).epsilon(1e-15));  // 2 alpha
    CHECK(rows[1].check == "E_rate");
    CHECK(rows[1].claimed_rate == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(rows[2].check == "E_rate_alt");
    CHECK(rows[2].claimed_rate == doctest::Approx(0.3).epsilon(1e-15));  // alpha1
    CHECK(rows[3].check == "R_supp_rate");
    CHECK(rows[4].check == "jf_rate");
    CHECK(rows[5].check == "ef_rate");
    CHECK(rows[6].check == "w1_rate");
    for (std::size_t i = 3; i < rows.size(); ++i)
        CHECK(rows[i].claimed_rate == doctest::Approx(0.1).epsilon(1e-15));  // alpha2

    // Fits run on the default window [1, 3]; every column is an exact
    // exponential, so fitted == true rate and every check passes.
    CHECK(rows[1].fitted_rate == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(rows[3].fitted_rate == doctest::Approx(0.12).epsilon(1e-10));
    for (const VerdictRow& r : rows) CHECK(r.pass);
}

TEST_CASE("identically zero kinetic columns are omitted, not fitted") {
    const SeriesTable s = synthetic_series(0.01, 3.0, 0.02, 0.9, 0.4, 0.12, /*zero_ef=*/true);
    DecayReportOptions opts;
    opts.dt = 0.01;
    const std::vector<VerdictRow> rows = decay_report(s, hand_theory(), opts);
    REQUIRE(rows.size() == 6);
    for (const VerdictRow& r : rows) CHECK(r.check != "ef_rate");
}

TEST_CASE("particle-free reports carry only the fluid rows") {
    const SeriesTable s = synthetic_series(0.01, 3.0, 0.02, 0.9, 0.4, 0.12);
    DecayReportOptions opts;
    opts.dt = 0.01;
    opts.has_particles = false;
    const std::vector<VerdictRow> rows = decay_report(s, hand_theory(), opts);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].check == "E_envelope");
    CHECK(rows[1].check == "E_rate");
    CHECK(rows[2].check == "E_rate_alt");
}

TEST_CASE("the envelope check is pointwise, not a fit") {
    // Constant energy: the fit would find rate 0 but the envelope violation
    // at the first positive time is what must flag the row.
    SeriesTable s;
    for (int i = 0; i <= 300; ++i) {
        SeriesTable::Row row{};
        row[col::t] = 0.01 * i;
        row[col::E] = 0.02;
        s.append(row);
    }
    DecayReportOptions opts;
    opts.dt = 0.01;
    opts.has_particles = false;
    const std::vector<VerdictRow> rows = decay_report(s, hand_theory(), opts);
    REQUIRE(!rows.empty());
    CHECK(rows[0].check == "E_envelope");
    CHECK_FALSE(rows[0].pass);
    CHECK(rows[1].check == "E_rate");
    CHECK_FALSE(rows[1].pass);  // fitted 0 < claimed 0.8
}

TEST_CASE("a slow fit fails its one-sided comparison") {
    // True rate 0.05 against claim alpha2 = 0.1 with slack 0.05: fails.
    const SeriesTable s = synthetic_series(0.01, 3.0, 0.02, 0.9, 0.4, 0.05);
    DecayReportOptions opts;
    opts.dt = 0.01;
    const std::vector<VerdictRow> rows = decay_report(s, hand_theory(), opts);
    bool saw = false;
    for (const VerdictRow& r : rows)
        if (r.check == "R_supp_rate") {
            saw = true;
            CHECK_FALSE(r.pass);
            CHECK(r.fitted_rate == doctest::Approx(0.05).epsilon(1e-9));
        }
    CHECK(saw);
}

TEST_CASE("short runs shrink the default window instead of failing") {
    // t_end = 0.5 < 1: the default window would be empty, so it becomes
    // [0.25, 0.5] and the fits still run.
    const SeriesTable s = synthetic_series(0.005, 0.5, 0.02, 0.9, 0.4, 0.12);
    DecayReportOptions opts;
    opts.dt = 0.005;
    const std::vector<VerdictRow> rows = decay_report(s, hand_theory(), opts);
    REQUIRE(rows.size() == 7);
    CHECK(rows[1].fitted_rate == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("an explicit window overrides the default") {
    const SeriesTable s = synthetic_series(0.01, 3.0, 0.02, 0.9, 0.4, 0.12);
    DecayReportOptions opts;
    opts.dt = 0.01;
    opts.t0 = 2.0;
    opts.t1 = 3.0;
    const std::vector<VerdictRow> rows = decay_report(s, hand_theory(), opts);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[1].fitted_rate == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("verdict CSV is written field for field") {
    std::vector<VerdictRow> rows(2);
    rows[0].check = "E_rate";
    rows[0].claimed_rate = 0.5;
    rows[0].fitted_rate = 0.625;
    rows[0].pass = true;
    rows[1].check = "R_supp_rate";
    rows[1].claimed_rate = 0.25;
    rows[1].fitted_rate = 0.125;
    rows[1].pass = false;
    CHECK(verdicts_to_csv(rows) ==
          "check,claimed_rate,fitted_rate,pass\n"
          "E_rate,0.5,0.625,true\n"
          "R_supp_rate,0.25,0.125,false\n");
    CHECK(verdicts_to_csv({}) == "check,claimed_rate,fitted_rate,pass\n");
}
