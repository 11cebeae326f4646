#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsv/fields.hpp"
#include "nsv/fluid.hpp"
#include "nsv/geometry.hpp"
#include "nsv/norms.hpp"

#include "test_util.hpp"

using namespace nsv;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ===========================================================================
// Grid indexing
// ===========================================================================

TEST_CASE("wrap folds indices into [0, n)") {
    Grid<2> g(8, 2.0);
    CHECK(g.h == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.wrap(-1) == 7);
    CHECK(g.wrap(8) == 0);
    CHECK(g.wrap(3) == 3);
    CHECK(g.wrap(21) == 5);   // far excursion falls back to modulo
    CHECK(g.wrap(-17) == 7);
}

TEST_CASE("index and coords are inverse bijections in 2-D and 3-D") {
    Grid<2> g2(16, 1.0);
    for (std::size_t lin = 0; lin < g2.cells(); ++lin) {
        const IVec<2> iv = g2.coords(lin);
        CHECK(g2.index(iv) == lin);
    }
    Grid<3> g3(5, 1.0);
    for (std::size_t lin = 0; lin < g3.cells(); ++lin) {
        const IVec<3> iv = g3.coords(lin);
        CHECK(g3.index(iv) == lin);
    }
    // x-fastest linearisation: neighbours along axis 0 are adjacent.
    CHECK(g2.index(IVec<2>{1, 0}) == 1);
    CHECK(g2.index(IVec<2>{0, 1}) == 16);
    CHECK(g3.index(IVec<3>{0, 0, 1}) == 25);
}

TEST_CASE("shift_up and shift_down match wrapped index arithmetic") {
    Grid<3> g(6, 1.0);
    for_each_cell(g, [&](const IVec<3>& iv, std::size_t lin) {
        for (int a = 0; a < 3; ++a) {
            IVec<3> up = iv;
            up[a] = g.wrap(iv[a] + 1);
            IVec<3> dn = iv;
            dn[a] = g.wrap(iv[a] - 1);
            CHECK(g.shift_up(lin, a, iv[a]) == g.index(up));
            CHECK(g.shift_down(lin, a, iv[a]) == g.index(dn));
        }
    });
}

TEST_CASE("for_each_cell visits cells once in linear order") {
    Grid<2> g(7, 1.0);
    std::size_t expected = 0;
    for_each_cell(g, [&](const IVec<2>& iv, std::size_t lin) {
        CHECK(lin == expected);
        CHECK(g.index(iv) == lin);
        ++expected;
    });
    CHECK(expected == g.cells());
}

TEST_CASE("cell and face centres use the staggered offsets") {
    Grid<2> g(4, 2.0);  // h = 0.5
    const IVec<2> iv{1, 2};
    const Vec<2> cc = g.cell_center(iv);
    CHECK(cc[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(cc[1] == doctest::Approx(1.25).epsilon(1e-15));
    const Vec<2> f0 = g.face_center(0, iv);  // offset 0 along axis 0
    CHECK(f0[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f0[1] == doctest::Approx(1.25).epsilon(1e-15));
    const Vec<2> f1 = g.face_center(1, iv);
    CHECK(f1[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(f1[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("wrap_position folds positions into [0, box)") {
    Grid<2> g(8, 2.0);
    CHECK(g.wrap_position(2.0) == 0.0);
    CHECK(g.wrap_position(-0.25) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(g.wrap_position(0.3) == 0.3);
    const double far = g.wrap_position(13.7);  // many periods away
    CHECK(far >= 0.0);
    CHECK(far < 2.0);
    CHECK(far == doctest::Approx(std::fmod(13.7, 2.0)).epsilon(1e-12));
}

// ===========================================================================
// Norms
// ===========================================================================

TEST_CASE("cell_l2_norm of a single Fourier mode is exact") {
    // Equispaced sums of sin^2 are exactly N/2 per axis, so the discrete L2
    // norm equals the continuum value L^(d/2)/sqrt(2) to roundoff.
    Grid<2> g(32, 2.0);
    ScalarField f(g.cells());
    for_each_cell(g, [&](const IVec<2>& iv, std::size_t lin) {
        f[lin] = std::sin(2.0 * kPi * g.cell_center(iv)[0] / g.box);
    });
    const double expect = g.box / std::sqrt(2.0);  // L^(2/2) / sqrt(2), d = 2
    CHECK(cell_l2_norm(g, f) == doctest::Approx(expect).epsilon(1e-13));

    // Lp with p = 2 must agree with the dedicated L2 path.
    CHECK(cell_lp_norm(g, f, 2.0) == doctest::Approx(cell_l2_norm(g, f)).epsilon(1e-12));
}

TEST_CASE("max_abs and face_l2_norm behave on hand values") {
    Grid<2> g(4, 1.0);
    ScalarField f(g.cells(), 0.0);
    f[5] = -3.0;
    f[7] = 2.0;
    CHECK(max_abs(f) == 3.0);

    FaceField<2> u(g);
    u[0][0] = 2.0;
    u[1][3] = -1.0;
    // sum of squares 5, times h^2 = 1/16
    CHECK(face_l2_norm(g, u) == doctest::Approx(std::sqrt(5.0 / 16.0)).epsilon(1e-15));
    CHECK(ff_max_abs(u) == 2.0);
}

// ===========================================================================
// Discrete calculus
// ===========================================================================

TEST_CASE("gradient and divergence are negative adjoints") {
    Grid<2> g2(12, 1.5);
    const ScalarField p = test_util::random_scalar_field(g2.cells(), 31);
    const FaceField<2> u = test_util::random_face_field<2>(g2, 32);

    FaceField<2> gp(g2);
    gradient(g2, p, gp);
    ScalarField du;
    divergence(g2, u, du);

    double lhs = ff_dot(gp, u);  // <G p, u>
    double rhs = 0.0;            // <p, D u>
    for (std::size_t i = 0; i < p.size(); ++i) rhs += p[i] * du[i];
    const double scale = std::max(std::fabs(lhs), std::fabs(rhs)) + 1e-30;
    CHECK(std::fabs(lhs + rhs) / scale < 1e-12);  // D = -G^T

    Grid<3> g3(6, 1.0);
    const ScalarField p3 = test_util::random_scalar_field(g3.cells(), 33);
    const FaceField<3> u3 = test_util::random_face_field<3>(g3, 34);
    FaceField<3> gp3(g3);
    gradient(g3, p3, gp3);
    ScalarField du3;
    divergence(g3, u3, du3);
    lhs = ff_dot(gp3, u3);
    rhs = 0.0;
    for (std::size_t i = 0; i < p3.size(); ++i) rhs += p3[i] * du3[i];
    CHECK(std::fabs(lhs + rhs) / (std::fabs(lhs) + 1e-30) < 1e-12);
}

TEST_CASE("laplacian equals divergence of gradient") {
    Grid<2> g(10, 1.0);
    const ScalarField p = test_util::random_scalar_field(g.cells(), 35);
    FaceField<2> gp(g);
    gradient(g, p, gp);
    ScalarField dgp;
    divergence(g, gp, dgp);
    ScalarField lap;
    laplacian(g, p, lap);
    const double scale = max_abs(lap) + 1.0;
    for (std::size_t i = 0; i < lap.size(); ++i) CHECK(std::fabs(lap[i] - dgp[i]) / scale < 1e-12);
}

TEST_CASE("gradient of a constant and divergence of a uniform field vanish") {
    Grid<3> g(5, 1.0);
    ScalarField p(g.cells(), 3.25);
    FaceField<3> gp(g);
    gradient(g, p, gp);
    CHECK(ff_max_abs(gp) == 0.0);

    FaceField<3> u(g);
    for (int a = 0; a < 3; ++a)
        for (double& v : u[a]) v = 0.7 - 0.2 * a;
    ScalarField du;
    divergence(g, u, du);
    CHECK(max_abs(du) == 0.0);
}

// ===========================================================================
// Averages and velocity gradients
// ===========================================================================

TEST_CASE("cell_avg_velocity and face_avg_density average the two neighbours") {
    Grid<2> g(4, 1.0);
    FaceField<2> u(g);
    ScalarField rho(g.cells(), 0.0);
    const IVec<2> iv{1, 1};
    const std::size_t lin = g.index(iv);
    u[0][lin] = 1.0;
    u[0][g.shift_up(lin, 0, 1)] = 3.0;
    const Vec<2> ub = cell_avg_velocity(g, u, iv, lin);
    CHECK(ub[0] == 2.0);
    CHECK(ub[1] == 0.0);

    rho[lin] = 4.0;
    rho[g.shift_down(lin, 1, 1)] = 2.0;
    CHECK(face_avg_density(g, rho, 1, iv, lin) == 3.0);
}

TEST_CASE("velocity_gradient_norms matches the single-mode shear values") {
    // u = (sin(2 pi x2 / L), 0): the only nonzero derivative is d2 u1, a
    // centred cosine of amplitude g1 = 2 sin(pi h / L) / h.
    Grid<2> g(64, 1.0);
    FaceField<2> u(g);
    for_each_cell(g, [&](const IVec<2>& iv, std::size_t lin) {
        const double x2 = g.face_center(0, iv)[1];
        u[0][lin] = std::sin(2.0 * kPi * x2 / g.box);
    });
    const double g1 = 2.0 * std::sin(kPi * g.h / g.box) / g.h;
    const GradientNorms gn = velocity_gradient_norms(g, u);
    // sum over the lattice of g1^2 cos^2 = g1^2 N^2/2, times h^2: g1^2 L^2/2
    CHECK(gn.l2 == doctest::Approx(g1 * g.box / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(gn.linf == doctest::Approx(g1).epsilon(1e-12));
}
