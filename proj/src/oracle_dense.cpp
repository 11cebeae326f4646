// Dense reference solve of the implicit velocity/pressure system.  The whole
// saddle-point operator is assembled as one matrix and LU-factorised; no
// Krylov iteration, no FFT, no projection.  Intended for tiny grids only.

#include <Eigen/Dense>

#include <algorithm>

#include "nsv/error.hpp"
#include "nsv/oracle.hpp"

namespace nsv {

template <int D>
void dense_stokes_solve(const Grid<D>& g, const StokesSystem<D>& sys, FaceField<D>& u_out, ScalarField& p_out) {
    if (g.n > 8) fail_config("dense reference solve is limited to 8 cells per axis");
    const std::size_t N = g.cells();
    for (int a = 0; a < D; ++a) {
        double cmax = 0.0;
        for (std::size_t i = 0; i < N; ++i) cmax = std::max(cmax, sys.c[a][i]);
        if (!(cmax > 0.0))
            fail_config("dense reference solve needs a positive face coefficient somewhere on every axis");
    }

    // Unknowns: D*N face velocities, N pressures, one gauge multiplier.
    //   [ A   G   0 ] [u]   [b]      A = diag(c) - mu Lap  (per component)
    //   [ Dv  0   1 ] [p] = [0]      Dv u + lambda = 0 per cell
    //   [ 0  1^T  0 ] [l]   [0]      sum_p = 0
    // The multiplier absorbs the compatibility defect (it solves to zero)
    // and the gauge row pins the pressure constant.
    const std::size_t sz = static_cast<std::size_t>(D) * N + N + 1;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sz), static_cast<Eigen::Index>(sz));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sz));

    const double inv_h = 1.0 / g.h;
    const double inv_h2 = inv_h * inv_h;
    auto uid = [&](int a, std::size_t lin) { return static_cast<Eigen::Index>(static_cast<std::size_t>(a) * N + lin); };
    auto pid = [&](std::size_t lin) { return static_cast<Eigen::Index>(static_cast<std::size_t>(D) * N + lin); };
    const Eigen::Index lid = static_cast<Eigen::Index>(static_cast<std::size_t>(D) * N + N);

    for (int a = 0; a < D; ++a) {
        for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
            const Eigen::Index r = uid(a, lin);
            M(r, r) += sys.c[a][lin] + 2.0 * D * sys.mu * inv_h2;
            for (int b = 0; b < D; ++b) {
                M(r, uid(a, g.shift_up(lin, b, iv[b]))) -= sys.mu * inv_h2;
                M(r, uid(a, g.shift_down(lin, b, iv[b]))) -= sys.mu * inv_h2;
            }
            M(r, pid(lin)) += inv_h;
            M(r, pid(g.shift_down(lin, a, iv[a]))) -= inv_h;
            rhs(r) = sys.b[a][lin];
        });
    }
    for_each_cell(g, [&](const IVec<D>& iv, std::size_t lin) {
        const Eigen::Index r = pid(lin);
        for (int a = 0; a < D; ++a) {
            M(r, uid(a, g.shift_up(lin, a, iv[a]))) += inv_h;
            M(r, uid(a, lin)) -= inv_h;
        }
        M(r, lid) = 1.0;
        M(lid, r) = 1.0;  // gauge row: sum of pressures vanishes
    });

    const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
    const double defect = (M * sol - rhs).norm() / std::max(1.0, rhs.norm());
    if (!(defect < 1e-8)) fail_numerics("dense reference solve did not reach a consistent solution");

    u_out.resize(g);
    p_out.assign(N, 0.0);
    for (int a = 0; a < D; ++a)
        for (std::size_t i = 0; i < N; ++i) u_out[a][i] = sol(uid(a, i));
    for (std::size_t i = 0; i < N; ++i) p_out[i] = sol(pid(i));
}

template void dense_stokes_solve<2>(const Grid<2>&, const StokesSystem<2>&, FaceField<2>&, ScalarField&);
template void dense_stokes_solve<3>(const Grid<3>&, const StokesSystem<3>&, FaceField<3>&, ScalarField&);

}  // namespace nsv
