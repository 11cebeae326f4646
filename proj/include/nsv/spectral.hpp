// Fast-transform machinery on the periodic staggered grid.
//
// The discrete gradient G and divergence -G^T diagonalise in Fourier
// space: with the backward-transform convention f(i) = sum_k fhat(k)
// exp(+2 pi i k.i / N) the face gradient has symbol
//     g_a(k) = (1 - exp(-2 pi i k_a / N)) / h
// and the divergence has symbol -g^H.  The face Laplacian has the real
// symbol  lambda(k) = sum_a |g_a(k_a)|^2 = (4/h^2) sum_a sin^2(pi k_a/N).
//
// From those we obtain three exact, O(N^D log N) operations used by the
// implicit momentum solver:
//   * leray_project: u <- u - G (G^T G)^{-1} G^T u, the discrete
//     divergence-free projection (mean preserved; div drops to roundoff),
//   * helmholtz_inverse: (cbar - mu Lap)^{-1} on each face component,
//     the constant-coefficient preconditioner,
//   * pressure_from_residual: least-squares solve of G p = r, used to
//     recover the pressure once the projected system has converged.
//
// Plans are created with FFTW_ESTIMATE (deterministic plan choice) and the
// library is used single-threaded: transforms are bit-reproducible across
// runs and thread settings.

#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nsv/error.hpp"
#include "nsv/fields.hpp"
#include "nsv/geometry.hpp"

namespace nsv {

template <int D>
class Spectral {
public:
    explicit Spectral(const Grid<D>& g) : grid_(g), ncx_(g.n / 2 + 1) {
        const std::size_t nreal = g.cells();
        nmodes_ = static_cast<std::size_t>(ncx_);
        for (int a = 1; a < D; ++a) nmodes_ *= static_cast<std::size_t>(g.n);

        real_ = fftw_alloc_real(nreal);
        for (int a = 0; a < D; ++a) cbuf_[a] = fftw_alloc_complex(nmodes_);
        scratch_ = fftw_alloc_complex(nmodes_);
        if (!real_ || !scratch_) fail_io("out of memory allocating FFT buffers");

        // FFTW wants the slowest-varying dimension first; our storage is
        // x-fastest, so the dims array is just {n, ..., n} with x last.
        int dims[3] = {0, 0, 0};
        for (int a = 0; a < D; ++a) dims[a] = static_cast<int>(g.n);
        fwd_ = fftw_plan_dft_r2c(D, dims, real_, scratch_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r(D, dims, scratch_, real_, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) fail_io("FFTW plan creation failed");

        // Per-axis gradient symbol and its squared magnitude.
        gsym_.resize(static_cast<std::size_t>(g.n));
        gsym2_.resize(static_cast<std::size_t>(g.n));
        const double two_pi = 2.0 * 3.14159265358979323846;
        for (std::int64_t k = 0; k < g.n; ++k) {
            const double th = two_pi * static_cast<double>(k) / static_cast<double>(g.n);
            const std::complex<double> gk = (1.0 - std::complex<double>(std::cos(th), -std::sin(th))) / g.h;
            gsym_[static_cast<std::size_t>(k)] = gk;
            gsym2_[static_cast<std::size_t>(k)] = std::norm(gk);
        }
    }

    ~Spectral() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(scratch_);
        for (int a = 0; a < D; ++a) fftw_free(cbuf_[a]);
    }

    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const Grid<D>& grid() const { return grid_; }

    // u <- P u with P the discrete Leray projector.  The zero mode (mean
    // velocity) passes through untouched.
    void leray_project(FaceField<D>& u) {
        for (int a = 0; a < D; ++a) forward(u[a], cbuf_[a]);
        apply_projection();
        for (int a = 0; a < D; ++a) inverse(cbuf_[a], u[a]);
    }

    // z = (cbar - mu Lap)^{-1} r componentwise; cbar > 0 required (the
    // operator is singular at cbar = 0 on the zero mode, where we leave the
    // mean untouched apart from the 1/cbar scale guarded below).
    void helmholtz_inverse(FaceField<D>& z, const FaceField<D>& r, double cbar, double mu) {
        z.resize(grid_);
        for (int a = 0; a < D; ++a) {
            forward(r[a], cbuf_[a]);
            std::size_t idx = 0;
            visit_modes([&](const std::array<std::int64_t, 3>& k) {
                double lam = 0.0;
                for (int b = 0; b < D; ++b) lam += gsym2_[static_cast<std::size_t>(k[b])];
                const double denom = cbar + mu * lam;
                const double inv = denom > 0.0 ? 1.0 / denom : 0.0;
                cbuf_[a][idx][0] *= inv;
                cbuf_[a][idx][1] *= inv;
                ++idx;
            });
            inverse(cbuf_[a], z[a]);
        }
    }

    // Least-squares pressure: p = (G^T G)^{-1} G^T r, mean set to zero.
    ScalarField pressure_from_residual(const FaceField<D>& r) {
        for (int a = 0; a < D; ++a) forward(r[a], cbuf_[a]);
        std::size_t idx = 0;
        visit_modes([&](const std::array<std::int64_t, 3>& k) {
            std::complex<double> num(0.0, 0.0);
            double denom = 0.0;
            for (int b = 0; b < D; ++b) {
                const std::complex<double> gb = gsym_[static_cast<std::size_t>(k[b])];
                const std::complex<double> rb(cbuf_[b][idx][0], cbuf_[b][idx][1]);
                num += std::conj(gb) * rb;
                denom += gsym2_[static_cast<std::size_t>(k[b])];
            }
            const std::complex<double> p = denom > 0.0 ? num / denom : std::complex<double>(0.0, 0.0);
            scratch_[idx][0] = p.real();
            scratch_[idx][1] = p.imag();
            ++idx;
        });
        ScalarField p;
        inverse(scratch_, p);
        return p;
    }

private:
    template <class F>
    void visit_modes(F&& f) const {
        std::array<std::int64_t, 3> k{0, 0, 0};
        if constexpr (D == 1) {
            for (k[0] = 0; k[0] < ncx_; ++k[0]) f(k);
        } else if constexpr (D == 2) {
            for (k[1] = 0; k[1] < grid_.n; ++k[1])
                for (k[0] = 0; k[0] < ncx_; ++k[0]) f(k);
        } else {
            for (k[2] = 0; k[2] < grid_.n; ++k[2])
                for (k[1] = 0; k[1] < grid_.n; ++k[1])
                    for (k[0] = 0; k[0] < ncx_; ++k[0]) f(k);
        }
    }

    void apply_projection() {
        std::size_t idx = 0;
        visit_modes([&](const std::array<std::int64_t, 3>& k) {
            std::complex<double> s(0.0, 0.0);
            double denom = 0.0;
            std::array<std::complex<double>, D> gk;
            for (int b = 0; b < D; ++b) {
                gk[b] = gsym_[static_cast<std::size_t>(k[b])];
                const std::complex<double> ub(cbuf_[b][idx][0], cbuf_[b][idx][1]);
                s += std::conj(gk[b]) * ub;
                denom += gsym2_[static_cast<std::size_t>(k[b])];
            }
            if (denom > 0.0) {
                const std::complex<double> corr = s / denom;
                for (int b = 0; b < D; ++b) {
                    const std::complex<double> delta = gk[b] * corr;
                    cbuf_[b][idx][0] -= delta.real();
                    cbuf_[b][idx][1] -= delta.imag();
                }
            }
            ++idx;
        });
    }

    void forward(const ScalarField& in, fftw_complex* out) {
        if (in.size() != grid_.cells()) fail_numerics("spectral transform: field size mismatch");
        for (std::size_t i = 0; i < in.size(); ++i) real_[i] = in[i];
        fftw_execute_dft_r2c(fwd_, real_, out);
    }

    void inverse(fftw_complex* in, ScalarField& out) {
        fftw_execute_dft_c2r(bwd_, in, real_);  // destroys `in`, which is fine
        const double scale = 1.0 / static_cast<double>(grid_.cells());
        out.resize(grid_.cells());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_[i] * scale;
    }

    Grid<D> grid_;
    std::int64_t ncx_;
    std::size_t nmodes_ = 0;
    double* real_ = nullptr;
    fftw_complex* scratch_ = nullptr;
    std::array<fftw_complex*, D> cbuf_{};
    fftw_plan fwd_{}, bwd_{};
    std::vector<std::complex<double>> gsym_;
    std::vector<double> gsym2_;
};

}  // namespace nsv
