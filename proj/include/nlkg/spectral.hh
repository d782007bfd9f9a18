// Spectral kernel of the lab: FFT-backed multiplier operators on the periodic
// grid, the exact linear Klein-Gordon propagator, the discrete (box + 1)
// operator, and the L2 / L4 / H^{1/2} norms.
//
// Conventions:
//   * forward transform is the plain FFTW r2c (no scaling), inverse carries
//     the 1/n^2; Parseval sums in k-space weight the r2c half-plane columns
//     0 < kx < n/2 by two.
//   * B = sqrt(1 - Laplacian) has symbol omega(k) = sqrt(1 + |k|^2);
//     kg_linear_step advances (u, u_t) exactly by
//         u^+  =  cos(dt w) u + sin(dt w)/w u_t
//         ut^+ = -w sin(dt w) u + cos(dt w) u_t
//   * dalembertian_plus_one uses a centered second difference in t on three
//     sampled slices and the exact spectral Laplacian in x.
// Plans use FFTW_ESTIMATE: plan selection is then deterministic across runs,
// which the byte-identical output contract needs.

#ifndef NLKG_SPECTRAL_HH
#define NLKG_SPECTRAL_HH

#include <complex>
#include <functional>
#include <vector>

#include "nlkg/grid.hh"

namespace nlkg {

using cplx = std::complex<double>;

// Fourier-symbol operator; symbol is a real function of |k| (even in k, so a
// real field maps to a real field).
struct SpectralMultiplier {
    std::function<double(double)> symbol;
};

// Half-plane spectrum of a real field, size n*(n/2+1), row-major in ky.
struct Spectrum {
    Grid2D grid;
    std::vector<cplx> c;

    int ncols() const { return grid.n / 2 + 1; }
    cplx& at(int jx, int jy) { return c[static_cast<size_t>(jy) * ncols() + jx]; }
    const cplx& at(int jx, int jy) const { return c[static_cast<size_t>(jy) * ncols() + jx]; }
};

// Cached-plan transform engine for one grid size.
class SpectralWorkspace {
  public:
    static SpectralWorkspace& get(const Grid2D& g); // registry, keyed by n

    Spectrum forward(const RealField& f) const;
    RealField inverse(const Spectrum& s) const; // applies 1/n^2

    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  private:
    explicit SpectralWorkspace(int n);
    int n_;
    void* plan_fwd_ = nullptr;
    void* plan_inv_ = nullptr;
    double* rbuf_ = nullptr;
    void* cbuf_ = nullptr; // fftw_complex*
};

RealField apply_multiplier(const RealField& f, const SpectralMultiplier& m);

// in k-space, for chaining without extra transforms
void apply_multiplier_inplace(Spectrum& s, const std::function<double(double)>& symbol);

RealField laplacian(const RealField& f);

// exact free Klein-Gordon flow by dt; returns (u+, ut+)
std::pair<RealField, RealField> kg_linear_step(const RealField& u, const RealField& ut, double dt);

// (f_plus - 2 f_0 + f_minus)/h_t^2 - Lap f_0 + f_0
RealField dalembertian_plus_one(const RealField& f_minus, const RealField& f_0,
                                const RealField& f_plus, double h_t);

double norm_l2(const RealField& f);
double norm_l4(const RealField& f);
double norm_linf(const RealField& f);
double norm_h_half(const RealField& f);

// || (1+|k|^2)^{s/2} f^ ||_{L2}, evaluated in k-space
double sobolev_norm(const RealField& f, double s);

// discrete KG energy 1/2 (||ut||^2 + ||B u||^2)
double kg_energy(const RealField& u, const RealField& ut);

// fraction of spectral mass with |k| >= nyquist/2; resolution guard
double top_octave_fraction(const RealField& f);

} // namespace nlkg

#endif
