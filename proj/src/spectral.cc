#include "nlkg/spectral.hh"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace nlkg {

SpectralWorkspace::SpectralWorkspace(int n) : n_(n) {
    rbuf_ = fftw_alloc_real(static_cast<size_t>(n) * n);
    cbuf_ = fftw_alloc_complex(static_cast<size_t>(n) * (n / 2 + 1));
    plan_fwd_ = fftw_plan_dft_r2c_2d(n, n, rbuf_, reinterpret_cast<fftw_complex*>(cbuf_),
                                     FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(cbuf_), rbuf_,
                                     FFTW_ESTIMATE);
}

SpectralWorkspace::~SpectralWorkspace() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_free(rbuf_);
    fftw_free(cbuf_);
}

SpectralWorkspace& SpectralWorkspace::get(const Grid2D& g) {
    static std::map<int, std::unique_ptr<SpectralWorkspace>> registry;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = registry.find(g.n);
    if (it == registry.end())
        it = registry.emplace(g.n, std::unique_ptr<SpectralWorkspace>(new SpectralWorkspace(g.n)))
                 .first;
    return *it->second;
}

Spectrum SpectralWorkspace::forward(const RealField& f) const {
    std::memcpy(rbuf_, f.v.data(), f.v.size() * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    Spectrum s;
    s.grid = f.grid;
    size_t m = static_cast<size_t>(n_) * (n_ / 2 + 1);
    s.c.resize(m);
    std::memcpy(s.c.data(), cbuf_, m * sizeof(cplx));
    return s;
}

RealField SpectralWorkspace::inverse(const Spectrum& s) const {
    size_t m = static_cast<size_t>(n_) * (n_ / 2 + 1);
    std::memcpy(cbuf_, s.c.data(), m * sizeof(cplx));
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    RealField f(s.grid);
    double scale = 1.0 / (static_cast<double>(n_) * n_);
    for (size_t i = 0; i < f.v.size(); ++i) f.v[i] = rbuf_[i] * scale;
    return f;
}

void apply_multiplier_inplace(Spectrum& s, const std::function<double(double)>& symbol) {
    const Grid2D& g = s.grid;
    int nc = g.n / 2 + 1;
    for (int jy = 0; jy < g.n; ++jy) {
        double ky = g.freq(jy);
        for (int jx = 0; jx < nc; ++jx) {
            double kx = 2.0 * M_PI * jx / g.length;
            s.c[static_cast<size_t>(jy) * nc + jx] *= symbol(std::hypot(kx, ky));
        }
    }
}

RealField apply_multiplier(const RealField& f, const SpectralMultiplier& m) {
    if (!f.finite()) throw std::invalid_argument("apply_multiplier: non-finite input field");
    auto& ws = SpectralWorkspace::get(f.grid);
    Spectrum s = ws.forward(f);
    apply_multiplier_inplace(s, m.symbol);
    return ws.inverse(s);
}

RealField laplacian(const RealField& f) {
    return apply_multiplier(f, {[](double k) { return -k * k; }});
}

std::pair<RealField, RealField> kg_linear_step(const RealField& u, const RealField& ut,
                                               double dt) {
    u.check_same_grid(ut);
    auto& ws = SpectralWorkspace::get(u.grid);
    Spectrum su = ws.forward(u);
    Spectrum st = ws.forward(ut);
    const Grid2D& g = u.grid;
    int nc = g.n / 2 + 1;
    for (int jy = 0; jy < g.n; ++jy) {
        double ky = g.freq(jy);
        for (int jx = 0; jx < nc; ++jx) {
            double kx = 2.0 * M_PI * jx / g.length;
            double w = std::sqrt(1.0 + kx * kx + ky * ky);
            double c = std::cos(dt * w), s = std::sin(dt * w);
            size_t i = static_cast<size_t>(jy) * nc + jx;
            cplx a = su.c[i], b = st.c[i];
            su.c[i] = c * a + (s / w) * b;
            st.c[i] = -w * s * a + c * b;
        }
    }
    return {ws.inverse(su), ws.inverse(st)};
}

RealField dalembertian_plus_one(const RealField& f_minus, const RealField& f_0,
                                const RealField& f_plus, double h_t) {
    if (!(h_t > 0)) throw std::invalid_argument("dalembertian_plus_one: h_t must be positive");
    f_0.check_same_grid(f_minus);
    f_0.check_same_grid(f_plus);
    RealField out = laplacian(f_0);
    double ih2 = 1.0 / (h_t * h_t);
    for (size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = (f_plus.v[i] - 2.0 * f_0.v[i] + f_minus.v[i]) * ih2 - out.v[i] + f_0.v[i];
    return out;
}

double norm_l2(const RealField& f) {
    double s = 0;
    for (double x : f.v) s += x * x;
    return f.grid.h * std::sqrt(s);
}

double norm_l4(const RealField& f) {
    double s = 0;
    for (double x : f.v) {
        double x2 = x * x;
        s += x2 * x2;
    }
    return std::sqrt(f.grid.h) * std::pow(s, 0.25);
}

double norm_linf(const RealField& f) {
    double m = 0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double sobolev_norm(const RealField& f, double s) {
    auto& ws = SpectralWorkspace::get(f.grid);
    Spectrum sp = ws.forward(f);
    const Grid2D& g = f.grid;
    int nc = g.n / 2 + 1;
    double acc = 0;
    for (int jy = 0; jy < g.n; ++jy) {
        double ky = g.freq(jy);
        for (int jx = 0; jx < nc; ++jx) {
            double kx = 2.0 * M_PI * jx / g.length;
            double wgt = (jx == 0 || jx == g.n / 2) ? 1.0 : 2.0; // r2c half-plane
            double k2 = kx * kx + ky * ky;
            acc += wgt * std::pow(1.0 + k2, s) * std::norm(sp.c[static_cast<size_t>(jy) * nc + jx]);
        }
    }
    // h * sqrt(sum_x f^2) with sum_x f^2 = (1/n^2) sum_k |f^|^2
    return f.grid.h / g.n * std::sqrt(acc);
}

double norm_h_half(const RealField& f) { return sobolev_norm(f, 0.5); }

double kg_energy(const RealField& u, const RealField& ut) {
    double b = sobolev_norm(u, 1.0);
    double t = norm_l2(ut);
    return 0.5 * (t * t + b * b);
}

double top_octave_fraction(const RealField& f) {
    auto& ws = SpectralWorkspace::get(f.grid);
    Spectrum sp = ws.forward(f);
    const Grid2D& g = f.grid;
    int nc = g.n / 2 + 1;
    double kcut = 0.5 * g.nyquist();
    double total = 0, high = 0;
    for (int jy = 0; jy < g.n; ++jy) {
        double ky = g.freq(jy);
        for (int jx = 0; jx < nc; ++jx) {
            double kx = 2.0 * M_PI * jx / g.length;
            double wgt = (jx == 0 || jx == g.n / 2) ? 1.0 : 2.0;
            double m = wgt * std::norm(sp.c[static_cast<size_t>(jy) * nc + jx]);
            total += m;
            if (std::hypot(kx, ky) >= kcut) high += m;
        }
    }
    return total > 0 ? high / total : 0.0;
}

} // namespace nlkg
