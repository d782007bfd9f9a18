// Shared fixtures and independent oracles for the test suites.

#ifndef NLKG_TEST_HELPERS_HH
#define NLKG_TEST_HELPERS_HH

#include <cmath>
#include <functional>
#include <random>

#include "nlkg/final_data.hh"
#include "nlkg/grid.hh"

namespace nlkg::test {

// C^4 polynomial step: 1 for s <= s0, 0 for s >= s1; the high-order contact
// keeps the spectral tail of the cutoff far below the identity-check floor
inline double bump(double s, double s0, double s1) {
    if (s <= s0) return 1.0;
    if (s >= s1) return 0.0;
    double x = (s1 - s) / (s1 - s0);
    double x5 = x * x * x * x * x;
    return x5 * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + x * 70.0))));
}

// t^{-m} cos(n sqrt(t^2-r^2)) (or sin), smoothly cut well inside the cone so
// spectral differentiation sees a periodic C-infinity function
inline RealField cone_wave(const Grid2D& g, double t, int m, int n, bool use_sin,
                           double r0_frac = 0.45, double r1_frac = 0.75) {
    RealField f(g);
    for (int iy = 0; iy < g.n; ++iy) {
        double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix) {
            double x = g.coord(ix);
            double r = std::hypot(x, y);
            if (r >= r1_frac * t) continue;
            double s = std::sqrt(t * t - r * r);
            double osc = use_sin ? std::sin(n * s) : std::cos(n * s);
            f.at(ix, iy) = std::pow(t, -m) * osc * bump(r / t, r0_frac, r1_frac);
        }
    }
    return f;
}

// periodic trapezoid quadrature of (1/pi) Int_0^{2pi} |cos t| cos t cos(n t) dt;
// the integrand's Fourier tail decays cubically, so N ~ 2^15 is far below 1e-12
inline double cn_quadrature(int n, int N = 1 << 15) {
    double s = 0;
    for (int j = 0; j < N; ++j) {
        double th = 2.0 * M_PI * j / N;
        double c = std::cos(th);
        s += std::abs(c) * c * std::cos(n * th);
    }
    return s * (2.0 * M_PI / N) / M_PI;
}

inline RealField random_field(const Grid2D& g, unsigned seed, double amp = 1.0,
                              int k_keep = 8) {
    // band-limited random field: random low modes, smooth on the grid
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    RealField f(g);
    for (int p = -k_keep; p <= k_keep; ++p)
        for (int q = -k_keep; q <= k_keep; ++q) {
            double a = U(rng), b = U(rng);
            for (int iy = 0; iy < g.n; ++iy)
                for (int ix = 0; ix < g.n; ++ix) {
                    double ph = 2.0 * M_PI * (p * ix + q * iy) / g.n;
                    f.at(ix, iy) += amp * (a * std::cos(ph) + b * std::sin(ph)) /
                                    ((1 + p * p + q * q));
                }
        }
    return f;
}

inline FinalState single_atom_state(double a = 1.0, double sigma = 2.5, double kappa_sign = 1.0) {
    FinalState fs;
    fs.atoms0.push_back({a, {0.0, 0.0}, sigma});
    fs.kappa = kappa_sign / (2.0 * M_PI);
    return fs;
}

inline FinalState two_component_state(double a0, double a1, double sigma) {
    FinalState fs;
    fs.atoms0.push_back({a0, {0.0, 0.0}, sigma});
    fs.atoms1.push_back({a1, {1.0, -0.5}, 0.8 * sigma});
    return fs;
}

} // namespace nlkg::test

#endif
