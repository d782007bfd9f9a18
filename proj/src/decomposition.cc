#include "nlkg/decomposition.hh"

#include <cmath>

#include "nlkg/parallel.hh"

namespace nlkg {

RealField apply_n(const RealField& u, double lambda) {
    RealField out = u;
    for (double& x : out.v) x = lambda * std::abs(x) * x;
    return out;
}

QuadraticNonlinearity split_quadratic(double f_plus, double f_minus) {
    return {0.5 * (f_plus + f_minus), 0.5 * (f_plus - f_minus)};
}

namespace {

double resonant_at(const ProfileEvaluator& ev, const ProfilePoint& p, double t) {
    if (!p.inside || p.amp2 == 0) return 0.0;
    double lam = ev.params().lambda;
    return 8.0 / (3.0 * M_PI) * lam / (t * t) * std::sqrt(p.amp2) *
           (p.p1 * std::cos(p.alpha) + p.q1 * std::sin(p.alpha));
}

double nonresonant_at(const ProfileEvaluator& ev, const ProfilePoint& p, double t, int n_cut) {
    if (!p.inside || p.amp2 == 0) return 0.0;
    double lam = ev.params().lambda;
    double phase = p.alpha - p.beta;
    std::complex<double> z(std::cos(phase), std::sin(phase));
    std::complex<double> z2 = z * z;
    std::complex<double> w = z2 * z; // n = 3 (c_2 = 0)
    double s = 0;
    for (int n = 3; n <= n_cut; n += 2) {
        s += fourier_coeff(n) * w.real();
        w *= z2;
    }
    return lam / (t * t) * p.amp2 * s;
}

} // namespace

double resonant_part(const ProfileEvaluator& ev, double t, double x, double y) {
    if (!(t > 1)) throw std::invalid_argument("resonant_part requires t > 1");
    return resonant_at(ev, ev.point(t, x, y), t);
}

double nonresonant_part(const ProfileEvaluator& ev, double t, double x, double y) {
    if (!(t > 1)) throw std::invalid_argument("nonresonant_part requires t > 1");
    return nonresonant_at(ev, ev.point(t, x, y), t, ev.params().n_max);
}

RealField sample_resonant(const ProfileEvaluator& ev, const Grid2D& g, double t) {
    if (!(t > 1)) throw std::invalid_argument("sample_resonant requires t > 1");
    RealField f(g);
    parallel_rows(g.n, [&](int iy) {
        double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix)
            f.at(ix, iy) = resonant_at(ev, ev.point(t, g.coord(ix), y), t);
    });
    return f;
}

RealField sample_nonresonant_upto(const ProfileEvaluator& ev, const Grid2D& g, double t,
                                  int n_cut) {
    if (!(t > 1)) throw std::invalid_argument("sample_nonresonant requires t > 1");
    RealField f(g);
    parallel_rows(g.n, [&](int iy) {
        double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix)
            f.at(ix, iy) = nonresonant_at(ev, ev.point(t, g.coord(ix), y), t, n_cut);
    });
    return f;
}

RealField sample_nonresonant(const ProfileEvaluator& ev, const Grid2D& g, double t) {
    return sample_nonresonant_upto(ev, g, t, ev.params().n_max);
}

} // namespace nlkg
