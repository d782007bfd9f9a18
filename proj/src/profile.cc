#include "nlkg/profile.hh"

#include <cmath>
#include <stdexcept>

#include "nlkg/parallel.hh"

namespace nlkg {

void ProfileParams::validate() const {
    if (lambda == 0) throw std::invalid_argument("ProfileParams: lambda must be nonzero");
    if (!(d > 0.5 && d < 1.0)) throw std::invalid_argument("ProfileParams: d must lie in (1/2, 1)");
    if (n_max < 3 || n_max % 2 == 0)
        throw std::invalid_argument("ProfileParams: n_max must be odd and >= 3");
    if (!(delta_cone > 0 && delta_cone < 1))
        throw std::invalid_argument("ProfileParams: delta_cone must lie in (0, 1)");
}

HyperbolicCoords hyperbolic(double t, double x, double y, double delta_cone) {
    if (!(t > 0)) throw std::invalid_argument("hyperbolic: t must be positive");
    HyperbolicCoords c;
    double r = std::hypot(x, y);
    if (r >= t * (1.0 - delta_cone)) return c; // inside stays false
    double s = std::sqrt(t * t - r * r);
    c.mu1 = x / s;
    c.mu2 = y / s;
    c.bracket = t / s;
    c.inside = true;
    return c;
}

std::pair<double, double> p1_q1(const FinalState& fs, double mu1, double mu2) {
    double br2 = 1.0 + mu1 * mu1 + mu2 * mu2;
    double br = std::sqrt(br2);
    auto f0 = ft_phi(fs, 0, mu1, mu2);
    auto f1 = ft_phi(fs, 1, mu1, mu2);
    return {-br2 * f0.imag() - br * f1.real(), br2 * f0.real() - br * f1.imag()};
}

double psi(const FinalState& fs, double mu1, double mu2) {
    double br = std::sqrt(1.0 + mu1 * mu1 + mu2 * mu2);
    auto f0 = ft_phi(fs, 0, mu1, mu2);
    auto f1 = ft_phi(fs, 1, mu1, mu2);
    return -4.0 / (3.0 * M_PI) * br * std::abs(f0 + std::complex<double>(0, 1) * f1 / br);
}

double beta(double p1, double q1) {
    if (p1 * p1 + q1 * q1 <= 0)
        throw std::invalid_argument("beta: degenerate amplitude P1^2 + Q1^2 = 0");
    double b = std::atan2(q1, p1); // (-pi, pi]
    if (b <= 0) b += 2.0 * M_PI;   // branch (0, 2pi]; maps angle 0 to 2pi
    return b;
}

double fourier_coeff(int n) {
    if (n < 0) throw std::invalid_argument("fourier_coeff: n must be >= 0");
    if (n % 2 == 0) return 0.0;
    double s4 = (n % 4 == 1) ? 1.0 : -1.0; // sin(n pi / 2)
    return -(8.0 / M_PI) * s4 / (static_cast<double>(n) * (static_cast<double>(n) * n - 4.0));
}

double gn_coeff(int n) {
    if (n < 2) throw std::invalid_argument("gn_coeff: n must be >= 2");
    if (n % 2 == 0) return 0.0;
    double s4 = (n % 4 == 1) ? 1.0 : -1.0;
    double nd = n;
    return 8.0 * s4 / (M_PI * nd * (nd * nd - 1.0) * (nd * nd - 4.0));
}

std::pair<double, double> pn_qn(int n, const FinalState& fs, double mu1, double mu2,
                                double lambda) {
    if (n < 2) throw std::invalid_argument("pn_qn: n must be >= 2");
    if (n % 2 == 0) return {0.0, 0.0};
    auto [p1, q1] = p1_q1(fs, mu1, mu2);
    double amp2 = p1 * p1 + q1 * q1;
    if (amp2 <= 0) return {0.0, 0.0};
    double g = gn_coeff(n) * lambda * amp2;
    double b = beta(p1, q1);
    return {g * std::cos(n * b), g * std::sin(n * b)};
}

double pick_delta_cone(const FinalState& fs, double rel_tol) {
    // radial upper bound for sqrt(P1^2+Q1^2) = <mu>^2 |phi0^ + i phi1^/<mu>|
    auto bound = [&](double mu) {
        double b0 = 0, b1 = 0;
        for (const auto& at : fs.atoms0)
            b0 += std::abs(at.a) * 2.0 * M_PI * at.sigma * at.sigma *
                  std::exp(-0.5 * at.sigma * at.sigma * mu * mu);
        for (const auto& at : fs.atoms1)
            b1 += std::abs(at.a) * 2.0 * M_PI * at.sigma * at.sigma *
                  std::exp(-0.5 * at.sigma * at.sigma * mu * mu);
        double br = std::sqrt(1.0 + mu * mu);
        return std::abs(fs.kappa) * br * br * (b0 + b1 / br);
    };
    if (fs.atoms0.empty() && fs.atoms1.empty()) return 0.5;
    double bmax = 0;
    for (double mu = 0; mu <= 50.0; mu += 0.01) bmax = std::max(bmax, bound(mu));
    if (bmax == 0) return 0.5;
    double mu_cut = 50.0;
    for (double mu = 0; mu <= 50.0; mu += 0.01) {
        if (bound(mu) <= rel_tol * bmax) {
            mu_cut = mu;
            break;
        }
    }
    double delta = 1.0 - mu_cut / std::sqrt(1.0 + mu_cut * mu_cut);
    return std::min(0.9, std::max(1e-6, delta));
}

ProfileEvaluator::ProfileEvaluator(FinalState fs, ProfileParams pp, PsiMode mode)
    : fs_(std::move(fs)), pp_(pp), mode_(mode) {
    pp_.validate();
    gn_.assign(pp_.n_max + 1, 0.0);
    for (int n = 2; n <= pp_.n_max; ++n) gn_[n] = gn_coeff(n);
}

void ProfileEvaluator::require_t(double t) const {
    if (!(t > 1)) throw std::invalid_argument("profile evaluation requires t > 1");
}

ProfilePoint ProfileEvaluator::point(double t, double x, double y, bool with_derivatives) const {
    ProfilePoint p;
    x -= pp_.origin[0];
    y -= pp_.origin[1];
    double r2 = x * x + y * y;
    double rc = t * (1.0 - pp_.delta_cone);
    if (r2 >= rc * rc) return p;

    double s2 = t * t - r2;
    double s = std::sqrt(s2);
    double br = t / s;
    double mu1 = x / s, mu2 = y / s;
    p.inside = true;
    p.s = s;
    p.bracket = br;

    auto f0 = ft_phi(fs_, 0, mu1, mu2);
    auto f1 = ft_phi(fs_, 1, mu1, mu2);
    double br2 = br * br;
    p.p1 = -br2 * f0.imag() - br * f1.real();
    p.q1 = br2 * f0.real() - br * f1.imag();
    p.amp2 = p.p1 * p.p1 + p.q1 * p.q1;

    std::complex<double> gc = f0 + std::complex<double>(0, 1) * f1 / br;
    double m = std::abs(gc);
    double psi_lit = -4.0 / (3.0 * M_PI) * br * m;
    double sgn = (mode_ == PsiMode::lambda_signed && pp_.lambda < 0) ? -1.0 : 1.0;
    p.psi_eff = (mode_ == PsiMode::zero) ? 0.0 : sgn * psi_lit;

    p.alpha = s + p.psi_eff * std::log(t);
    if (p.amp2 > 0) p.beta = beta(p.p1, p.q1);

    if (with_derivatives) {
        double mu1d = -mu1 * t / s2, mu2d = -mu2 * t / s2; // d mu / dt at fixed x
        double brd = -r2 / (s2 * s);                       // d<mu>/dt
        auto g0 = ft_phi_grad(fs_, 0, mu1, mu2);
        auto g1 = ft_phi_grad(fs_, 1, mu1, mu2);
        std::complex<double> f0d = g0[0] * mu1d + g0[1] * mu2d;
        std::complex<double> f1d = g1[0] * mu1d + g1[1] * mu2d;

        p.dp1_dt = -2.0 * br * brd * f0.imag() - br2 * f0d.imag() - brd * f1.real() -
                   br * f1d.real();
        p.dq1_dt = 2.0 * br * brd * f0.real() + br2 * f0d.real() - brd * f1.imag() -
                   br * f1d.imag();
        p.damp2_dt = 2.0 * (p.p1 * p.dp1_dt + p.q1 * p.dq1_dt);

        std::complex<double> gcd =
            f0d + std::complex<double>(0, 1) * (f1d * br - f1 * brd) / br2;
        double md = (m > 0) ? (gc.real() * gcd.real() + gc.imag() * gcd.imag()) / m : 0.0;
        double psid_lit = -4.0 / (3.0 * M_PI) * (brd * m + br * md);
        double psid_eff = (mode_ == PsiMode::zero) ? 0.0 : sgn * psid_lit;

        p.dalpha_dt = t / s + psid_eff * std::log(t) + p.psi_eff / t;
        p.dbeta_dt = (p.amp2 > 0) ? (p.p1 * p.dq1_dt - p.q1 * p.dp1_dt) / p.amp2 : 0.0;
    }
    return p;
}

double ProfileEvaluator::u_ap(double t, double x, double y) const {
    require_t(t);
    ProfilePoint p = point(t, x, y);
    if (!p.inside || p.amp2 == 0) return 0.0;
    return (p.p1 * std::cos(p.alpha) + p.q1 * std::sin(p.alpha)) / t;
}

double ProfileEvaluator::du_ap_dt(double t, double x, double y) const {
    require_t(t);
    ProfilePoint p = point(t, x, y, true);
    if (!p.inside || p.amp2 == 0) return 0.0;
    double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
    double env = p.p1 * ca + p.q1 * sa;
    return -env / (t * t) +
           (p.dp1_dt * ca + p.dq1_dt * sa + (-p.p1 * sa + p.q1 * ca) * p.dalpha_dt) / t;
}

double ProfileEvaluator::v_ap_at(const ProfilePoint& p, double t, double* dvdt) const {
    if (!p.inside || p.amp2 == 0) {
        if (dvdt) *dvdt = 0;
        return 0.0;
    }
    double phase = p.alpha - p.beta;
    std::complex<double> z(std::cos(phase), std::sin(phase));
    std::complex<double> z2 = z * z;
    std::complex<double> w = z2 * z; // n = 3
    double t2 = t * t, t3 = t2 * t;
    double v = 0, dv = 0;
    double rate = p.dalpha_dt - p.dbeta_dt;
    for (int n = 3; n <= pp_.n_max; n += 2) {
        double c = gn_[n] * pp_.lambda;
        v += c * p.amp2 * w.real();
        if (dvdt)
            dv += c * (-2.0 * p.amp2 * w.real() / t3 + p.damp2_dt * w.real() / t2 -
                       p.amp2 * n * rate * w.imag() / t2);
        w *= z2;
    }
    if (dvdt) *dvdt = dv;
    return v / t2;
}

double ProfileEvaluator::v_ap(double t, double x, double y) const {
    require_t(t);
    ProfilePoint p = point(t, x, y);
    return v_ap_at(p, t, nullptr);
}

double ProfileEvaluator::dv_ap_dt(double t, double x, double y) const {
    require_t(t);
    ProfilePoint p = point(t, x, y, true);
    double dv = 0;
    v_ap_at(p, t, &dv);
    return dv;
}

double ProfileEvaluator::a(double t, double x, double y) const {
    require_t(t);
    ProfilePoint p = point(t, x, y);
    if (!p.inside || p.amp2 == 0) return 0.0;
    double u = (p.p1 * std::cos(p.alpha) + p.q1 * std::sin(p.alpha)) / t;
    return u + v_ap_at(p, t, nullptr);
}

double ProfileEvaluator::da_dt(double t, double x, double y) const {
    require_t(t);
    ProfilePoint p = point(t, x, y, true);
    if (!p.inside || p.amp2 == 0) return 0.0;
    double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
    double env = p.p1 * ca + p.q1 * sa;
    double du = -env / (t * t) +
                (p.dp1_dt * ca + p.dq1_dt * sa + (-p.p1 * sa + p.q1 * ca) * p.dalpha_dt) / t;
    double dv = 0;
    v_ap_at(p, t, &dv);
    return du + dv;
}

RealField ProfileEvaluator::sample(const Grid2D& g, double t, Field which) const {
    require_t(t);
    RealField f(g);
    parallel_rows(g.n, [&](int iy) {
        double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix) {
            double x = g.coord(ix);
            bool need_d = (which == Field::da_dt);
            ProfilePoint p = point(t, x, y, need_d);
            if (!p.inside || p.amp2 == 0) continue;
            double val = 0;
            double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
            double u = (p.p1 * ca + p.q1 * sa) / t;
            switch (which) {
                case Field::uap: val = u; break;
                case Field::vap: val = v_ap_at(p, t, nullptr); break;
                case Field::a: val = u + v_ap_at(p, t, nullptr); break;
                case Field::da_dt: {
                    double du = -(p.p1 * ca + p.q1 * sa) / (t * t) +
                                (p.dp1_dt * ca + p.dq1_dt * sa +
                                 (-p.p1 * sa + p.q1 * ca) * p.dalpha_dt) /
                                    t;
                    double dv = 0;
                    v_ap_at(p, t, &dv);
                    val = du + dv;
                    break;
                }
            }
            f.at(ix, iy) = val;
        }
    });
    return f;
}

RealField ProfileEvaluator::sample_harmonic(const Grid2D& g, double t, int n) const {
    require_t(t);
    if (n < 2) throw std::invalid_argument("sample_harmonic: n must be >= 2");
    RealField f(g);
    if (n % 2 == 0) return f;
    double coeff = gn_coeff(n) * pp_.lambda;
    parallel_rows(g.n, [&](int iy) {
        double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix) {
            double x = g.coord(ix);
            ProfilePoint p = point(t, x, y);
            if (!p.inside || p.amp2 == 0) continue;
            f.at(ix, iy) = coeff * p.amp2 * std::cos(n * (p.alpha - p.beta)) / (t * t);
        }
    });
    return f;
}

} // namespace nlkg
