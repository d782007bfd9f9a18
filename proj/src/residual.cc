#include "nlkg/residual.hh"

#include <cmath>

#include "nlkg/spectral.hh"

namespace nlkg {

const char* variant_name(ResidualVariant v) {
    switch (v) {
        case ResidualVariant::full_A: return "full_A";
        case ResidualVariant::uap_vs_Nr: return "uap_vs_Nr";
        case ResidualVariant::vap_vs_Nnr: return "vap_vs_Nnr";
        case ResidualVariant::cross_term: return "cross_term";
        case ResidualVariant::uap_vs_fullN: return "uap_vs_fullN";
        case ResidualVariant::no_psi: return "no_psi";
    }
    return "?";
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& samples, int q) {
    if (samples.size() < 4) throw std::invalid_argument("rate_fit: need at least 4 samples");
    double prev = 0;
    for (const auto& [t, y] : samples) {
        if (!(t > prev)) throw std::invalid_argument("rate_fit: t must be strictly increasing");
        if (!(y > 0)) throw std::invalid_argument("rate_fit: norms must be positive");
        prev = t;
    }
    // z = log y - q log log t  regressed on  {1, -log t}
    double sx = 0, sz = 0, sxx = 0, sxz = 0;
    int n = static_cast<int>(samples.size());
    std::vector<double> xs(n), zs(n);
    for (int i = 0; i < n; ++i) {
        double t = samples[i].first;
        xs[i] = std::log(t);
        zs[i] = std::log(samples[i].second) - q * std::log(std::log(t));
        sx += xs[i];
        sz += zs[i];
        sxx += xs[i] * xs[i];
        sxz += xs[i] * zs[i];
    }
    double det = n * sxx - sx * sx;
    double slope = (n * sxz - sx * sz) / det;
    double icept = (sz - slope * sx) / n;
    RateFit fit;
    fit.p = -slope;
    fit.q = q;
    fit.C = std::exp(icept);
    fit.window_lo = samples.front().first;
    fit.window_hi = samples.back().first;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        double r = zs[i] - (icept + slope * xs[i]);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

namespace {

void check_resolution(const RealField& f) {
    double frac = top_octave_fraction(f);
    if (frac > 1e-6) throw AliasingError(frac);
}

using Field = ProfileEvaluator::Field;

RealField box_plus_one_of(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g,
                          Field which, bool resolution_guard = true) {
    if (!(t > 1 + h_t)) throw std::invalid_argument("residual: requires t > 1 + h_t");
    RealField fm = ev.sample(g, t - h_t, which);
    RealField f0 = ev.sample(g, t, which);
    RealField fp = ev.sample(g, t + h_t, which);
    if (resolution_guard) check_resolution(f0);
    return dalembertian_plus_one(fm, f0, fp, h_t);
}

} // namespace

RealField error_function(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g) {
    RealField r = box_plus_one_of(ev, t, h_t, g, Field::a);
    r -= apply_n(ev.sample(g, t, Field::a), ev.params().lambda);
    return r;
}

RealField resonant_cancel_residual(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g) {
    RealField r = box_plus_one_of(ev, t, h_t, g, Field::uap);
    r -= sample_resonant(ev, g, t);
    return r;
}

RealField corrector_residual(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g) {
    RealField r = box_plus_one_of(ev, t, h_t, g, Field::vap);
    r -= sample_nonresonant(ev, g, t);
    return r;
}

RealField uap_fulln_residual(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g) {
    RealField r = box_plus_one_of(ev, t, h_t, g, Field::uap);
    r -= apply_n(ev.sample(g, t, Field::uap), ev.params().lambda);
    return r;
}

double cross_term(const ProfileEvaluator& ev, double t, const Grid2D& g) {
    if (!(t > 1)) throw std::invalid_argument("cross_term requires t > 1");
    RealField na = apply_n(ev.sample(g, t, Field::a), ev.params().lambda);
    na -= apply_n(ev.sample(g, t, Field::uap), ev.params().lambda);
    return norm_l2(na);
}

RealField per_n_remainder(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g,
                          int n) {
    if (!(t > 1 + h_t)) throw std::invalid_argument("per_n_remainder: requires t > 1 + h_t");
    RealField wm = ev.sample_harmonic(g, t - h_t, n);
    RealField w0 = ev.sample_harmonic(g, t, n);
    RealField wp = ev.sample_harmonic(g, t + h_t, n);
    RealField r = dalembertian_plus_one(wm, w0, wp, h_t);
    double lead = 1.0 - static_cast<double>(n) * n;
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] -= lead * w0.v[i];
    return r;
}

Grid2D residual_grid(double t, double h_target, double box_factor, int n_cap, int n_min) {
    double L = box_factor * t;
    int n = n_min;
    while (n < n_cap && L / n > h_target) n *= 2;
    return Grid2D::make(n, L);
}

std::vector<ResidualSample> run_residual_ladder(const FinalState& fs, const ProfileParams& pp,
                                                const LadderOptions& opt) {
    ProfileEvaluator ev(fs, pp, PsiMode::literal);
    ProfileEvaluator ev0(fs, pp, PsiMode::zero);
    std::vector<ResidualSample> out;
    for (double t : opt.times) {
        Grid2D g = residual_grid(t, opt.h_target, opt.box_factor, opt.n_cap);
        double h_t = opt.ht_coeff / t;
        auto push = [&](ResidualVariant var, double l2, double linf) {
            out.push_back({t, var, l2, linf, g.n, g.length, h_t});
        };
        RealField r = error_function(ev, t, h_t, g);
        push(ResidualVariant::full_A, norm_l2(r), norm_linf(r));
        r = resonant_cancel_residual(ev, t, h_t, g);
        push(ResidualVariant::uap_vs_Nr, norm_l2(r), norm_linf(r));
        r = corrector_residual(ev, t, h_t, g);
        push(ResidualVariant::vap_vs_Nnr, norm_l2(r), norm_linf(r));
        r = uap_fulln_residual(ev, t, h_t, g);
        push(ResidualVariant::uap_vs_fullN, norm_l2(r), norm_linf(r));
        push(ResidualVariant::cross_term, cross_term(ev, t, g), 0.0);
        if (opt.with_no_psi) {
            r = uap_fulln_residual(ev0, t, h_t, g);
            push(ResidualVariant::no_psi, norm_l2(r), norm_linf(r));
        }
    }
    return out;
}

} // namespace nlkg
