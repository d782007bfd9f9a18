#include "nlkg/scattering.hh"

#include <cmath>
#include <cstring>

#include "nlkg/decomposition.hh"
#include "nlkg/parallel.hh"

namespace nlkg {

void TimeSampledField::validate() const {
    if (times.size() != fields.size() || times.empty())
        throw std::invalid_argument("TimeSampledField: times/fields size mismatch");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("TimeSampledField: times must be strictly increasing");
    for (const auto& f : fields) f.check_same_grid(fields.front());
}

namespace {

// Int_a^b e^{i s tau} * linear(tau) dtau, with endpoint values qa, qb and
// endpoint phases za = e^{i s a}, zb = e^{i s b}
cplx linear_moment(double s, double a, double b, cplx qa, cplx qb, cplx za, cplx zb) {
    double delta = b - a;
    if (s == 0.0) return 0.5 * delta * (qa + qb);
    cplx is(0.0, s);
    cplx e0 = (zb - za) / is;
    cplx e1 = (b * zb - a * za) / is - e0 / is;
    return qa * e0 + (qb - qa) / delta * (e1 - a * e0);
}

} // namespace

RealField g_apply(const TimeSampledField& g, double t, double* tail_estimate, double d) {
    g.validate();
    const int m = static_cast<int>(g.times.size());
    if (!(t >= g.times.front() && t <= g.times.back()))
        throw std::invalid_argument("g_apply: t outside the sampled range");
    const Grid2D& gr = g.fields.front().grid;
    auto& ws = SpectralWorkspace::get(gr);

    std::vector<Spectrum> gh;
    gh.reserve(m);
    for (const auto& f : g.fields) gh.push_back(ws.forward(f));

    int j0 = 0;
    while (j0 + 1 < m && g.times[j0 + 1] <= t) ++j0;

    Spectrum out;
    out.grid = gr;
    out.c.assign(gh[0].c.size(), cplx(0, 0));
    const int nc = gr.n / 2 + 1;

    parallel_rows(gr.n, [&](int jy) {
        double ky = gr.freq(jy);
        for (int jx = 0; jx < nc; ++jx) {
            double kx = 2.0 * M_PI * jx / gr.length;
            double w = std::sqrt(1.0 + kx * kx + ky * ky);
            size_t idx = static_cast<size_t>(jy) * nc + jx;
            cplx sm(0, 0), sp(0, 0); // Int e^{-+ i w tau} g dtau from t to Tend
            for (int j = m - 2; j >= j0; --j) {
                double a = g.times[j], b = g.times[j + 1];
                cplx qa = gh[j].c[idx], qb = gh[j + 1].c[idx];
                if (j == j0 && t > a) {
                    qa += (qb - qa) * (t - a) / (b - a);
                    a = t;
                }
                cplx za = std::polar(1.0, -w * a), zb = std::polar(1.0, -w * b);
                sm += linear_moment(-w, a, b, qa, qb, za, zb);
                sp += linear_moment(w, a, b, qa, qb, std::conj(za), std::conj(zb));
            }
            cplx zt = std::polar(1.0, w * t);
            out.c[idx] = (zt * sm - std::conj(zt) * sp) / (cplx(0, 2.0) * w);
        }
    });

    if (tail_estimate) {
        double gl2 = norm_l2(g.fields.back());
        *tail_estimate = gl2 * g.times.back() / d; // C Tend^{-d}/d with C = ||g(Tend)|| Tend^{1+d}
    }
    return ws.inverse(out);
}

// ---------------------------------------------------------------------------
// Picard iteration on the Yang-Feldman equation.

namespace {

std::vector<float> to_f32(const std::vector<double>& v) {
    std::vector<float> o(v.size());
    for (size_t i = 0; i < v.size(); ++i) o[i] = static_cast<float>(v[i]);
    return o;
}

double l4_pow4(const RealField& f) {
    double s = 0;
    for (double x : f.v) {
        double x2 = x * x;
        s += x2 * x2;
    }
    return f.grid.h * f.grid.h * s;
}

// sup_i t_i^d ( h_half_i + (sum trapz ||.||_{L4}^4)^{1/4} ) from per-node data
double x_surrogate_from_parts(const std::vector<double>& tau, const std::vector<double>& hhalf,
                              const std::vector<double>& l4p4, double d) {
    int m = static_cast<int>(tau.size());
    double sup = 0;
    double acc = 0; // Int_{t_i}^{Tend} ||.||_{L4}^4
    for (int i = m - 2; i >= 0; --i) {
        acc += 0.5 * (tau[i + 1] - tau[i]) * (l4p4[i] + l4p4[i + 1]);
        double val = std::pow(tau[i], d) * (hhalf[i] + std::pow(acc, 0.25));
        sup = std::max(sup, val);
    }
    // last node has empty time integral
    sup = std::max(sup, std::pow(tau[m - 1], d) * hhalf[m - 1]);
    return sup;
}

double h_half_of_spectrum(const Spectrum& s) {
    const Grid2D& g = s.grid;
    int nc = g.n / 2 + 1;
    double acc = 0;
    for (int jy = 0; jy < g.n; ++jy) {
        double ky = g.freq(jy);
        for (int jx = 0; jx < nc; ++jx) {
            double kx = 2.0 * M_PI * jx / g.length;
            double wgt = (jx == 0 || jx == g.n / 2) ? 1.0 : 2.0;
            acc += wgt * std::sqrt(1.0 + kx * kx + ky * ky) *
                   std::norm(s.c[static_cast<size_t>(jy) * nc + jx]);
        }
    }
    return g.h / g.n * std::sqrt(acc);
}

} // namespace

PicardResult picard_solve(const ProfileEvaluator& ev, const Grid2D& g, const PicardOptions& opt) {
    if (!(opt.T > M_E && opt.T_end > opt.T))
        throw std::invalid_argument("picard_solve: need e < T < T_end");
    if (opt.n_tau < 16) throw std::invalid_argument("picard_solve: n_tau >= 16");

    const int m = opt.n_tau + 1;
    std::vector<double> tau(m);
    double rho = std::pow(opt.T_end / opt.T, 1.0 / opt.n_tau);
    for (int i = 0; i < m; ++i) tau[i] = opt.T * std::pow(rho, i);
    tau.front() = opt.T;
    tau.back() = opt.T_end;

    auto& ws = SpectralWorkspace::get(g);
    const size_t nfield = static_cast<size_t>(g.n) * g.n;
    const int nc = g.n / 2 + 1;
    const size_t nmode = static_cast<size_t>(g.n) * nc;
    const double lam = ev.params().lambda;

    // node caches: A, dA/dt, R = (box+1)A, Rt = (box+1)(dA/dt); float is
    // plenty for source assembly
    std::vector<std::vector<float>> A(m), At(m), R(m), Rt(m);
    for (int i = 0; i < m; ++i) {
        double t = tau[i], ht = opt.ht_coeff / t;
        RealField a0 = ev.sample(g, t, ProfileEvaluator::Field::a);
        RealField at0 = ev.sample(g, t, ProfileEvaluator::Field::da_dt);
        RealField am = ev.sample(g, t - ht, ProfileEvaluator::Field::a);
        RealField ap = ev.sample(g, t + ht, ProfileEvaluator::Field::a);
        RealField atm = ev.sample(g, t - ht, ProfileEvaluator::Field::da_dt);
        RealField atp = ev.sample(g, t + ht, ProfileEvaluator::Field::da_dt);
        R[i] = to_f32(dalembertian_plus_one(am, a0, ap, ht).v);
        Rt[i] = to_f32(dalembertian_plus_one(atm, at0, atp, ht).v);
        A[i] = to_f32(a0.v);
        At[i] = to_f32(at0.v);
    }

    // iterate state
    std::vector<std::vector<cplx>> vhat(m, std::vector<cplx>(nmode, cplx(0, 0)));
    std::vector<std::vector<cplx>> vthat(m, std::vector<cplx>(nmode, cplx(0, 0)));
    std::vector<std::vector<double>> v_real(m, std::vector<double>(nfield, 0.0));
    std::vector<std::vector<float>> vt_real(m, std::vector<float>(nfield, 0.0f));

    PicardReport rep;
    double first_incr = -1, prev_incr = -1;
    int consecutive_growth = 0;

    for (int it = 0; it < opt.max_iter; ++it) {
        // pass 1: extract fields, measure the increment, assemble the source
        std::vector<double> inc_hhalf(m, 0.0), inc_l4p4(m, 0.0);
        double q_end_l2 = 0;
        for (int i = 0; i < m; ++i) {
            Spectrum s;
            s.grid = g;
            s.c = std::move(vhat[i]);
            RealField v = ws.inverse(s);
            vhat[i] = std::move(s.c);
            s.c = std::move(vthat[i]);
            RealField vt = ws.inverse(s);
            vthat[i] = std::move(s.c);

            RealField incr = v;
            for (size_t p = 0; p < nfield; ++p) incr.v[p] -= v_real[i][p];
            inc_l4p4[i] = l4_pow4(incr);
            inc_hhalf[i] = h_half_of_spectrum(ws.forward(incr));

            std::memcpy(v_real[i].data(), v.v.data(), nfield * sizeof(double));
            for (size_t p = 0; p < nfield; ++p) vt_real[i][p] = static_cast<float>(vt.v[p]);

            // q = N(v+A) - N(A) - F = lam|v+A|(v+A) - R
            RealField q(g), qt(g);
            for (size_t p = 0; p < nfield; ++p) {
                double w = v.v[p] + A[i][p];
                q.v[p] = lam * std::abs(w) * w - R[i][p];
                qt.v[p] = 2.0 * lam * std::abs(w) * (vt.v[p] + At[i][p]) - Rt[i][p];
            }
            if (i == m - 1) q_end_l2 = norm_l2(q);
            vhat[i] = std::move(ws.forward(q).c);
            vthat[i] = std::move(ws.forward(qt).c);
        }
        rep.quadrature_tail = q_end_l2 * opt.T_end / ev.params().d;

        double incr_norm = x_surrogate_from_parts(tau, inc_hhalf, inc_l4p4, ev.params().d);
        bool stop = false;
        if (it >= 1) { // increment it measures v_it - v_{it-1}
            if (it == 1) {
                first_incr = incr_norm;
                if (first_incr == 0) stop = true; // trivial data, fixed point hit at once
            } else {
                double ratio = prev_incr > 0 ? incr_norm / prev_incr : 0.0;
                rep.contraction_ratios.push_back(ratio);
                consecutive_growth = ratio > 1.0 ? consecutive_growth + 1 : 0;
                if (consecutive_growth >= 2) {
                    rep.diverged = true;
                    stop = true;
                }
            }
            prev_incr = incr_norm;
            if (!stop && incr_norm < opt.stop_rel * first_incr) stop = true;
        }
        rep.iterates = it;
        if (stop || it == opt.max_iter - 1) break; // keep v at the last completed map

        // pass 2: v_{k+1} = -G[q_k], per mode, cumulative from T_end
        parallel_rows(g.n, [&](int jy) {
            double ky = g.freq(jy);
            std::vector<cplx> cp(m), cm(m), z(m);
            for (int jx = 0; jx < nc; ++jx) {
                double kx = 2.0 * M_PI * jx / g.length;
                double w = std::sqrt(1.0 + kx * kx + ky * ky);
                size_t idx = static_cast<size_t>(jy) * nc + jx;
                for (int i = 0; i < m; ++i) {
                    z[i] = std::polar(1.0, w * tau[i]);
                    cplx q = vhat[i][idx], qt = vthat[i][idx];
                    cplx rot = cplx(0, 1.0 / w) * qt;
                    cp[i] = 0.5 * (q + rot) * z[i];
                    cm[i] = 0.5 * (q - rot) * std::conj(z[i]);
                }
                cplx sm(0, 0), sp(0, 0);
                vhat[m - 1][idx] = cplx(0, 0);
                vthat[m - 1][idx] = cplx(0, 0);
                for (int j = m - 2; j >= 0; --j) {
                    double a = tau[j], b = tau[j + 1];
                    double delta = b - a;
                    // Int e^{-i w tau} q = Int cp e^{-2 i w tau} + Int cm
                    cplx za = std::conj(z[j] * z[j]), zb = std::conj(z[j + 1] * z[j + 1]);
                    sm += linear_moment(-2.0 * w, a, b, cp[j], cp[j + 1], za, zb) +
                          0.5 * delta * (cm[j] + cm[j + 1]);
                    // Int e^{+i w tau} q = Int cp + Int cm e^{2 i w tau}
                    sp += 0.5 * delta * (cp[j] + cp[j + 1]) +
                          linear_moment(2.0 * w, a, b, cm[j], cm[j + 1], std::conj(za),
                                        std::conj(zb));
                    cplx gval = (z[j] * sm - std::conj(z[j]) * sp) / (cplx(0, 2.0) * w);
                    cplx gder = 0.5 * (z[j] * sm + std::conj(z[j]) * sp);
                    vhat[j][idx] = -gval;
                    vthat[j][idx] = -gder;
                }
            }
        });
    }

    rep.converged =
        !rep.diverged && (rep.contraction_ratios.empty() || rep.contraction_ratios.back() <= 0.9) &&
        (first_incr == 0 || (prev_incr >= 0 && prev_incr < first_incr));

    // At loop exit vhat/vthat hold the last iterate's source spectra, so the
    // converged solution can be evaluated at arbitrary times by one more
    // application of the map.
    TimeSampledField v_eval;
    for (double t : opt.eval_times) {
        if (!(t >= opt.T && t <= opt.T_end))
            throw std::invalid_argument("picard_solve: eval time outside [T, T_end]");
        Spectrum out;
        out.grid = g;
        out.c.assign(nmode, cplx(0, 0));
        int j0 = 0;
        while (j0 + 1 < m && tau[j0 + 1] <= t) ++j0;
        parallel_rows(g.n, [&](int jy) {
            double ky = g.freq(jy);
            std::vector<cplx> cp(m), cm(m), z(m);
            for (int jx = 0; jx < nc; ++jx) {
                double kx = 2.0 * M_PI * jx / g.length;
                double w = std::sqrt(1.0 + kx * kx + ky * ky);
                size_t idx = static_cast<size_t>(jy) * nc + jx;
                for (int i = j0; i < m; ++i) {
                    z[i] = std::polar(1.0, w * tau[i]);
                    cplx q = vhat[i][idx], qt = vthat[i][idx];
                    cplx rot = cplx(0, 1.0 / w) * qt;
                    cp[i] = 0.5 * (q + rot) * z[i];
                    cm[i] = 0.5 * (q - rot) * std::conj(z[i]);
                }
                cplx sm(0, 0), sp(0, 0);
                for (int j = m - 2; j >= j0; --j) {
                    double a = tau[j], b = tau[j + 1];
                    cplx ca_p = cp[j], ca_m = cm[j], za = std::conj(z[j] * z[j]);
                    if (j == j0 && t > a) {
                        double f = (t - a) / (b - a);
                        ca_p = (1.0 - f) * cp[j] + f * cp[j + 1];
                        ca_m = (1.0 - f) * cm[j] + f * cm[j + 1];
                        cplx zt = std::polar(1.0, w * t);
                        za = std::conj(zt * zt);
                        a = t;
                    }
                    double delta = b - a;
                    cplx zb = std::conj(z[j + 1] * z[j + 1]);
                    sm += linear_moment(-2.0 * w, a, b, ca_p, cp[j + 1], za, zb) +
                          0.5 * delta * (ca_m + cm[j + 1]);
                    sp += 0.5 * delta * (ca_p + cp[j + 1]) +
                          linear_moment(2.0 * w, a, b, ca_m, cm[j + 1], std::conj(za),
                                        std::conj(zb));
                }
                cplx zt = std::polar(1.0, w * t);
                out.c[idx] = -(zt * sm - std::conj(zt) * sp) / (cplx(0, 2.0) * w);
            }
        });
        v_eval.times.push_back(t);
        v_eval.fields.push_back(ws.inverse(out));
    }

    PicardResult res;
    res.v_eval = std::move(v_eval);
    res.tau = tau;
    res.report = rep;
    res.v.times = tau;
    res.vt.times = tau;
    for (int i = 0; i < m; ++i) {
        RealField f(g);
        std::memcpy(f.v.data(), v_real[i].data(), nfield * sizeof(double));
        res.v.fields.push_back(std::move(f));
        RealField ft(g);
        for (size_t p = 0; p < nfield; ++p) ft.v[p] = vt_real[i][p];
        res.vt.fields.push_back(std::move(ft));
    }

    // X norm of the final iterate
    std::vector<double> hh(m), l4(m);
    for (int i = 0; i < m; ++i) {
        hh[i] = norm_h_half(res.v.fields[i]);
        l4[i] = l4_pow4(res.v.fields[i]);
    }
    res.report.x_norm_final = x_surrogate_from_parts(tau, hh, l4, ev.params().d);
    return res;
}

// ---------------------------------------------------------------------------
// Backward splitting integrator.

TimeSampledField backward_evolve(const ProfileEvaluator& ev, const Grid2D& g,
                                 const EvolveOptions& opt) {
    if (!(opt.T < opt.T_end)) throw std::invalid_argument("backward_evolve: need T < T_end");
    double lam = std::isnan(opt.lambda_override) ? ev.params().lambda : opt.lambda_override;

    std::vector<double> marks = opt.record_times;
    for (double t : marks)
        if (t < opt.T || t > opt.T_end)
            throw std::invalid_argument("backward_evolve: record time outside [T, T_end]");
    std::sort(marks.begin(), marks.end());
    if (marks.empty()) marks.push_back(opt.T);

    RealField u = ev.sample(g, opt.T_end, ProfileEvaluator::Field::a);
    RealField ut = ev.sample(g, opt.T_end, ProfileEvaluator::Field::da_dt);
    double linf0 = std::max(norm_linf(u), 1e-300);

    TimeSampledField out;
    if (!marks.empty() && marks.back() == opt.T_end) {
        out.times.push_back(opt.T_end);
        out.fields.push_back(u);
        marks.pop_back();
    }

    auto kick = [&](RealField& vel, const RealField& pos, double dtau) {
        for (size_t i = 0; i < vel.v.size(); ++i)
            vel.v[i] += dtau * lam * std::abs(pos.v[i]) * pos.v[i];
    };

    double t = opt.T_end;
    while (!marks.empty()) {
        double target = marks.back();
        marks.pop_back();
        double span = t - target;
        long nsteps = std::lround(span / opt.dt);
        if (nsteps < 1 || std::abs(nsteps * opt.dt - span) > 1e-9 * std::max(1.0, span))
            throw std::invalid_argument("backward_evolve: dt must divide the record spans");
        double dtau = -span / nsteps; // negative: backward
        // Strang, telescoped: L(d/2) K [L(d) K]^{n-1} L(d/2)
        std::tie(u, ut) = kg_linear_step(u, ut, 0.5 * dtau);
        for (long s = 0; s < nsteps; ++s) {
            kick(ut, u, dtau);
            if (s + 1 < nsteps) {
                std::tie(u, ut) = kg_linear_step(u, ut, dtau);
            } else {
                std::tie(u, ut) = kg_linear_step(u, ut, 0.5 * dtau);
            }
            if (norm_linf(u) > opt.blowup_factor * linf0)
                throw std::runtime_error("backward_evolve: field grew past the blow-up guard");
        }
        t = target;
        out.times.push_back(t);
        out.fields.push_back(u);
    }
    std::reverse(out.times.begin(), out.times.end());
    std::reverse(out.fields.begin(), out.fields.end());
    out.validate();
    return out;
}

ConvergenceReport convergence_report(const TimeSampledField& u, const ProfileEvaluator& ev) {
    u.validate();
    ConvergenceReport rep;
    rep.d = ev.params().d;
    for (size_t i = 0; i < u.times.size(); ++i) {
        double t = u.times[i];
        const Grid2D& g = u.fields[i].grid;
        RealField diff = u.fields[i] - ev.sample(g, t, ProfileEvaluator::Field::uap);
        RealField diff_a = u.fields[i] - ev.sample(g, t, ProfileEvaluator::Field::a);
        ConvergenceRow row;
        row.t = t;
        row.err_uap = norm_l2(diff);
        row.weighted = std::pow(t, rep.d) * row.err_uap;
        row.err_a = norm_l2(diff_a);
        rep.rows.push_back(row);
        rep.sup_weighted = std::max(rep.sup_weighted, row.weighted);
    }
    return rep;
}

std::pair<double, double> strichartz_diagnostic(const TimeSampledField& g, int q) {
    if (q != 4) throw std::invalid_argument("strichartz_diagnostic: only q = 4 is supported");
    g.validate();
    int m = static_cast<int>(g.times.size());
    std::vector<double> lhs4(m), rhs2(m);
    for (int i = 0; i < m; ++i) {
        RealField gi = g_apply(g, g.times[i]);
        double l4 = norm_l4(gi);
        lhs4[i] = l4 * l4 * l4 * l4;
        rhs2[i] = norm_l2(
            apply_multiplier(g.fields[i], {[](double k) { return std::pow(1.0 + k * k, -0.25); }}));
    }
    double lhs = 0, rhs = 0;
    for (int i = 0; i + 1 < m; ++i) {
        double w = 0.5 * (g.times[i + 1] - g.times[i]);
        lhs += w * (lhs4[i] + lhs4[i + 1]);
        rhs += w * (rhs2[i] + rhs2[i + 1]);
    }
    return {std::pow(lhs, 0.25), rhs};
}

double x_norm_surrogate(const TimeSampledField& w, double d) {
    w.validate();
    int m = static_cast<int>(w.times.size());
    std::vector<double> hh(m), l4(m);
    for (int i = 0; i < m; ++i) {
        hh[i] = norm_h_half(w.fields[i]);
        l4[i] = l4_pow4(w.fields[i]);
    }
    return x_surrogate_from_parts(w.times, hh, l4, d);
}

} // namespace nlkg
