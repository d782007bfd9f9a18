// Final value machinery: the retarded integral operator
//
//   G[g](t) = Int_t^Tend sin((t - tau) B) B^{-1} g(tau) dtau,  B = sqrt(1-Lap)
//
// applied spectrally per mode, Picard iteration for
//
//   v = -G[ N(v + A) - N(A) - F ]
//
// (the sign makes (box+1) v = N(v+A) - N(A) - F; differentiating the kernel
// gives (box+1) G[g] = -g, which the tests pin numerically), an independent
// backward Strang-splitting NLKG integrator, and the convergence diagnostics.
//
// Quadrature: the kernel is integrated exactly on each ladder interval
// against a linear interpolant, mode by mode. Cumulative sums from T_end
// make the whole ladder cost O(n_tau) per mode. g_apply interpolates the
// raw samples linearly; the Picard path additionally carries the analytic
// time derivative of the source and interpolates the slowly varying
// half-wave envelopes c_pm = (g^ -+ (i/omega) g^_t)/2 e^{+- i omega tau}
// instead, so coarse geometric ladders remain accurate for oscillatory
// sources.

#ifndef NLKG_SCATTERING_HH
#define NLKG_SCATTERING_HH

#include <optional>
#include <vector>

#include "nlkg/grid.hh"
#include "nlkg/profile.hh"
#include "nlkg/spectral.hh"

namespace nlkg {

struct TimeSampledField {
    std::vector<double> times;    // strictly increasing
    std::vector<RealField> fields;

    void validate() const;
};

struct PicardReport {
    int iterates = 0;
    std::vector<double> contraction_ratios;
    double x_norm_final = 0;
    bool converged = false;
    bool diverged = false;
    double quadrature_tail = 0; // estimated truncation of Int_{Tend}^inf
};

struct ConvergenceRow {
    double t = 0;
    double err_uap = 0;   // || u - u_ap ||_{L2}
    double weighted = 0;  // t^d * err_uap
    double err_a = 0;     // || u - A ||_{L2}
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double d = 0.75;
    double sup_weighted = 0;
};

// G[g](t) by exact-kernel quadrature against the linear interpolant of g;
// optionally returns the estimated tail beyond the last sample assuming
// ||g(tau)|| <~ C tau^{-1-d}
RealField g_apply(const TimeSampledField& g, double t, double* tail_estimate = nullptr,
                  double d = 0.75);

struct PicardOptions {
    double T = 50;
    double T_end = 400;
    int n_tau = 60;       // geometric ladder T .. T_end, n_tau intervals
    int max_iter = 8;
    double ht_coeff = 0.2; // h_t = ht_coeff / t inside F
    double stop_rel = 1e-3;
    // extra output times in [T, T_end]; the converged iterate is evaluated
    // there by one more application of the integral map
    std::vector<double> eval_times;
};

struct PicardResult {
    TimeSampledField v;  // final iterate at the ladder nodes
    TimeSampledField vt;
    TimeSampledField v_eval; // at PicardOptions::eval_times
    PicardReport report;
    std::vector<double> tau; // the ladder
};

PicardResult picard_solve(const ProfileEvaluator& ev, const Grid2D& g, const PicardOptions& opt);

struct EvolveOptions {
    double T_end = 400;
    double T = 50;
    double dt = 0.125;
    std::vector<double> record_times{50, 71, 100, 141, 200};
    double blowup_factor = 10.0;
    double lambda_override = std::nan("");
};

// integrate (box+1)u = lambda |u|u backward from u(T_end) = A, u_t(T_end) =
// dA/dt (analytic); exact linear half-steps around pointwise kicks
TimeSampledField backward_evolve(const ProfileEvaluator& ev, const Grid2D& g,
                                 const EvolveOptions& opt);

ConvergenceReport convergence_report(const TimeSampledField& u, const ProfileEvaluator& ev);

// (LHS, RHS) of || G[g] ||_{L4 L4} <= C || (1-Lap)^{-1/4} g ||_{L1 L2}
std::pair<double, double> strichartz_diagnostic(const TimeSampledField& g, int q = 4);

// computable stand-in for the X_T norm: sup over the ladder of
// t^d ( ||w(t)||_{H^{1/2}} + ( Int_t^Tend ||w||_{L4}^4 )^{1/4} )
double x_norm_surrogate(const TimeSampledField& w, double d);

} // namespace nlkg

#endif
