// Residual measurements: the error function F = (box+1)A - N(A) and the
// per-corrector residuals, sampled over time ladders, plus the power-law
// fitter that turns norm tables into decay exponents.
//
// The time derivative in (box+1) is a centered difference with h_t = c / t
// (c ~ 0.2). The c/t scaling keeps the finite-difference contamination a
// t-independent small fraction of a residual that decays like t^{-2}: the
// fourth-derivative error term scales like h_t^2 * t^{-1} against a signal
// of size t^{-3}.
//
// Per-harmonic remainders use the exact relation c_n = (1 - n^2) gn_coeff(n):
// the n-th term of N_nr equals (1 - n^2) w_n, where w_n is the n-th corrector
// harmonic, so R_n = (box+1) w_n - (1 - n^2) w_n.

#ifndef NLKG_RESIDUAL_HH
#define NLKG_RESIDUAL_HH

#include <stdexcept>
#include <string>
#include <vector>

#include "nlkg/decomposition.hh"
#include "nlkg/grid.hh"
#include "nlkg/profile.hh"

namespace nlkg {

struct AliasingError : std::runtime_error {
    double fraction;
    explicit AliasingError(double f)
        : std::runtime_error("aliasing detector: top-octave spectral mass fraction " +
                             std::to_string(f) + " exceeds 1e-6; grid under-resolved"),
          fraction(f) {}
};

enum class ResidualVariant { full_A, uap_vs_Nr, vap_vs_Nnr, cross_term, uap_vs_fullN, no_psi };

const char* variant_name(ResidualVariant v);

struct ResidualSample {
    double t = 0;
    ResidualVariant variant = ResidualVariant::full_A;
    double l2 = 0;
    double linf = 0;
    int grid_n = 0;
    double box_L = 0;
    double h_t = 0;
};

struct RateFit {
    double p = 0;   // power exponent: norm ~ C t^{-p} (log t)^q
    int q = 0;      // log power used in the model
    double C = 0;
    double rms = 0; // rms residual of the fit in log space
    double window_lo = 0, window_hi = 0;
};

// least squares of log(norm) = log C - p log t + q log log t, q fixed
RateFit rate_fit(const std::vector<std::pair<double, double>>& samples, int q);

// F = (box+1) A - N(A); throws AliasingError if A(t) is under-resolved
RealField error_function(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g);

// (box+1) u_ap - N_r(u_ap)
RealField resonant_cancel_residual(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g);

// (box+1) v_ap - N_nr(u_ap)
RealField corrector_residual(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g);

// (box+1) u_ap - N(u_ap)  (no corrector; shows why v_ap is needed)
RealField uap_fulln_residual(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g);

// || N(u_ap + v_ap) - N(u_ap) ||_{L2}
double cross_term(const ProfileEvaluator& ev, double t, const Grid2D& g);

// R_n = (box+1) w_n - (1 - n^2) w_n for one odd harmonic
RealField per_n_remainder(const ProfileEvaluator& ev, double t, double h_t, const Grid2D& g,
                          int n);

// grid policy for ladder snapshots: box box_factor * t, spacing ~ h_target
Grid2D residual_grid(double t, double h_target, double box_factor, int n_cap, int n_min = 128);

struct LadderOptions {
    std::vector<double> times{50, 71, 100, 141, 200, 283, 400};
    double h_target = 0.45;
    double box_factor = 2.5;
    int n_cap = 2048;
    double ht_coeff = 0.2; // h_t = ht_coeff / t
    bool with_no_psi = true;
};

// run all variants over the ladder (no_psi uses a PsiMode::zero twin)
std::vector<ResidualSample> run_residual_ladder(const FinalState& fs, const ProfileParams& pp,
                                                const LadderOptions& opt);

} // namespace nlkg

#endif
