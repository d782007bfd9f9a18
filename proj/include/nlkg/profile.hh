// The corrected asymptotic profile and its building blocks.
//
// Inside the light cone, with mu = x / sqrt(t^2 - |x|^2) and
// <mu> = sqrt(1 + |mu|^2) = t / sqrt(t^2 - |x|^2):
//
//   P1(mu) = -<mu>^2 Im phi0^(mu) - <mu> Re phi1^(mu)
//   Q1(mu) =  <mu>^2 Re phi0^(mu) - <mu> Im phi1^(mu)
//   Psi(mu) = -(4 / 3 pi) <mu> | phi0^(mu) + i <mu>^{-1} phi1^(mu) |
//
//   u_ap = t^{-1} [ P1 cos(alpha) + Q1 sin(alpha) ],
//   alpha = <mu>^{-1} t + Psi(mu) log t
//
//   v_ap = t^{-2} sum_{n>=2} [ Pn cos(n alpha) + Qn sin(n alpha) ],
//   Pn - i Qn = g_n e^{-i n beta},  g_n = gn_coeff(n) lambda (P1^2 + Q1^2)
//
// Fourier coefficients of |cos t| cos t drive the resonance bookkeeping:
//   c_n = -(8/pi) sin(n pi/2) / (n (n^2 - 4))  (odd n; zero for even n)
// and the corrector coefficients satisfy (1 - n^2) gn_coeff(n) = c_n exactly,
// which is the per-harmonic cancellation the second approximation exists for.
//
// The literal Psi above cancels the resonant part for lambda = +1; the
// lambda-signed variant multiplies it by sgn(lambda). Both are selectable and
// the residual pipeline measures which one cancels (see PsiMode).
//
// All evaluators are pure; field sampling parallelizes over rows with
// thread-count-independent output.

#ifndef NLKG_PROFILE_HH
#define NLKG_PROFILE_HH

#include <complex>
#include <vector>

#include "nlkg/final_data.hh"
#include "nlkg/grid.hh"

namespace nlkg {

struct HyperbolicCoords {
    double mu1 = 0, mu2 = 0;
    double bracket = 1; // <mu>
    bool inside = false;
};

struct ProfileParams {
    double lambda = 1.0;     // coupling, nonzero
    double d = 0.75;         // decay exponent in (1/2, 1)
    int n_max = 41;          // odd series truncation >= 3
    double delta_cone = 0.1; // cone cutoff at |x| = t (1 - delta_cone)
    double kappa = 1.0 / (2.0 * M_PI);
    // expansion center: the light cone sits at x = origin, and the final-data
    // atoms are expressed in the frame centered there
    std::array<double, 2> origin{0.0, 0.0};

    void validate() const;
};

enum class PsiMode { literal, zero, lambda_signed };

HyperbolicCoords hyperbolic(double t, double x, double y, double delta_cone);

std::pair<double, double> p1_q1(const FinalState& fs, double mu1, double mu2);
double psi(const FinalState& fs, double mu1, double mu2);

// branch in (0, 2pi]; requires P1^2 + Q1^2 > 0
double beta(double p1, double q1);

// c_n of |cos t| cos t; zero for n = 0 and even n
double fourier_coeff(int n);

// coefficient of lambda (P1^2+Q1^2) in g_n: 8 sin(n pi/2) / (pi n (n^2-1)(n^2-4))
double gn_coeff(int n);

// (Pn, Qn) for n >= 2
std::pair<double, double> pn_qn(int n, const FinalState& fs, double mu1, double mu2,
                                double lambda);

// delta_cone such that the amplitude sqrt(P1^2+Q1^2) at the cutoff is below
// rel_tol of its maximum (Gaussian decay makes this well defined)
double pick_delta_cone(const FinalState& fs, double rel_tol = 1e-12);

// Point-cached profile data; everything downstream of mu at one (t, x).
struct ProfilePoint {
    bool inside = false;
    double s = 0;           // sqrt(t^2 - |x|^2)
    double bracket = 1;     // <mu>
    double p1 = 0, q1 = 0;
    double amp2 = 0;        // P1^2 + Q1^2
    double psi_eff = 0;
    double alpha = 0;       // <mu>^{-1} t + psi_eff log t
    double beta = 0;        // defined when amp2 > 0
    // time derivatives at fixed x (for final-value data)
    double dalpha_dt = 0, dbeta_dt = 0, dp1_dt = 0, dq1_dt = 0, damp2_dt = 0;
};

class ProfileEvaluator {
  public:
    ProfileEvaluator(FinalState fs, ProfileParams pp, PsiMode mode = PsiMode::literal);

    ProfilePoint point(double t, double x, double y, bool with_derivatives = false) const;

    double u_ap(double t, double x, double y) const;
    double v_ap(double t, double x, double y) const;
    double a(double t, double x, double y) const;
    double du_ap_dt(double t, double x, double y) const;
    double dv_ap_dt(double t, double x, double y) const;
    double da_dt(double t, double x, double y) const;

    enum class Field { uap, vap, a, da_dt };
    RealField sample(const Grid2D& g, double t, Field which) const;

    // single corrector harmonic t^{-2} [Pn cos(n alpha) + Qn sin(n alpha)]
    RealField sample_harmonic(const Grid2D& g, double t, int n) const;

    const FinalState& final_state() const { return fs_; }
    const ProfileParams& params() const { return pp_; }
    PsiMode psi_mode() const { return mode_; }

  private:
    FinalState fs_;
    ProfileParams pp_;
    PsiMode mode_;
    std::vector<double> gn_; // gn_coeff table up to n_max

    void require_t(double t) const;
    double v_ap_at(const ProfilePoint& p, double t, double* dvdt) const;
};

} // namespace nlkg

#endif
