// The quadratic nonlinearity N(u) = lambda |u| u, the general splitting of a
// positively homogeneous quadratic F into c_even u^2 + c_odd |u|u, and the
// resonant / non-resonant decomposition of N(u_ap):
//
//   N(u_ap) = (8/3pi) lambda t^{-2} sqrt(P1^2+Q1^2) (P1 cos a + Q1 sin a)
//           + lambda t^{-2} (P1^2+Q1^2) sum_{n>=2} c_n cos(n(a - b))
//
// The first line is N_r, the remainder N_nr; the sum is truncated at the
// profile's n_max so the per-harmonic cancellation against (box+1) v_ap is
// term-by-term.

#ifndef NLKG_DECOMPOSITION_HH
#define NLKG_DECOMPOSITION_HH

#include "nlkg/grid.hh"
#include "nlkg/profile.hh"

namespace nlkg {

struct QuadraticNonlinearity {
    double c_even = 0; // coefficient of u^2
    double c_odd = 0;  // coefficient of |u| u

    double operator()(double u) const { return c_even * u * u + c_odd * std::abs(u) * u; }
};

// pointwise lambda |u| u
RealField apply_n(const RealField& u, double lambda);

// from the two probe values F(1), F(-1)
QuadraticNonlinearity split_quadratic(double f_plus, double f_minus);

double resonant_part(const ProfileEvaluator& ev, double t, double x, double y);
double nonresonant_part(const ProfileEvaluator& ev, double t, double x, double y);

RealField sample_resonant(const ProfileEvaluator& ev, const Grid2D& g, double t);
RealField sample_nonresonant(const ProfileEvaluator& ev, const Grid2D& g, double t);

// non-resonant sum restricted to harmonics <= n_cut (for per-harmonic checks)
RealField sample_nonresonant_upto(const ProfileEvaluator& ev, const Grid2D& g, double t,
                                  int n_cut);

} // namespace nlkg

#endif
