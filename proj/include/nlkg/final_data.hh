// Final state (phi_0, phi_1) as finite sums of Gaussian atoms. Everything
// downstream needs closed-form Fourier data, so the transform and its
// gradient are analytic:
//   phi^(xi) = kappa * sum_a  a * 2 pi sigma^2 * exp(-sigma^2 |xi|^2 / 2)
//                           * exp(-i x0 . xi)
// under the convention phi^(xi) = kappa Int e^{-i x.xi} phi(x) dx.
// kappa is a run-level constant; it is calibrated against the free linear
// evolution (see the calibrate-kappa pipeline) and carried here.

#ifndef NLKG_FINAL_DATA_HH
#define NLKG_FINAL_DATA_HH

#include <array>
#include <complex>
#include <vector>

#include "nlkg/grid.hh"

namespace nlkg {

struct GaussianAtom {
    double a = 0;                    // amplitude
    std::array<double, 2> x0{0, 0};  // center
    double sigma = 1;                // width, > 0
};

struct FinalState {
    std::vector<GaussianAtom> atoms0; // phi_0
    std::vector<GaussianAtom> atoms1; // phi_1
    double kappa = 1.0 / (2.0 * M_PI);
};

double eval_phi(const FinalState& fs, int which, double x, double y);

std::complex<double> ft_phi(const FinalState& fs, int which, double xi1, double xi2);

// gradient of ft_phi with respect to (xi1, xi2)
std::array<std::complex<double>, 2> ft_phi_grad(const FinalState& fs, int which, double xi1,
                                                double xi2);

// || phi0 ||_{H^2} + || x phi0 ||_{H^3} + || x^2 phi0 ||_{H^4}
//   + || phi1 ||_{H^1} + || x phi1 ||_{H^2} + || x^2 phi1 ||_{H^3},
// evaluated by sampling on an automatically sized grid with spectral Sobolev
// norms; throws if a grid refinement changes the value by more than 1%.
double y_norm(const FinalState& fs);

// rescale all amplitudes so y_norm(fs) == target (norm is homogeneous)
void scale_to_y_norm(FinalState& fs, double target);

} // namespace nlkg

#endif
