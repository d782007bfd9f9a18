#include "nlkg/final_data.hh"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlkg/spectral.hh"

namespace nlkg {

namespace {
const std::vector<GaussianAtom>& atoms_of(const FinalState& fs, int which) {
    if (which != 0 && which != 1) throw std::invalid_argument("final state component must be 0 or 1");
    return which == 0 ? fs.atoms0 : fs.atoms1;
}
} // namespace

double eval_phi(const FinalState& fs, int which, double x, double y) {
    double s = 0;
    for (const auto& at : atoms_of(fs, which)) {
        double dx = x - at.x0[0], dy = y - at.x0[1];
        s += at.a * std::exp(-(dx * dx + dy * dy) / (2.0 * at.sigma * at.sigma));
    }
    return s;
}

std::complex<double> ft_phi(const FinalState& fs, int which, double xi1, double xi2) {
    std::complex<double> s = 0;
    double k2 = xi1 * xi1 + xi2 * xi2;
    for (const auto& at : atoms_of(fs, which)) {
        double mass = at.a * 2.0 * M_PI * at.sigma * at.sigma;
        double phase = -(at.x0[0] * xi1 + at.x0[1] * xi2);
        s += mass * std::exp(-0.5 * at.sigma * at.sigma * k2) *
             std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return fs.kappa * s;
}

std::array<std::complex<double>, 2> ft_phi_grad(const FinalState& fs, int which, double xi1,
                                                double xi2) {
    std::array<std::complex<double>, 2> g{0.0, 0.0};
    double k2 = xi1 * xi1 + xi2 * xi2;
    for (const auto& at : atoms_of(fs, which)) {
        double mass = at.a * 2.0 * M_PI * at.sigma * at.sigma;
        double phase = -(at.x0[0] * xi1 + at.x0[1] * xi2);
        std::complex<double> base = mass * std::exp(-0.5 * at.sigma * at.sigma * k2) *
                                    std::complex<double>(std::cos(phase), std::sin(phase));
        double s2 = at.sigma * at.sigma;
        g[0] += base * std::complex<double>(-s2 * xi1, -at.x0[0]);
        g[1] += base * std::complex<double>(-s2 * xi2, -at.x0[1]);
    }
    g[0] *= fs.kappa;
    g[1] *= fs.kappa;
    return g;
}

namespace {

// one pass of the six weighted Sobolev terms on a given grid
double y_norm_on_grid(const FinalState& fs, const Grid2D& g) {
    auto sample = [&](int which, int weight) {
        RealField f(g);
        for (int iy = 0; iy < g.n; ++iy) {
            double y = g.coord(iy);
            for (int ix = 0; ix < g.n; ++ix) {
                double x = g.coord(ix);
                double w = weight == 2 ? x * x + y * y : 1.0;
                f.at(ix, iy) = w * eval_phi(fs, which, x, y);
            }
        }
        return f;
    };
    auto sample_w1 = [&](int which, int comp) {
        RealField f(g);
        for (int iy = 0; iy < g.n; ++iy) {
            double y = g.coord(iy);
            for (int ix = 0; ix < g.n; ++ix) {
                double x = g.coord(ix);
                f.at(ix, iy) = (comp == 0 ? x : y) * eval_phi(fs, which, x, y);
            }
        }
        return f;
    };

    double total = 0;
    for (int which = 0; which <= 1; ++which) {
        double s0 = which == 0 ? 2.0 : 1.0; // H^2 for phi0, H^1 for phi1
        total += sobolev_norm(sample(which, 0), s0);
        double a = sobolev_norm(sample_w1(which, 0), s0 + 1.0);
        double b = sobolev_norm(sample_w1(which, 1), s0 + 1.0);
        total += std::sqrt(a * a + b * b);
        total += sobolev_norm(sample(which, 2), s0 + 2.0);
    }
    return total;
}

Grid2D y_norm_grid(const FinalState& fs, int n) {
    double smax = 0, smin = 1e300, xmax = 0;
    auto scan = [&](const std::vector<GaussianAtom>& v) {
        for (const auto& at : v) {
            if (!(at.sigma > 0)) throw std::invalid_argument("GaussianAtom: sigma must be > 0");
            smax = std::max(smax, at.sigma);
            smin = std::min(smin, at.sigma);
            xmax = std::max({xmax, std::abs(at.x0[0]), std::abs(at.x0[1])});
        }
    };
    scan(fs.atoms0);
    scan(fs.atoms1);
    if (smax == 0) return Grid2D::make(n, 1.0); // empty state, value is 0 anyway
    double box = 2.0 * (xmax + 8.0 * smax);
    return Grid2D::make(n, box);
}

} // namespace

double y_norm(const FinalState& fs) {
    if (fs.atoms0.empty() && fs.atoms1.empty()) return 0.0;
    int n = 128;
    double coarse = y_norm_on_grid(fs, y_norm_grid(fs, n));
    double fine = y_norm_on_grid(fs, y_norm_grid(fs, 2 * n));
    if (coarse != 0 && std::abs(fine - coarse) > 0.01 * std::abs(fine))
        throw std::runtime_error("y_norm: grid under-resolution (refinement changed value > 1%)");
    return fine;
}

void scale_to_y_norm(FinalState& fs, double target) {
    double cur = y_norm(fs);
    if (cur == 0) throw std::invalid_argument("scale_to_y_norm: zero state");
    double s = target / cur;
    for (auto& at : fs.atoms0) at.a *= s;
    for (auto& at : fs.atoms1) at.a *= s;
}

} // namespace nlkg
