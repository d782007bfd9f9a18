// Periodic square grid on [-L/2, L/2)^2 and a real scalar field sampled on it.
// Frequencies follow the standard FFT layout k_j = 2*pi*j/L, j in [-n/2, n/2).

#ifndef NLKG_GRID_HH
#define NLKG_GRID_HH

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlkg {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Grid2D {
    int n = 0;         // points per axis, power of two
    double length = 0; // box side
    double h = 0;      // spacing, length/n

    Grid2D() = default;

    static Grid2D make(int n, double length) {
        if (!is_power_of_two(n) || n < 8)
            throw std::invalid_argument("Grid2D: n must be a power of two, n >= 8 (got " +
                                        std::to_string(n) + ")");
        if (!(length > 0))
            throw std::invalid_argument("Grid2D: box length must be positive");
        Grid2D g;
        g.n = n;
        g.length = length;
        g.h = length / n;
        return g;
    }

    // physical coordinate of sample i along one axis
    double coord(int i) const { return -0.5 * length + h * i; }

    // dual frequency of index j (wrap-around layout)
    double freq(int j) const {
        int m = (j < n / 2) ? j : j - n;
        return 2.0 * M_PI * m / length;
    }

    double nyquist() const { return M_PI / h; }

    bool operator==(const Grid2D& o) const { return n == o.n && length == o.length; }
};

struct RealField {
    Grid2D grid;
    std::vector<double> v; // row-major, v[iy*n + ix]

    RealField() = default;
    explicit RealField(const Grid2D& g) : grid(g), v(static_cast<size_t>(g.n) * g.n, 0.0) {}

    double& at(int ix, int iy) { return v[static_cast<size_t>(iy) * grid.n + ix]; }
    double at(int ix, int iy) const { return v[static_cast<size_t>(iy) * grid.n + ix]; }

    size_t size() const { return v.size(); }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    RealField& operator+=(const RealField& o) {
        check_same_grid(o);
        for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    RealField& operator-=(const RealField& o) {
        check_same_grid(o);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    RealField& operator*=(double s) {
        for (double& x : v) x *= s;
        return *this;
    }

    void check_same_grid(const RealField& o) const {
        if (!(grid == o.grid)) throw std::invalid_argument("RealField: grid mismatch");
    }
};

inline RealField operator+(RealField a, const RealField& b) { return a += b; }
inline RealField operator-(RealField a, const RealField& b) { return a -= b; }
inline RealField operator*(double s, RealField a) { return a *= s; }

} // namespace nlkg

#endif
