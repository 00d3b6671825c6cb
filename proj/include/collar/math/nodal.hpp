#pragma once

// Quadrature over values sampled at grid nodes: per-interval integration of
// the local cubic interpolant (4-point stencil, 3-point Gauss rule), giving
// O(h^4) cumulative integrals on smooth data. Used for diagnostics that
// integrate solved fields along the radial grid.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace collar {

inline std::vector<double> cumulative_nodal_integral(const std::vector<double>& x,
                                                     const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (y.size() != n || n < 4)
        throw std::invalid_argument("cumulative_nodal_integral: need >= 4 matching samples");
    static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const std::size_t lo = (k == 0) ? 0 : std::min(k - 1, n - 4);
        const double a = x[k], b = x[k + 1];
        double acc = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
            double val = 0.0;
            for (std::size_t i = lo; i < lo + 4; ++i) {
                double L = 1.0;
                for (std::size_t j = lo; j < lo + 4; ++j)
                    if (j != i) L *= (t - x[j]) / (x[i] - x[j]);
                val += L * y[i];
            }
            acc += gw[q] * val;
        }
        out[k + 1] = out[k] + 0.5 * (b - a) * acc;
    }
    return out;
}

}  // namespace collar
