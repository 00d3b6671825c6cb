#pragma once

// Finite-difference weights on arbitrary node sets (Fornberg's recursion).
// Used for radial stencils on geometrically spaced grids, including the
// one-sided stencils at the ends of the radial range.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace collar {

// Weights w such that sum_i w[i] f(x[i]) approximates d^m/dx^m f at x0,
// for every m = 0..max_order. Returns weights[m][i].
inline std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& x,
                                                   int max_order) {
    const int nn = static_cast<int>(x.size());
    if (nn == 0) throw std::invalid_argument("fd_weights: empty node set");
    if (max_order >= nn)
        throw std::invalid_argument("fd_weights: derivative order needs more nodes");
    std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(nn, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < nn; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int m = mn; m >= 1; --m)
                    c[m][i] = c1 * (m * c[m - 1][i - 1] - c5 * c[m][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int m = mn; m >= 1; --m)
                c[m][j] = (c4 * c[m][j] - m * c[m - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

// First-derivative weights at x0 over the node set x.
inline std::vector<double> fd_weights_d1(double x0, const std::vector<double>& x) {
    return fd_weights(x0, x, 1)[1];
}

}  // namespace collar
