#pragma once

// Metric on S^2, stored as components in the round orthonormal frame
// {d_theta, d_phi / sin(theta)}. Frame components of smooth tensor fields
// stay bounded at the poles; coordinate components are recovered with the
// explicit sin(theta) factors where a formula needs them.

#include <cmath>
#include <stdexcept>

#include "collar/sphere/grid.hpp"

namespace collar {

struct SphereMetric {
    const SphereGrid* grid = nullptr;
    std::vector<double> f11, f12, f22;  // frame components

    SphereMetric() = default;
    explicit SphereMetric(const SphereGrid& g)
        : grid(&g), f11(g.size(), 1.0), f12(g.size(), 0.0), f22(g.size(), 1.0) {}

    static SphereMetric round(const SphereGrid& g) { return SphereMetric(g); }

    std::size_t size() const { return f11.size(); }

    double det_frame(std::size_t idx) const { return f11[idx] * f22[idx] - f12[idx] * f12[idx]; }

    // sqrt(det of coordinate components) / sin(theta); equals 1 for any
    // volume-preserving metric
    double area_element_ratio(std::size_t idx) const { return std::sqrt(det_frame(idx)); }

    // inverse frame components
    void inverse_frame(std::size_t idx, double& i11, double& i12, double& i22) const {
        const double d = det_frame(idx);
        i11 = f22[idx] / d;
        i12 = -f12[idx] / d;
        i22 = f11[idx] / d;
    }

    // coordinate components at node (i,j)
    double tt(int i, int j) const { return f11[grid->index(i, j)]; }
    double tp(int i, int j) const { return f12[grid->index(i, j)] * grid->sin_theta(i); }
    double pp(int i, int j) const {
        const double s = grid->sin_theta(i);
        return f22[grid->index(i, j)] * s * s;
    }

    bool is_round(double tol = 0.0) const {
        for (std::size_t k = 0; k < size(); ++k)
            if (std::abs(f11[k] - 1.0) > tol || std::abs(f12[k]) > tol ||
                std::abs(f22[k] - 1.0) > tol)
                return false;
        return true;
    }

    double max_deviation_from_round() const {
        double m = 0.0;
        for (std::size_t k = 0; k < size(); ++k) {
            // operator norm of the symmetric matrix (frame components - I)
            const double a = f11[k] - 1.0, b = f12[k], c = f22[k] - 1.0;
            const double mean = 0.5 * (a + c);
            const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
            m = std::max(m, std::max(std::abs(mean + rad), std::abs(mean - rad)));
        }
        return m;
    }

    void check_nondegenerate() const {
        for (std::size_t k = 0; k < size(); ++k)
            if (!(det_frame(k) > 0.0))
                throw std::runtime_error("SphereMetric: degenerate metric (nonpositive determinant)");
    }
};

// Symmetric trace-free 2-tensor on the grid, frame components. Generator of
// the exponentially converging metric families.
struct TraceFreeTensor {
    const SphereGrid* grid = nullptr;
    std::vector<double> b11, b12;  // b22 = -b11

    TraceFreeTensor() = default;
    explicit TraceFreeTensor(const SphereGrid& g)
        : grid(&g), b11(g.size(), 0.0), b12(g.size(), 0.0) {}

    // operator norm sup over nodes
    double sup_norm() const {
        double m = 0.0;
        for (std::size_t k = 0; k < b11.size(); ++k)
            m = std::max(m, std::hypot(b11[k], b12[k]));
        return m;
    }
};

}  // namespace collar
