#pragma once

// Spherically symmetric solver, general n >= 3 and Lambda <= 0. The
// constraint system decouples into first-order ODEs
//   p' = -p/r + c1,            c1 = k/r - 8 pi J0 / (n-1),
//   f' = -(n-2) f / r + c2,    c2 = -r (2 k p + (n-2) p^2) + 16 pi r mu/(n-1),
// with the auxiliary f = 1 - 2 Lambda r^2 / (n(n-1)) - 1/N^2. The decaying
// solution for p is the tail integral
//   p(r) = -(1/r) int_r^inf s c1(s) ds
// (no boundary freedom), while f carries one constant,
//   f(r) = r^-(n-2) [ f0 + int_{r0}^r c2(s) s^(n-2) ds ],
// fixed by the lapse boundary value: N(r0)^-1 = 0 is a minimal boundary,
// N(r0)^-1 = |r0 p(r0)| a generalized apparent horizon.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "collar/matter.hpp"
#include "collar/radial.hpp"

namespace collar {

// ambient coefficient 1 - 2 Lambda r^2 / (n (n-1)); the square of 1/N for
// the vacuum "flat" solution
inline double ambient_factor(double r, int n, double Lambda) {
    return 1.0 - 2.0 * Lambda * r * r / (n * (n - 1.0));
}

class RadialP {
  public:
    RadialP() = default;
    RadialP(const RadialGrid& grid, const MatterModel& model) {
        if (!model.is_spherical())
            throw std::invalid_argument("solve_p: matter model is not spherically symmetric");
        const int n = grid.n;
        const double b = model.decay_b;
        auto c1 = [model, n](double s) {
            return model.k_at(s, 0.0, 0.0) / s - 8.0 * kPi / (n - 1.0) * model.j0_at(s, 0.0, 0.0);
        };
        auto integrand = [c1](double s) { return s * c1(s); };
        // s c1(s) ~ s^-b; tail needs b > 1, guaranteed by b > n/2 >= 3/2
        const double tail = power_law_tail(integrand(grid.r_max), grid.r_max, b);
        suffix_ = std::make_shared<SuffixIntegral>(grid, integrand, tail);
        values_.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            values_[i] = -suffix_->at_node(i) / grid.nodes[i];
        grid_ = &grid;
    }

    double operator()(double r) const { return -suffix_->at(r) / r; }
    double at_node(std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    const RadialGrid& grid() const { return *grid_; }

  private:
    const RadialGrid* grid_ = nullptr;
    std::shared_ptr<SuffixIntegral> suffix_;
    std::vector<double> values_;
};

inline RadialP solve_p(const MatterModel& model, const RadialGrid& grid) {
    return RadialP(grid, model);
}

class RadialF {
  public:
    RadialF() = default;
    RadialF(const RadialGrid& grid, const MatterModel& model, const RadialP& p, double f0)
        : grid_(&grid), f0_(f0), nm2_(grid.n - 2) {
        const int n = grid.n;
        auto c2 = [model, p, n](double s) {
            const double ps = p(s);
            const double ks = model.k_at(s, 0.0, 0.0);
            return -s * (2.0 * ks * ps + (n - 2.0) * ps * ps) +
                   16.0 * kPi * s * model.mu_at(s, 0.0, 0.0) / (n - 1.0);
        };
        auto integrand = [c2, n](double s) { return c2(s) * std::pow(s, n - 2.0); };
        prefix_ = std::make_shared<PrefixIntegral>(grid, integrand);
        values_.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            values_[i] = (f0_ + prefix_->at_node(i)) / std::pow(grid.nodes[i], nm2_);
    }

    double operator()(double r) const { return (f0_ + prefix_->at(r)) / std::pow(r, nm2_); }
    double at_node(std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    double f0() const { return f0_; }

  private:
    const RadialGrid* grid_ = nullptr;
    std::shared_ptr<PrefixIntegral> prefix_;
    std::vector<double> values_;
    double f0_ = 0.0;
    double nm2_ = 1.0;
};

inline RadialF solve_f(const RadialP& p, const MatterModel& model, double f0,
                       const RadialGrid& grid) {
    return RadialF(grid, model, p, f0);
}

// inv_N = sqrt(ambient - f); errors out if the argument turns nonpositive
// anywhere past the inner boundary (the metric degenerates there).
inline std::vector<double> lapse_inverse_from_f(const RadialF& f, const RadialGrid& grid) {
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double arg = ambient_factor(grid.nodes[i], grid.n, grid.Lambda) - f.at_node(i);
        if (i == 0 ? arg < -1e-14 : !(arg > 0.0))
            throw std::runtime_error("lapse_from_f: metric degenerates at r = " +
                                     std::to_string(grid.nodes[i]));
        w[i] = std::sqrt(std::max(arg, 0.0));
    }
    return w;
}

enum class BoundaryMode { minimal, generalized_horizon, prescribed };

struct BoundarySpec {
    BoundaryMode mode = BoundaryMode::minimal;
    double value = 0.0;  // used by prescribed: N(r0)^-1
};

// Chooses f0 from the lapse boundary condition by bisecting the boundary
// identity inv_N(r0)^2 = ambient(r0) - f0 r0^-(n-2) against the target.
inline double select_f0(const BoundarySpec& boundary, const RadialP& p, const MatterModel& model,
                        const RadialGrid& grid) {
    (void)model;
    double beta = 0.0;
    switch (boundary.mode) {
        case BoundaryMode::minimal: beta = 0.0; break;
        case BoundaryMode::generalized_horizon: beta = std::abs(grid.r0 * p.at_node(0)); break;
        case BoundaryMode::prescribed:
            if (boundary.value < 0.0)
                throw std::invalid_argument("select_f0: prescribed boundary value must be >= 0");
            beta = boundary.value;
            break;
    }
    const double amb = ambient_factor(grid.r0, grid.n, grid.Lambda);
    auto mismatch = [&](double f0) {
        return (amb - f0 / std::pow(grid.r0, grid.n - 2.0)) - beta * beta;
    };
    // expand a bracket around 0, then bisect; mismatch is affine decreasing
    double lo = -1.0, hi = 1.0;
    while (mismatch(lo) < 0.0) lo *= 2.0;
    while (mismatch(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mismatch(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct RadialSolution {
    RadialGrid grid;
    MatterModel model;
    BoundarySpec boundary;
    RadialP p;
    RadialF f;
    std::vector<double> inv_N;  // 1/N at the nodes
    double f0 = 0.0;

    double static_potential_at(double r) const {
        const double pr = p(r);
        return ambient_factor(r, grid.n, grid.Lambda) - f(r) - r * r * pr * pr;
    }
};

inline RadialSolution solve_spherical(const MatterModel& model, const RadialGrid& grid,
                                      const BoundarySpec& boundary) {
    RadialSolution sol;
    sol.grid = grid;
    sol.model = model;
    sol.boundary = boundary;
    sol.p = solve_p(model, grid);
    sol.f0 = select_f0(boundary, sol.p, model, grid);
    sol.f = solve_f(sol.p, model, sol.f0, grid);
    sol.inv_N = lapse_inverse_from_f(sol.f, grid);
    return sol;
}

struct StaticPotential {
    std::vector<double> h;          // per grid node
    std::vector<double> zeros;      // horizon-leaf radii, ascending
};

// h = 1/N^2 - r^2 p^2; each zero is a generalized apparent horizon among
// the leaves. Sign changes are located by bisection on the continuous
// evaluators.
inline StaticPotential static_potential(const RadialSolution& sol) {
    StaticPotential out;
    const auto& nodes = sol.grid.nodes;
    out.h.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double pr = sol.p.at_node(i);
        out.h[i] = sol.inv_N[i] * sol.inv_N[i] - nodes[i] * nodes[i] * pr * pr;
    }
    const double scale = 1.0 + std::abs(out.h[0]) + std::abs(out.h.back());
    if (std::abs(out.h[0]) <= 1e-12 * scale) out.zeros.push_back(nodes[0]);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (out.h[i] == 0.0 && i > 0) {
            out.zeros.push_back(nodes[i]);
            continue;
        }
        if (out.h[i] * out.h[i + 1] < 0.0) {
            double lo = nodes[i], hi = nodes[i + 1];
            double flo = sol.static_potential_at(lo);
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = sol.static_potential_at(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.zeros.push_back(0.5 * (lo + hi));
        }
    }
    return out;
}

}  // namespace collar
