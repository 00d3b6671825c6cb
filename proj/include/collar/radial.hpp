#pragma once

// Radial grid (geometric spacing) and cumulative quadrature helpers that
// evaluate running integrals at arbitrary radii, anchored to per-interval
// adaptive Gauss-Kronrod integrals between grid nodes.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "collar/math/quadrature.hpp"

namespace collar {

struct RadialGrid {
    double r0 = 1.0;
    double r_max = 100.0;
    int n = 3;
    double Lambda = 0.0;
    std::vector<double> nodes;

    static RadialGrid geometric(double r0, double r_max, int count, int n, double Lambda) {
        if (!(r0 > 0.0) || !(r0 < r_max))
            throw std::invalid_argument("RadialGrid: need 0 < r0 < r_max");
        if (count < 8) throw std::invalid_argument("RadialGrid: too few nodes");
        RadialGrid g;
        g.r0 = r0;
        g.r_max = r_max;
        g.n = n;
        g.Lambda = Lambda;
        g.nodes.resize(count);
        const double ratio = std::pow(r_max / r0, 1.0 / (count - 1));
        double r = r0;
        for (int i = 0; i < count; ++i) {
            g.nodes[i] = r;
            r *= ratio;
        }
        g.nodes.back() = r_max;  // kill accumulated rounding
        return g;
    }

    std::size_t size() const { return nodes.size(); }
    int locate(double r) const {
        // largest i with nodes[i] <= r (clamped)
        if (r <= nodes.front()) return 0;
        if (r >= nodes.back()) return static_cast<int>(nodes.size()) - 1;
        int lo = 0, hi = static_cast<int>(nodes.size()) - 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (nodes[mid] <= r ? lo : hi) = mid;
        }
        return lo;
    }
};

// I(r) = int_r^{r_max} f + tail, evaluable at any r in [r0, r_max].
class SuffixIntegral {
  public:
    SuffixIntegral() = default;
    SuffixIntegral(const RadialGrid& grid, std::function<double(double)> f, double tail,
                   const QuadratureOptions& opt = {})
        : grid_(&grid), f_(std::move(f)), opt_(opt) {
        const auto& x = grid.nodes;
        suffix_.assign(x.size(), 0.0);
        suffix_.back() = tail;
        for (int i = static_cast<int>(x.size()) - 2; i >= 0; --i)
            suffix_[i] = suffix_[i + 1] + integrate_adaptive(f_, x[i], x[i + 1], opt_);
    }

    double at(double r) const {
        const int i = grid_->locate(r);
        if (r >= grid_->nodes.back()) return suffix_.back();
        return integrate_adaptive(f_, r, grid_->nodes[i + 1], opt_) + suffix_[i + 1];
    }
    double at_node(std::size_t i) const { return suffix_[i]; }

  private:
    const RadialGrid* grid_ = nullptr;
    std::function<double(double)> f_;
    QuadratureOptions opt_;
    std::vector<double> suffix_;
};

// I(r) = int_{r0}^{r} f, evaluable at any r in [r0, r_max].
class PrefixIntegral {
  public:
    PrefixIntegral() = default;
    PrefixIntegral(const RadialGrid& grid, std::function<double(double)> f,
                   const QuadratureOptions& opt = {})
        : grid_(&grid), f_(std::move(f)), opt_(opt) {
        const auto& x = grid.nodes;
        prefix_.assign(x.size(), 0.0);
        for (std::size_t i = 1; i < x.size(); ++i)
            prefix_[i] = prefix_[i - 1] + integrate_adaptive(f_, x[i - 1], x[i], opt_);
    }

    double at(double r) const {
        const int i = grid_->locate(r);
        return prefix_[i] + integrate_adaptive(f_, grid_->nodes[i], r, opt_);
    }
    double at_node(std::size_t i) const { return prefix_[i]; }

  private:
    const RadialGrid* grid_ = nullptr;
    std::function<double(double)> f_;
    QuadratureOptions opt_;
    std::vector<double> prefix_;
};

}  // namespace collar
