#pragma once

// Discretization of S^2 on a cell-centered latitude-longitude grid.
//
// Colatitude rows sit at theta_i = (i+1/2) pi/n_theta, so no node touches a
// pole. Quadrature weights are exact cell masses of the round area element,
//   w_ij = (cos(theta_i - h/2) - cos(theta_i + h/2)) * (2 pi / n_phi),
// which sum to 4 pi exactly and are proportional to sin(theta_i), so the
// same weights make the divergence-form Laplacian telescope exactly.
//
// Values beyond the pole are reconstructed by the across-pole identification
// (theta, phi) -> (-theta, phi + pi); tensor components with an odd number
// of theta indices flip sign under it.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace collar {

inline constexpr double kPi = std::numbers::pi_v<double>;
inline constexpr double kFourPi = 4.0 * std::numbers::pi_v<double>;

class SphereGrid {
  public:
    SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
        if (n_theta < 8 || n_phi < 8)
            throw std::invalid_argument("SphereGrid: resolution too small (need n_theta, n_phi >= 8)");
        if (n_phi % 2 != 0)
            throw std::invalid_argument("SphereGrid: n_phi must be even for across-pole stencils");
        h_theta_ = kPi / n_theta;
        h_phi_ = 2.0 * kPi / n_phi;
        theta_.resize(n_theta_);
        sin_theta_.resize(n_theta_);
        cos_theta_.resize(n_theta_);
        row_weight_.resize(n_theta_);
        for (int i = 0; i < n_theta_; ++i) {
            theta_[i] = (i + 0.5) * h_theta_;
            sin_theta_[i] = std::sin(theta_[i]);
            cos_theta_[i] = std::cos(theta_[i]);
            row_weight_[i] = std::cos(i * h_theta_) - std::cos((i + 1) * h_theta_);
        }
        phi_.resize(n_phi_);
        for (int j = 0; j < n_phi_; ++j) phi_[j] = j * h_phi_;
    }

    int n_theta() const { return n_theta_; }
    int n_phi() const { return n_phi_; }
    std::size_t size() const { return static_cast<std::size_t>(n_theta_) * n_phi_; }
    double h_theta() const { return h_theta_; }
    double h_phi() const { return h_phi_; }
    double theta(int i) const { return theta_[i]; }
    double phi(int j) const { return phi_[j]; }
    double sin_theta(int i) const { return sin_theta_[i]; }
    double cos_theta(int i) const { return cos_theta_[i]; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_phi_ + j; }

    // round-metric quadrature weight of node (i,j); strictly positive
    double weight(int i, int /*j*/) const { return row_weight_[i] * h_phi_; }
    double weight(std::size_t idx) const { return row_weight_[idx / n_phi_] * h_phi_; }

    // 2 sin(h/2) sin(theta_i): the row weight equals this times h_phi; the
    // ratio weight / (sin(theta) h_theta h_phi) is the constant below.
    double cell_mass_factor() const { return 2.0 * std::sin(0.5 * h_theta_) / h_theta_; }

    bool same_as(const SphereGrid& o) const {
        return n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_;
    }

  private:
    int n_theta_, n_phi_;
    double h_theta_, h_phi_;
    std::vector<double> theta_, phi_, sin_theta_, cos_theta_, row_weight_;
};

inline SphereGrid build_grid(int n_theta, int n_phi) { return SphereGrid(n_theta, n_phi); }

class SphereField {
  public:
    SphereField() = default;
    explicit SphereField(const SphereGrid& grid, double fill = 0.0)
        : grid_(&grid), values_(grid.size(), fill) {}
    SphereField(const SphereGrid& grid, std::vector<double> values)
        : grid_(&grid), values_(std::move(values)) {
        if (values_.size() != grid.size())
            throw std::invalid_argument("SphereField: value count does not match grid");
    }

    const SphereGrid& grid() const { return *grid_; }
    bool has_grid() const { return grid_ != nullptr; }
    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t idx) { return values_[idx]; }
    double operator[](std::size_t idx) const { return values_[idx]; }
    double& at(int i, int j) { return values_[grid_->index(i, j)]; }
    double at(int i, int j) const { return values_[grid_->index(i, j)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double min() const {
        double m = values_[0];
        for (double v : values_) m = std::min(m, v);
        return m;
    }
    double max() const {
        double m = values_[0];
        for (double v : values_) m = std::max(m, v);
        return m;
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }
    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    // mean over the ring adjacent to a pole; the reported pole value
    double pole_value(bool north) const {
        const int i = north ? 0 : grid_->n_theta() - 1;
        double s = 0.0;
        for (int j = 0; j < grid_->n_phi(); ++j) s += at(i, j);
        return s / grid_->n_phi();
    }

    template <typename F>
    static SphereField sample(const SphereGrid& grid, F&& f) {
        SphereField out(grid);
        for (int i = 0; i < grid.n_theta(); ++i)
            for (int j = 0; j < grid.n_phi(); ++j) out.at(i, j) = f(grid.theta(i), grid.phi(j));
        return out;
    }

  private:
    const SphereGrid* grid_ = nullptr;
    std::vector<double> values_;
};

// Across-pole ghost access. theta_parity is +1 for scalars and components
// with an even number of theta indices, -1 otherwise.
template <typename Getter>
inline double ghost_value(const SphereGrid& g, const Getter& get, int i, int j, int theta_parity) {
    const int np = g.n_phi();
    double sign = 1.0;
    while (i < 0 || i >= g.n_theta()) {
        if (i < 0) {
            i = -1 - i;
        } else {
            i = 2 * g.n_theta() - 1 - i;
        }
        j += np / 2;
        sign *= theta_parity;
    }
    j %= np;
    if (j < 0) j += np;
    return sign * get(i, j);
}

inline double ghost_value(const SphereField& f, int i, int j, int theta_parity = 1) {
    return ghost_value(f.grid(), [&](int ii, int jj) { return f.at(ii, jj); }, i, j, theta_parity);
}

}  // namespace collar
