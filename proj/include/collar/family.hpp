#pragma once

// Volume-preserving families sigma(r) on S^2 converging exponentially to the
// round metric. The exp-perturbed family is, pointwise in a round
// orthonormal frame,
//   sigma-hat(r) = exp(eps(r) B),   eps(r) = exp(-lambda (r - r0)),
// with B symmetric trace-free. The trace-free exponent keeps det sigma-hat
// equal to 1 identically, so the area form is preserved exactly, and
//   sigma'(r) = eps'(r) B exp(eps B),   |sigma'(r)|^2 = 2 lambda^2 eps^2 |B|^2,
// are available in closed form (|B|^2 = b11^2 + b12^2 pointwise).

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "collar/sphere/calculus.hpp"
#include "collar/sphere/grid.hpp"
#include "collar/sphere/metric.hpp"

namespace collar {

class MetricFamily {
  public:
    enum class Kind { round, exp_perturbed };

    static MetricFamily round_family(const SphereGrid& grid) {
        MetricFamily f;
        f.kind_ = Kind::round;
        f.grid_ = &grid;
        f.lambda_ = 1.0;
        f.r0_ = 1.0;
        return f;
    }

    static MetricFamily exp_perturbed_family(TraceFreeTensor B, double lambda, double r0,
                                             double trace_tol = 1e-12) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("exp_perturbed_family: lambda must be positive");
        if (!(r0 > 0.0)) throw std::invalid_argument("exp_perturbed_family: r0 must be positive");
        (void)trace_tol;  // B stores only (b11, b12); b22 = -b11 is structural
        MetricFamily f;
        f.kind_ = Kind::exp_perturbed;
        f.grid_ = B.grid;
        f.B_ = std::move(B);
        f.lambda_ = lambda;
        f.r0_ = r0;
        return f;
    }

    Kind kind() const { return kind_; }
    bool is_round() const { return kind_ == Kind::round || B_.sup_norm() == 0.0; }
    const SphereGrid& grid() const { return *grid_; }
    double lambda() const { return lambda_; }
    double r0() const { return r0_; }
    const TraceFreeTensor& generator() const { return B_; }

    double epsilon(double r) const { return std::exp(-lambda_ * (r - r0_)); }

    SphereMetric metric_at(double r) const {
        SphereMetric m(*grid_);
        if (kind_ == Kind::round) return m;
        const double eps = epsilon(r);
        for (std::size_t idx = 0; idx < grid_->size(); ++idx) {
            const double b1 = B_.b11[idx], b2 = B_.b12[idx];
            const double q = std::hypot(b1, b2) * eps;
            const double ch = std::cosh(q);
            const double sh = (q > 1e-8) ? std::sinh(q) / q : 1.0 + q * q / 6.0;
            m.f11[idx] = ch + sh * eps * b1;
            m.f12[idx] = sh * eps * b2;
            m.f22[idx] = ch - sh * eps * b1;
        }
        return m;
    }

    // frame components of sigma'(r) = -lambda eps B exp(eps B)
    void derivative_at(double r, SphereField& d11, SphereField& d12, SphereField& d22) const {
        d11 = SphereField(*grid_);
        d12 = SphereField(*grid_);
        d22 = SphereField(*grid_);
        if (kind_ == Kind::round) return;
        const double eps = epsilon(r);
        for (std::size_t idx = 0; idx < grid_->size(); ++idx) {
            const double b1 = B_.b11[idx], b2 = B_.b12[idx];
            const double qB2 = b1 * b1 + b2 * b2;
            const double q = std::sqrt(qB2) * eps;
            const double ch = std::cosh(q);
            const double sh = (q > 1e-8) ? std::sinh(q) / q : 1.0 + q * q / 6.0;
            const double c = -lambda_ * eps;
            d11[idx] = c * (ch * b1 + sh * eps * qB2);
            d12[idx] = c * ch * b2;
            d22[idx] = c * (-ch * b1 + sh * eps * qB2);
        }
    }

    // pointwise |sigma'(r)|^2 with respect to sigma(r); exact closed form
    SphereField derivative_norm2(double r) const {
        SphereField out(*grid_);
        if (kind_ == Kind::round) return out;
        const double eps = epsilon(r);
        const double c = 2.0 * lambda_ * lambda_ * eps * eps;
        for (std::size_t idx = 0; idx < grid_->size(); ++idx) {
            const double b1 = B_.b11[idx], b2 = B_.b12[idx];
            out[idx] = c * (b1 * b1 + b2 * b2);
        }
        return out;
    }

    // scalar curvature R(sigma(r)); exactly 2 for the round family
    SphereField scalar_curvature(double r) const {
        if (kind_ == Kind::round) return SphereField(*grid_, 2.0);
        SphereField K = gauss_curvature(metric_at(r));
        for (std::size_t idx = 0; idx < K.size(); ++idx) K[idx] *= 2.0;
        return K;
    }

  private:
    Kind kind_ = Kind::round;
    const SphereGrid* grid_ = nullptr;
    TraceFreeTensor B_;
    double lambda_ = 1.0;
    double r0_ = 1.0;
};

// Plain-text generator table: one line per node, "index b11 b12 b22".
// b11 + b22 must vanish to tolerance (trace-free check).
inline TraceFreeTensor load_generator_table(const SphereGrid& grid, std::istream& in,
                                            double trace_tol = 1e-10) {
    TraceFreeTensor B(grid);
    std::vector<bool> seen(grid.size(), false);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::size_t idx;
        double b11, b12, b22;
        if (!(ls >> idx >> b11 >> b12 >> b22))
            throw std::runtime_error("generator table: malformed line '" + line + "'");
        if (idx >= grid.size())
            throw std::runtime_error("generator table: node index out of range");
        if (std::abs(b11 + b22) > trace_tol)
            throw std::runtime_error("generator table: B not trace-free beyond tolerance");
        B.b11[idx] = b11;
        B.b12[idx] = b12;
        seen[idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw std::runtime_error("generator table: missing node " + std::to_string(i));
    return B;
}

inline TraceFreeTensor load_generator_file(const SphereGrid& grid, const std::string& path,
                                           double trace_tol = 1e-10) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("generator table: cannot open '" + path + "'");
    return load_generator_table(grid, in, trace_tol);
}

}  // namespace collar
