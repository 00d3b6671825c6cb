#pragma once

// Totally umbilic solver (K = p g, n = 3 numerics): momentum integration
// with the compatibility construction, then parabolic evolution of the
// lapse in the radial variable.
//
// Momentum: the overdetermined system d_r p = -4 pi J0, d_I p = -4 pi J_I
// has the unique decaying solution
//   p(r,.) = int_r^inf 4 pi J0 ds,   J_I = -int_r^inf d_I J0 ds,
//   C = p(r0,.) = int_{r0}^inf 4 pi J0 ds,
// solvable iff the compatibility identity d_I p = -4 pi J_I holds.
//
// Lapse: omega = N^-2 (Lambda = 0) or omega~ = u^-2, u = N sqrt(1+r^2)
// (Lambda < 0) is marched in r:
//   d_r v = a(r) v^-1 Lap_sigma v - (3/2) a(r) v^-2 |grad v|^2
//           - [ (n-2)/r + extra(r) + (r/(4(n-1))) |sigma'|^2 ] v
//           + (R(sigma) - Rbar r^2) (n-1)^-1 / (r S(r)),
// with a = 1/((n-1) r S), S = 1 and extra = 0 for Lambda = 0,
// S = 1 + r^2 and extra = 2r/(1+r^2) for Lambda < 0, and
// Rbar = 16 pi mu + 2 Lambda - (n-1) n p^2.
//
// Scheme: the Laplacian (linearized at the current v) is implicit, gradient
// and reaction terms explicit, trapezoidal corrector, step-doubling error
// control targeting a relative local error per step, hard cap dr <= 0.01 r.
//
// Comparison barriers (all n; marched alongside as the scalar ODEs they
// solve, sharing the envelope tables with the stepper):
//   lo' = -[ (n-2)/r + extra + r A*(r) ] lo + [R - r^2 Rbar]_* /((n-1) r S),
//   hi' = -[ (n-2)/r + extra + r A_*(r) ] hi + [R - r^2 Rbar]^* /((n-1) r S),
// A = |sigma'|^2/(4(n-1)), lo(1) = min omega(1), hi(1) = max omega(1).
// Parabolicity of the start data requires 0 < phi < 1/sqrt(K) when
//   K = sup_{r>=1} { -int_1^r [tau^{n-3} R/(n-1) - tau^{n-1} Rbar/(n-1)]_*
//                        exp(int_1^tau s (|sigma'|^2)^*/(4(n-1)) ds) dtau }
// is positive.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "collar/data.hpp"
#include "collar/matter.hpp"
#include "collar/tolerances.hpp"

namespace collar {

// ---------------------------------------------------------------------------
// momentum

struct UmbilicMomentum {
    const SphereGrid* sphere = nullptr;
    RadialGrid grid;
    MatterModel model;
    SphereField amplitude;           // A_J samples
    SphereField C;                   // boundary value p(r0,.)
    std::vector<SphereField> p;      // per radial node
    std::vector<SphereField> j1, j2; // angular momentum, frame components
    double compat_residual = 0.0;
    std::shared_ptr<SuffixIntegral> radial;  // int_r^{rmax} s^-(b+1) ds + tail

    // p at an arbitrary radius (tail quadrature times the angular profile)
    SphereField p_field(double r) const {
        SphereField out = amplitude;
        const double s = 4.0 * kPi * radial->at(r);
        for (auto& v : out.values()) v *= s;
        return out;
    }
    double p_scalar(double r, std::size_t node) const {
        return 4.0 * kPi * radial->at(r) * amplitude[node];
    }
};

inline UmbilicMomentum integrate_p_umbilic(const MatterModel& model, const RadialGrid& grid,
                                           const SphereGrid& sphere,
                                           const Tolerances& tol = {}) {
    if (!(model.decay_b > 0.5 * grid.n))
        throw std::invalid_argument("integrate_p_umbilic: decay_b at or below n/2 (divergent tail)");
    UmbilicMomentum out;
    out.sphere = &sphere;
    out.grid = grid;
    out.model = model;
    out.amplitude = model.j0_amp.sample(sphere);
    const double b = model.decay_b;
    out.radial = std::make_shared<SuffixIntegral>(
        grid, [b](double s) { return std::pow(s, -b - 1.0); },
        power_law_tail(std::pow(grid.r_max, -b - 1.0), grid.r_max, b + 1.0));

    out.p.reserve(grid.size());
    out.j1.reserve(grid.size());
    out.j2.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.p.push_back(SphereField(sphere));
        const double s = 4.0 * kPi * out.radial->at_node(i);
        for (std::size_t m = 0; m < sphere.size(); ++m) out.p[i][m] = s * out.amplitude[m];
        SphereField a, bfld;
        model.jI_frame(sphere, grid.nodes[i], a, bfld);
        out.j1.push_back(std::move(a));
        out.j2.push_back(std::move(bfld));
    }
    out.C = out.p.front();

    // compatibility: d_I p + 4 pi J_I = 0, angular derivatives by central
    // differences (frame components)
    double res = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 16)) {
        SphereField g1, g2;
        gradient_frame(out.p[i], g1, g2);
        for (std::size_t m = 0; m < sphere.size(); ++m) {
            res = std::max(res, std::abs(g1[m] + 4.0 * kPi * out.j1[i][m]));
            res = std::max(res, std::abs(g2[m] + 4.0 * kPi * out.j2[i][m]));
            scale = std::max(scale, std::abs(g1[m]) + std::abs(g2[m]));
        }
    }
    out.compat_residual = res;
    const double h = sphere.h_theta();
    if (res > std::max(tol.compat, 50.0 * h * h * (scale + 1e-30)))
        throw std::runtime_error("integrate_p_umbilic: compatibility residual above tolerance");
    return out;
}

// ---------------------------------------------------------------------------
// envelope machinery shared by the stepper, barriers, and admissibility

namespace umbilic_detail {

// R(sigma(r)) via per-node interpolation in eps = exp(-lambda (r - r0));
// exact constant 2 for the round family
class CurvatureTable {
  public:
    CurvatureTable() = default;
    CurvatureTable(const MetricFamily& family, double r_min, int samples = 33)
        : family_(&family), round_(family.is_round()) {
        if (round_) return;
        eps_hi_ = family.epsilon(r_min);
        samples_.reserve(samples);
        for (int k = 0; k < samples; ++k) {
            const double eps = eps_hi_ * k / (samples - 1.0);
            samples_.push_back(curvature_at_eps(family, eps));
        }
    }

    SphereField scalar_curvature(double r) const {
        if (round_) return SphereField(family_->grid(), 2.0);
        const double eps = family_->epsilon(r);
        const int n = static_cast<int>(samples_.size());
        const double x = eps / eps_hi_ * (n - 1);
        int lo = std::max(0, std::min(static_cast<int>(x) - 1, n - 4));
        SphereField out(family_->grid());
        double L[4];
        for (int a = 0; a < 4; ++a) {
            L[a] = 1.0;
            for (int b = 0; b < 4; ++b)
                if (a != b) L[a] *= (x - (lo + b)) / (double(a) - b);
        }
        for (std::size_t m = 0; m < out.size(); ++m) {
            double acc = 0.0;
            for (int a = 0; a < 4; ++a) acc += L[a] * samples_[lo + a][m];
            out[m] = 2.0 * acc;  // R = 2 K
        }
        return out;
    }

  private:
    static SphereField curvature_at_eps(const MetricFamily& family, double eps) {
        // evaluate the family at the radius where epsilon(r) = eps
        if (eps <= 0.0) {
            SphereField K(family.grid(), 1.0);
            return K;
        }
        const double r = family.r0() - std::log(eps) / family.lambda();
        return gauss_curvature(family.metric_at(r));
    }
    const MetricFamily* family_ = nullptr;
    bool round_ = true;
    double eps_hi_ = 1.0;
    std::vector<SphereField> samples_;
};

struct Envelopes {
    double lo = 0.0, hi = 0.0;
};

// all r-dependent coefficient data the stepper and barriers consume; the
// r-independent angular profiles are sampled once
class CoefficientProvider {
  public:
    CoefficientProvider(const MatterModel& model, const UmbilicMomentum& momentum,
                        const MetricFamily& family, double r_start)
        : model_(&model), momentum_(&momentum), family_(&family),
          table_(family, std::min(r_start, 1.0)) {
        mu_amp_ = model.mu_amp.sample(family.grid());
        qB2_ = SphereField(family.grid());
        if (!family.is_round()) {
            const TraceFreeTensor& B = family.generator();
            for (std::size_t m = 0; m < qB2_.size(); ++m)
                qB2_[m] = B.b11[m] * B.b11[m] + B.b12[m] * B.b12[m];
        }
    }

    const SphereGrid& grid() const { return family_->grid(); }

    SphereField scalar_curvature(double r) const { return table_.scalar_curvature(r); }

    // |sigma'(r)|^2 = 2 lambda^2 eps(r)^2 |B|^2 pointwise
    SphereField sigma_prime_norm2(double r) const {
        SphereField out = qB2_;
        const double eps = family_->epsilon(r);
        const double c = 2.0 * family_->lambda() * family_->lambda() * eps * eps;
        for (auto& v : out.values()) v *= c;
        return out;
    }

    double p_at(double r, std::size_t node) const { return momentum_->p_scalar(r, node); }
    double mu_at(double r, std::size_t node) const {
        return mu_amp_[node] * std::pow(r, -model_->decay_c);
    }

    // bracket(r,.) = R(sigma) - r^2 Rbar,
    // Rbar = 16 pi mu + 2 Lambda - (n-1) n p^2
    SphereField bracket(double r, int n) const {
        SphereField out = scalar_curvature(r);
        const double mu_scale = 16.0 * kPi * std::pow(r, -model_->decay_c);
        const double p_scale = 4.0 * kPi * momentum_->radial->at(r);
        const double r2 = r * r;
        for (std::size_t m = 0; m < out.size(); ++m) {
            const double p = p_scale * momentum_->amplitude[m];
            const double rbar =
                mu_scale * mu_amp_[m] + 2.0 * model_->Lambda - (n - 1.0) * n * p * p;
            out[m] -= r2 * rbar;
        }
        return out;
    }
    Envelopes bracket_env(double r, int n) const {
        SphereField b = bracket(r, n);
        return {b.min(), b.max()};
    }
    Envelopes sigma_prime_env(double r) const {
        double q_lo = 1e300, q_hi = 0.0;
        for (std::size_t m = 0; m < qB2_.size(); ++m) {
            q_lo = std::min(q_lo, qB2_[m]);
            q_hi = std::max(q_hi, qB2_[m]);
        }
        const double eps = family_->epsilon(r);
        const double c = 2.0 * family_->lambda() * family_->lambda() * eps * eps;
        return {c * q_lo, c * q_hi};
    }

  private:
    const MatterModel* model_;
    const UmbilicMomentum* momentum_;
    const MetricFamily* family_;
    CurvatureTable table_;
    SphereField mu_amp_, qB2_;
};

// divergence-form Laplacian as a sparse matrix; matches laplace_beltrami
// entry for entry (across-pole ghosts become regular couplings)
inline Eigen::SparseMatrix<double> assemble_laplacian(const SphereMetric& m) {
    const SphereGrid& g = *m.grid;
    const int nt = g.n_theta(), np = g.n_phi();
    const double ht = g.h_theta(), hp = g.h_phi();
    const auto N = static_cast<Eigen::Index>(g.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.size() * 12);

    auto wrap = [&](int i, int j, double& sign) {
        sign = 1.0;
        if (i < 0) {
            i = -1 - i;
            j += np / 2;
        } else if (i >= nt) {
            i = 2 * nt - 1 - i;
            j += np / 2;
        }
        j %= np;
        if (j < 0) j += np;
        return g.index(i, j);
    };
    auto add = [&](std::size_t row, int i, int j, double v) {
        double sign;
        const std::size_t col = wrap(i, j, sign);
        trip.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                          sign * v);
    };

    for (int i = 0; i < nt; ++i) {
        const double s_row = g.sin_theta(i);
        for (int j = 0; j < np; ++j) {
            const std::size_t row = g.index(i, j);
            const double norm = 1.0 / (s_row * std::sqrt(m.det_frame(row)));
            // theta faces iF = i (between i-1 and i) and iF = i+1
            for (int f = 0; f < 2; ++f) {
                const int iF = i + f;  // face index
                if (iF == 0 || iF == nt) continue;  // pole faces carry no flux
                const double sgn = f == 0 ? -1.0 : 1.0;  // divergence orientation
                const std::size_t a = g.index(iF - 1, j), b = g.index(iF, j);
                const double f11 = 0.5 * (m.f11[a] + m.f11[b]);
                const double f12 = 0.5 * (m.f12[a] + m.f12[b]);
                const double f22 = 0.5 * (m.f22[a] + m.f22[b]);
                const double sqD = std::sqrt(f11 * f22 - f12 * f12);
                const double sF = std::sin(iF * ht);
                const double cmain = sgn * norm / ht * sF * f22 / (sqD * ht);
                add(row, iF, j, cmain);
                add(row, iF - 1, j, -cmain);
                // cross term: -f12 * average of central d_phi at the two rows
                const double ccross = sgn * norm / ht * (-f12) / sqD * 0.5 / (2.0 * hp);
                add(row, iF - 1, j + 1, ccross);
                add(row, iF - 1, j - 1, -ccross);
                add(row, iF, j + 1, ccross);
                add(row, iF, j - 1, -ccross);
            }
            // phi faces between (i, j-1)-(i, j) and (i, j)-(i, j+1)
            for (int f = 0; f < 2; ++f) {
                const int jl = f == 0 ? j - 1 : j;
                const double sgn = f == 0 ? -1.0 : 1.0;
                double sl, sr;
                const std::size_t a = wrap(i, jl, sl), b = wrap(i, jl + 1, sr);
                const double f11 = 0.5 * (m.f11[a] + m.f11[b]);
                const double f12 = 0.5 * (m.f12[a] + m.f12[b]);
                const double f22v = 0.5 * (m.f22[a] + m.f22[b]);
                const double sqD = std::sqrt(f11 * f22v - f12 * f12);
                const double cmain = sgn * norm / hp * (f11 / s_row) / (sqD * hp);
                add(row, i, jl + 1, cmain);
                add(row, i, jl, -cmain);
                const double ccross = sgn * norm / hp * (-f12) / sqD * 0.5 / (2.0 * ht);
                add(row, i + 1, jl, ccross);
                add(row, i - 1, jl, -ccross);
                add(row, i + 1, jl + 1, ccross);
                add(row, i - 1, jl + 1, -ccross);
            }
        }
    }
    Eigen::SparseMatrix<double> L(N, N);
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

}  // namespace umbilic_detail

// ---------------------------------------------------------------------------
// admissibility constant and boundary condition

// K = sup_{r >= 1} of the appendix integral; finite under the integrability
// assumptions. The cumulative integral runs on a dense geometric ladder and
// the sup is refined by golden-section search around the ladder maximum.
inline double admissibility_K(const MatterModel& model, const UmbilicMomentum& momentum,
                              const MetricFamily& family, double r_max, int ladder = 600) {
    const int n = momentum.grid.n;
    umbilic_detail::CoefficientProvider coeff(model, momentum, family, 1.0);

    // integrand of the outer integral: -G_*(tau) * exp(int_1^tau s A^*(s) ds)
    auto A_sup = [&](double s) { return coeff.sigma_prime_env(s).hi / (4.0 * (n - 1.0)); };

    // cumulative on a geometric ladder
    std::vector<double> rs(ladder);
    const double ratio = std::pow(r_max, 1.0 / (ladder - 1));
    double r = 1.0;
    for (int k = 0; k < ladder; ++k) {
        rs[k] = r;
        r *= ratio;
    }
    rs.back() = r_max;

    auto G_star = [&](double tau) {
        // inf over the sphere of tau^{n-3} R/(n-1) - tau^{n-1} Rbar/(n-1)
        SphereField b = coeff.bracket(tau, n);
        return std::pow(tau, n - 3.0) / (n - 1.0) * b.min();
    };
    std::vector<double> expo(ladder, 0.0), cum(ladder, 0.0);
    for (int k = 1; k < ladder; ++k) {
        const double a = rs[k - 1], b = rs[k];
        expo[k] = expo[k - 1] + 0.5 * (b - a) * (a * A_sup(a) + b * A_sup(b));
        cum[k] = cum[k - 1] -
                 0.5 * (b - a) * (G_star(a) * std::exp(expo[k - 1]) + G_star(b) * std::exp(expo[k]));
    }
    int kmax = 0;
    for (int k = 1; k < ladder; ++k)
        if (cum[k] > cum[kmax]) kmax = k;
    if (kmax >= ladder - std::max(2, ladder / 50))
        throw std::runtime_error("admissibility_K: sup not attained inside the ladder");

    // golden-section refinement of the cumulative around the ladder maximum
    double K = cum[kmax];
    if (kmax > 0 && kmax + 1 < ladder) {
        auto cum_at = [&](double x) {
            const int base = kmax > 0 ? kmax - 1 : 0;
            // integrate from the anchor node with a 9-point trapezoid refine
            double acc = cum[base], e = expo[base];
            const int steps = 9;
            double prev_r = rs[base];
            double prevA = prev_r * A_sup(prev_r), prevG = G_star(prev_r);
            for (int s2 = 1; s2 <= steps; ++s2) {
                const double rr = rs[base] + (x - rs[base]) * s2 / steps;
                const double curA = rr * A_sup(rr);  // s A^*(s)
                const double g = G_star(rr);
                const double de = 0.5 * (rr - prev_r) * (prevA + curA);
                acc -= 0.5 * (rr - prev_r) * (prevG * std::exp(e) + g * std::exp(e + de));
                e += de;
                prev_r = rr;
                prevA = curA;
                prevG = g;
            }
            return acc;
        };
        double a = rs[kmax - 1], b = rs[kmax + 1];
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = cum_at(x1), f2 = cum_at(x2);
        for (int it = 0; it < 40; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = cum_at(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = cum_at(x1);
            }
        }
        K = std::max(K, std::max(f1, f2));
    }
    // the sup includes the empty integral at r = 1
    return std::max(K, 0.0);
}

struct BoundaryAdmissibility {
    double lhs = 0.0;  // inf over the sphere of 16 pi^2 (int_{r0}^inf J0)^2
    double rhs = 0.0;  // sup_t of the displayed integral
    bool admissible = false;
};

// Advisory check for generalized-apparent-horizon boundary data (n = 3):
//   16 pi^2 (int J0)^2 > sup_t int_1^t (8 pi tau^2 mu - R/2 - 3 tau^2 p^2)_*
//                              exp(int_1^tau s (|sigma'|^2)^* / 8 ds) dtau.
inline BoundaryAdmissibility boundary_admissibility(const MatterModel& model,
                                                    const UmbilicMomentum& momentum,
                                                    const MetricFamily& family,
                                                    int ladder = 400) {
    BoundaryAdmissibility out;
    const SphereGrid& g = family.grid();
    umbilic_detail::CoefficientProvider coeff(model, momentum, family, 1.0);

    double lhs = 1e300;
    for (std::size_t m = 0; m < g.size(); ++m) {
        const double p0 = momentum.p.front()[m];  // 4 pi int_{r0}^inf J0
        lhs = std::min(lhs, p0 * p0);
    }
    out.lhs = lhs;

    auto integrand_lo = [&](double tau) {
        SphereField mu = model.mu_field(g, tau);
        SphereField R = coeff.scalar_curvature(tau);
        double lo = 1e300;
        for (std::size_t m = 0; m < g.size(); ++m) {
            const double p = momentum.p_scalar(tau, m);
            lo = std::min(lo, 8.0 * kPi * tau * tau * mu[m] - 0.5 * R[m] -
                                  3.0 * tau * tau * p * p);
        }
        return lo;
    };
    auto A_sup = [&](double s) { return coeff.sigma_prime_env(s).hi / 8.0; };

    std::vector<double> rs(ladder);
    const double ratio = std::pow(momentum.grid.r_max, 1.0 / (ladder - 1));
    double r = 1.0;
    for (int k = 0; k < ladder; ++k) {
        rs[k] = r;
        r *= ratio;
    }
    double sup = 0.0, cum = 0.0, expo = 0.0;
    for (int k = 1; k < ladder; ++k) {
        const double a = rs[k - 1], b = rs[k];
        const double de = 0.5 * (b - a) * (a * A_sup(a) + b * A_sup(b));
        cum += 0.5 * (b - a) *
               (integrand_lo(a) * std::exp(expo) + integrand_lo(b) * std::exp(expo + de));
        expo += de;
        sup = std::max(sup, cum);
    }
    out.rhs = sup;
    out.admissible = out.lhs > out.rhs;
    return out;
}

// ---------------------------------------------------------------------------
// the parabolic run

struct StepRecord {
    double r = 0.0, dr = 0.0;
    double omega_min = 0.0, omega_max = 0.0;
    double barrier_lo = 0.0, barrier_hi = 0.0;
};

struct ParabolicRun {
    RadialGrid grid;
    SphereField phi;                  // initial lapse N(r0,.)
    double K_admissible = 0.0;
    std::vector<SphereField> omega;   // omega (or omega~) at the radial nodes
    std::vector<SphereField> inv_N;   // recovered 1/N at the radial nodes
    std::vector<double> barrier_lo, barrier_hi;  // at the radial nodes
    std::vector<StepRecord> step_log;
    double min_barrier_slack = 1e300;  // min over accepted steps of both gaps
};

namespace umbilic_detail {

struct EvolutionCoeffs {
    // at radius r: S = 1 or 1+r^2, extra = 0 or 2r/(1+r^2)
    double S = 1.0, extra = 0.0;
};

inline EvolutionCoeffs evolution_coeffs(double r, double Lambda) {
    if (Lambda < 0.0) return {1.0 + r * r, 2.0 * r / (1.0 + r * r)};
    return {1.0, 0.0};
}

}  // namespace umbilic_detail

// March the lapse variable from grid.r0 (normalized to 1) to grid.r_max.
// phi must satisfy the parabolicity window 0 < phi < 1/sqrt(K) when K > 0.
inline ParabolicRun evolve_lapse(const SphereField& phi, const MatterModel& model,
                                 const UmbilicMomentum& momentum, const MetricFamily& family,
                                 const RadialGrid& grid, const SphereGrid& sphere,
                                 const Tolerances& tol = {}) {
    using namespace umbilic_detail;
    if (grid.n != 3) throw std::invalid_argument("evolve_lapse: n = 3 only");
    if (std::abs(grid.r0 - 1.0) > 1e-12)
        throw std::invalid_argument(
            "evolve_lapse: start radius must be normalized to r0 = 1 before the run");
    const int n = grid.n;
    const double Lambda = grid.Lambda;

    ParabolicRun run;
    run.grid = grid;
    run.phi = phi;

    // parabolicity gate; for Lambda < 0 the evolved variable starts at
    // u(1) = phi sqrt(1 + r0^2), and the window applies to it
    run.K_admissible = admissibility_K(model, momentum, family, grid.r_max);
    const double start_scale = Lambda < 0.0 ? std::sqrt(1.0 + grid.r0 * grid.r0) : 1.0;
    const double phi_max = phi.max() * start_scale, phi_min = phi.min();
    if (!(phi_min > 0.0))
        throw std::invalid_argument("evolve_lapse: initial lapse must be positive");
    if (run.K_admissible > 0.0 && !(phi_max < 1.0 / std::sqrt(run.K_admissible)))
        throw std::invalid_argument(
            "evolve_lapse: initial data outside the parabolicity window 0 < phi < 1/sqrt(K)");

    CoefficientProvider coeff(model, momentum, family, 1.0);

    // state: v = omega (Lambda = 0) or omega~ (Lambda < 0)
    const std::size_t M = sphere.size();
    Eigen::VectorXd v(M);
    const double S0 = evolution_coeffs(grid.r0, Lambda).S;
    for (std::size_t m = 0; m < M; ++m) {
        const double w = 1.0 / phi[m];   // 1/N at the start
        v[m] = w * w / (Lambda < 0.0 ? S0 : 1.0);
    }

    // explicit part of the right-hand side at radius r for state x
    auto explicit_rhs = [&](double r, const Eigen::VectorXd& x, const SphereMetric& sigma,
                            const SphereField& sp2, const SphereField& bracket) {
        const EvolutionCoeffs ec = evolution_coeffs(r, Lambda);
        const double a = 1.0 / ((n - 1.0) * r * ec.S);
        SphereField xf(sphere);
        for (std::size_t m = 0; m < M; ++m) xf[m] = x[m];
        SphereField gn2 = gradient_norm2(xf, sigma);
        Eigen::VectorXd rhs(M);
        for (std::size_t m = 0; m < M; ++m) {
            const double lin = (n - 2.0) / r + ec.extra + r / (4.0 * (n - 1.0)) * sp2[m];
            rhs[m] = -1.5 * a * gn2[m] / (x[m] * x[m]) - lin * x[m] +
                     bracket[m] / ((n - 1.0) * r * ec.S);
        }
        return rhs;
    };

    // one implicit-explicit step r -> r + dr; returns false if the linear
    // solve failed or positivity broke
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    auto step = [&](double r, double dr, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
        const double r1 = r + dr;
        SphereMetric sig0 = family.metric_at(r);
        SphereMetric sig1 = family.metric_at(r1);
        SphereField sp0 = coeff.sigma_prime_norm2(r), sp1 = coeff.sigma_prime_norm2(r1);
        SphereField br0 = coeff.bracket(r, n), br1 = coeff.bracket(r1, n);
        Eigen::SparseMatrix<double> L0 = assemble_laplacian(sig0);
        Eigen::SparseMatrix<double> L1 = assemble_laplacian(sig1);

        const double a0 = 1.0 / ((n - 1.0) * r * evolution_coeffs(r, Lambda).S);
        const double a1 = 1.0 / ((n - 1.0) * r1 * evolution_coeffs(r1, Lambda).S);

        // predictor: backward Euler in the diffusion, explicit elsewhere
        Eigen::VectorXd rhs = x + dr * explicit_rhs(r, x, sig0, sp0, br0);
        Eigen::SparseMatrix<double> Mt = -dr * a1 * L1;
        for (std::size_t m = 0; m < M; ++m) Mt.coeffRef(m, m) += x[m];  // row scale by v
        // note: (I - dr a1 v^-1 L) x = rhs  <=>  (diag(v) - dr a1 L) x = v .* rhs
        Eigen::VectorXd rhs_scaled(M);
        for (std::size_t m = 0; m < M; ++m) rhs_scaled[m] = x[m] * rhs[m];
        solver.compute(Mt);
        if (solver.info() != Eigen::Success) return false;
        Eigen::VectorXd vp = solver.solve(rhs_scaled);
        if (solver.info() != Eigen::Success) return false;
        for (std::size_t m = 0; m < M; ++m)
            if (!(vp[m] > 0.0) || !std::isfinite(vp[m])) return false;

        // trapezoidal corrector, diffusion coefficient from the predictor
        Eigen::VectorXd dif0 = L0 * x;
        for (std::size_t m = 0; m < M; ++m) dif0[m] *= a0 / x[m];
        rhs = x + 0.5 * dr * (dif0 + explicit_rhs(r, x, sig0, sp0, br0) +
                              explicit_rhs(r1, vp, sig1, sp1, br1));
        Eigen::SparseMatrix<double> Mc = -0.5 * dr * a1 * L1;
        for (std::size_t m = 0; m < M; ++m) Mc.coeffRef(m, m) += vp[m];
        for (std::size_t m = 0; m < M; ++m) rhs_scaled[m] = vp[m] * rhs[m];
        solver.compute(Mc);
        if (solver.info() != Eigen::Success) return false;
        out = solver.solve(rhs_scaled);
        if (solver.info() != Eigen::Success) return false;
        for (std::size_t m = 0; m < M; ++m)
            if (!(out[m] > 0.0) || !std::isfinite(out[m])) return false;
        return true;
    };

    // barriers: scalar linear ODEs sharing the coefficient tables; RK4
    double b_lo, b_hi;
    {
        double mn = 1e300, mx = -1e300;
        for (std::size_t m = 0; m < M; ++m) {
            mn = std::min(mn, v[m]);
            mx = std::max(mx, v[m]);
        }
        b_lo = mn;
        b_hi = mx;
    }
    auto barrier_rhs = [&](double r, double lo, double hi, double& dlo, double& dhi) {
        const EvolutionCoeffs ec = evolution_coeffs(r, Lambda);
        const Envelopes A = coeff.sigma_prime_env(r);
        const Envelopes G = coeff.bracket_env(r, n);
        const double base = (n - 2.0) / r + ec.extra;
        dlo = -(base + r * A.hi / (4.0 * (n - 1.0))) * lo + G.lo / ((n - 1.0) * r * ec.S);
        dhi = -(base + r * A.lo / (4.0 * (n - 1.0))) * hi + G.hi / ((n - 1.0) * r * ec.S);
    };
    auto advance_barriers = [&](double r, double dr) {
        const int sub = 4;
        const double h = dr / sub;
        for (int s = 0; s < sub; ++s) {
            const double rr = r + s * h;
            double k1l, k1h, k2l, k2h, k3l, k3h, k4l, k4h;
            barrier_rhs(rr, b_lo, b_hi, k1l, k1h);
            barrier_rhs(rr + 0.5 * h, b_lo + 0.5 * h * k1l, b_hi + 0.5 * h * k1h, k2l, k2h);
            barrier_rhs(rr + 0.5 * h, b_lo + 0.5 * h * k2l, b_hi + 0.5 * h * k2h, k3l, k3h);
            barrier_rhs(rr + h, b_lo + h * k3l, b_hi + h * k3h, k4l, k4h);
            b_lo += h / 6.0 * (k1l + 2 * k2l + 2 * k3l + k4l);
            b_hi += h / 6.0 * (k1h + 2 * k2h + 2 * k3h + k4h);
        }
    };

    auto store_node = [&](std::size_t node_idx, double r) {
        SphereField om(sphere), w(sphere);
        const double S = evolution_coeffs(r, Lambda).S;
        for (std::size_t m = 0; m < M; ++m) {
            om[m] = v[m];
            const double omega_full = (Lambda < 0.0 ? S * v[m] : v[m]);
            w[m] = std::sqrt(omega_full);
        }
        run.omega.push_back(std::move(om));
        run.inv_N.push_back(std::move(w));
        run.barrier_lo.push_back(b_lo);
        run.barrier_hi.push_back(b_hi);
        (void)node_idx;
    };

    double r = grid.r0;
    store_node(0, r);
    double dr = std::min(tol.step_cap * r, 1e-3);
    std::size_t next_node = 1;
    const double rtol = tol.step_rtol;
    long iter_guard = 0;

    while (next_node < grid.size()) {
        const double target = grid.nodes[next_node];
        if (r + dr >= target) dr = target - r;
        if (dr < 1e-14 * r)
            throw std::runtime_error("evolve_lapse: step size underflow at r = " +
                                     std::to_string(r));
        if (++iter_guard > 4000000)
            throw std::runtime_error("evolve_lapse: step budget exhausted");

        Eigen::VectorXd full, half1, half2;
        const bool ok_full = step(r, dr, v, full);
        const bool ok_half = ok_full && step(r, 0.5 * dr, v, half1) &&
                             step(r + 0.5 * dr, 0.5 * dr, half1, half2);
        double err = 1e300;
        if (ok_full && ok_half) {
            err = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                err = std::max(err,
                               std::abs(full[m] - half2[m]) / (1e-14 + rtol * std::abs(half2[m])));
        }
        if (err <= 1.0) {
            v = half2;
            advance_barriers(r, dr);
            r += dr;
            double mn = 1e300, mx = -1e300;
            for (std::size_t m = 0; m < M; ++m) {
                mn = std::min(mn, v[m]);
                mx = std::max(mx, v[m]);
            }
            if (!(mn > 0.0))
                throw std::runtime_error("evolve_lapse: state degenerated (omega <= 0) at r = " +
                                         std::to_string(r));
            run.step_log.push_back({r, dr, mn, mx, b_lo, b_hi});
            run.min_barrier_slack =
                std::min(run.min_barrier_slack, std::min(mn - b_lo, b_hi - mx));
            if (r >= target - 1e-14 * target) {
                store_node(next_node, target);
                ++next_node;
            }
            dr = std::min({dr * std::min(2.5, std::max(0.3, 0.85 * std::pow(err + 1e-12, -1.0 / 3.0))),
                           tol.step_cap * r});
        } else {
            dr *= ok_full && ok_half ? std::max(0.25, 0.85 * std::pow(err, -1.0 / 3.0)) : 0.25;
        }
    }
    return run;
}

// assemble the solved family (k = p throughout)
inline InitialDataFamily make_data_from_umbilic(const ParabolicRun& run,
                                                const UmbilicMomentum& momentum,
                                                const MetricFamily& family,
                                                const MatterModel& model,
                                                BoundaryMode boundary) {
    InitialDataFamily d;
    d.grid = run.grid;
    d.sphere = momentum.sphere;
    d.family = family;
    d.matter = model;
    d.boundary = boundary;
    d.inv_N = run.inv_N;
    d.p = momentum.p;
    d.k = momentum.p;
    d.validate();
    return d;
}

}  // namespace collar
