#pragma once

// Prescribed data (mu, J0, J_I, k): angular amplitude times radial power
// law, with the decay exponents of the solvable classes,
//   mu = A_mu(w) r^-c,  J0 = A_J(w) r^-(b+1),  k = A_k(w) r^-b,
// b > n/2, c > (n+2)/2. The closed forms make every downstream number
// independently checkable; improper integrals get finite quadrature plus an
// analytic power-law tail.
//
// In umbilic mode the angular momentum components are constructed from J0,
//   J_I = -int_r^inf d_I J0 ds = -(d_I A_J) r^-b / b,
// which is the unique decaying solution of the overdetermined system.

#include <cmath>
#include <stdexcept>

#include "collar/math/quadrature.hpp"
#include "collar/sphere/calculus.hpp"
#include "collar/sphere/harmonics.hpp"

namespace collar {

enum class AngularMomentumMode { explicit_zero, umbilic_derived };

struct MatterModel {
    int n = 3;
    double Lambda = 0.0;
    double decay_b = 2.0;
    double decay_c = 4.0;
    AngularAmplitude mu_amp, j0_amp, k_amp;
    AngularMomentumMode ji_mode = AngularMomentumMode::explicit_zero;

    bool is_vacuum() const { return mu_amp.is_zero() && j0_amp.is_zero() && k_amp.is_zero(); }
    bool is_spherical() const {
        return mu_amp.is_constant() && j0_amp.is_constant() && k_amp.is_constant();
    }

    double mu_at(double r, double th, double ph) const {
        return mu_amp.value(th, ph) * std::pow(r, -decay_c);
    }
    double j0_at(double r, double th, double ph) const {
        return j0_amp.value(th, ph) * std::pow(r, -decay_b - 1.0);
    }
    double k_at(double r, double th, double ph) const {
        return k_amp.value(th, ph) * std::pow(r, -decay_b);
    }

    SphereField mu_field(const SphereGrid& g, double r) const {
        SphereField f = mu_amp.sample(g);
        const double s = std::pow(r, -decay_c);
        for (auto& v : f.values()) v *= s;
        return f;
    }
    SphereField j0_field(const SphereGrid& g, double r) const {
        SphereField f = j0_amp.sample(g);
        const double s = std::pow(r, -decay_b - 1.0);
        for (auto& v : f.values()) v *= s;
        return f;
    }
    SphereField k_field(const SphereGrid& g, double r) const {
        SphereField f = k_amp.sample(g);
        const double s = std::pow(r, -decay_b);
        for (auto& v : f.values()) v *= s;
        return f;
    }

    // frame components (J_theta, J_phi / sin th)
    void jI_frame(const SphereGrid& g, double r, SphereField& j1, SphereField& j2) const {
        j1 = SphereField(g);
        j2 = SphereField(g);
        if (ji_mode == AngularMomentumMode::explicit_zero || j0_amp.is_constant()) return;
        SphereField g1, g2;
        j0_amp.sample_gradient(g, g1, g2);
        const double s = -std::pow(r, -decay_b) / decay_b;
        for (std::size_t i = 0; i < g.size(); ++i) {
            j1[i] = s * g1[i];
            j2[i] = s * g2[i];
        }
    }
};

inline MatterModel power_law_matter(AngularAmplitude mu_amp, AngularAmplitude j0_amp,
                                    AngularAmplitude k_amp, double decay_b, double decay_c,
                                    double Lambda, int n,
                                    AngularMomentumMode ji_mode = AngularMomentumMode::explicit_zero) {
    if (n < 3) throw std::invalid_argument("power_law_matter: dimension must be >= 3");
    if (!(Lambda <= 0.0)) throw std::invalid_argument("power_law_matter: Lambda must be <= 0");
    if (!(decay_b > 0.5 * n))
        throw std::invalid_argument("power_law_matter: decay_b must exceed n/2");
    if (!(decay_c > 0.5 * (n + 2)))
        throw std::invalid_argument("power_law_matter: decay_c must exceed (n+2)/2");
    MatterModel m;
    m.n = n;
    m.Lambda = Lambda;
    m.decay_b = decay_b;
    m.decay_c = decay_c;
    m.mu_amp = std::move(mu_amp);
    m.j0_amp = std::move(j0_amp);
    m.k_amp = std::move(k_amp);
    m.ji_mode = ji_mode;
    return m;
}

// One radial slice of an initial data set, as the diagnostics consume it.
// inv_N = 1/N is the regular field (it vanishes on horizon leaves).
struct DataSlice {
    double r = 1.0;
    SphereField inv_N;
    SphereField p;
    SphereField k;
    const SphereMetric* sigma = nullptr;
};

// |J|_g^2 = N^-2 J0^2 + r^-2 sigma^{IK} J_I J_K on a slice
inline SphereField momentum_norm(const MatterModel& model, const DataSlice& slice) {
    const SphereGrid& g = slice.inv_N.grid();
    SphereField j0 = model.j0_field(g, slice.r);
    SphereField j1, j2;
    model.jI_frame(g, slice.r, j1, j2);
    SphereField out(g);
    const double inv_r2 = 1.0 / (slice.r * slice.r);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double i11, i12, i22;
        slice.sigma->inverse_frame(i, i11, i12, i22);
        const double jt2 = i11 * j1[i] * j1[i] + 2 * i12 * j1[i] * j2[i] + i22 * j2[i] * j2[i];
        const double w = slice.inv_N[i];
        out[i] = std::sqrt(w * w * j0[i] * j0[i] + inv_r2 * jt2);
    }
    return out;
}

// mu - |J|_g pointwise; nonnegative iff the dominant energy condition holds
// on the slice
inline SphereField dec_margin(const MatterModel& model, const DataSlice& slice) {
    for (std::size_t i = 0; i < slice.inv_N.size(); ++i)
        if (!(slice.inv_N[i] >= 0.0))
            throw std::invalid_argument("dec_margin: nonpositive lapse on slice");
    SphereField jn = momentum_norm(model, slice);
    SphereField mu = model.mu_field(slice.inv_N.grid(), slice.r);
    SphereField out(slice.inv_N.grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu[i] - jn[i];
    return out;
}

struct IntegrabilityBudgets {
    double mu_budget = 0.0;
    double j_budget = 0.0;
    double tail_bound = 0.0;
};

// Finite parts of the r^{n-1}-weighted energy and momentum budgets over
// [r0, r_max], plus the analytic power-law tail for (r_max, inf). Round
// measure and round angular norm, as in the integrability conditions.
inline IntegrabilityBudgets integrability_budgets(const MatterModel& model, const SphereGrid& g,
                                                  double r0, double r_max) {
    if (!(r0 < r_max)) throw std::invalid_argument("integrability_budgets: r0 >= r_max");
    const SphereMetric round = SphereMetric::round(g);
    IntegrabilityBudgets out;

    const auto mu_sphere = [&](double r) {
        SphereField f = model.mu_field(g, r);
        return integrate(f, round);
    };
    const auto j_sphere = [&](double r) {
        SphereField j0 = model.j0_field(g, r);
        SphereField j1, j2;
        model.jI_frame(g, r, j1, j2);
        SphereField f(g);
        const double inv_r2 = 1.0 / (r * r);
        for (std::size_t i = 0; i < g.size(); ++i)
            f[i] = std::sqrt(j0[i] * j0[i] + inv_r2 * (j1[i] * j1[i] + j2[i] * j2[i]));
        return integrate(f, round);
    };

    const double nm1 = model.n - 1;
    if (!model.mu_amp.is_zero()) {
        const double e_mu = model.decay_c - nm1;  // integrand ~ r^-e_mu
        if (!(e_mu > 1.0 + 1e-12))
            throw std::invalid_argument("integrability_budgets: divergent mu tail (c <= n)");
        out.mu_budget = integrate_adaptive(
            [&](double r) { return std::pow(r, nm1) * mu_sphere(r); }, r0, r_max);
        const double f_at = std::pow(r_max, nm1) * mu_sphere(r_max);
        out.tail_bound += power_law_tail(f_at, r_max, e_mu);
    }
    if (!model.j0_amp.is_zero()) {
        const double e_j = model.decay_b + 2.0 - model.n;  // integrand ~ r^-e_j
        if (!(e_j > 1.0 + 1e-12))
            throw std::invalid_argument("integrability_budgets: divergent momentum tail (b <= n-1)");
        out.j_budget = integrate_adaptive(
            [&](double r) { return std::pow(r, nm1) * j_sphere(r); }, r0, r_max);
        const double f_at = std::pow(r_max, nm1) * j_sphere(r_max);
        out.tail_bound += power_law_tail(f_at, r_max, e_j);
    }
    return out;
}

}  // namespace collar
