#pragma once

// Real low-degree spherical harmonics (Cartesian polynomial convention) with
// analytic frame gradients, the angular amplitude type built from them, and
// trace-free Hessian generators used to seed perturbed metric families.
//
// Frame gradient of a function Y on S^2: (d_th Y, d_ph Y / sin th).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "collar/sphere/grid.hpp"
#include "collar/sphere/metric.hpp"

namespace collar {

struct HarmonicEval {
    double value;
    double g1;  // d_theta
    double g2;  // d_phi / sin(theta)
};

inline HarmonicEval eval_harmonic(const std::string& name, double th, double ph) {
    const double st = std::sin(th), ct = std::cos(th);
    const double sp = std::sin(ph), cp = std::cos(ph);
    if (name == "1") return {1.0, 0.0, 0.0};
    if (name == "z") return {ct, -st, 0.0};
    if (name == "x") return {st * cp, ct * cp, -sp};
    if (name == "y") return {st * sp, ct * sp, cp};
    const double s2p = std::sin(2 * ph), c2p = std::cos(2 * ph);
    if (name == "xy") return {0.5 * st * st * s2p, st * ct * s2p, st * c2p};
    if (name == "xz") return {st * ct * cp, (ct * ct - st * st) * cp, -ct * sp};
    if (name == "yz") return {st * ct * sp, (ct * ct - st * st) * sp, ct * cp};
    if (name == "x2-y2") return {st * st * c2p, 2 * st * ct * c2p, -2 * st * s2p};
    if (name == "3z2-1") return {3 * ct * ct - 1, -6 * st * ct, 0.0};
    throw std::invalid_argument("eval_harmonic: unknown harmonic '" + name + "'");
}

// c0 + sum_k coeff_k * harmonic_k, with analytic frame gradient
struct AngularAmplitude {
    double constant = 0.0;
    std::vector<std::pair<std::string, double>> terms;

    AngularAmplitude() = default;
    explicit AngularAmplitude(double c) : constant(c) {}
    AngularAmplitude(double c, std::vector<std::pair<std::string, double>> t)
        : constant(c), terms(std::move(t)) {}

    bool is_constant() const { return terms.empty(); }
    bool is_zero() const { return constant == 0.0 && terms.empty(); }

    HarmonicEval eval(double th, double ph) const {
        HarmonicEval out{constant, 0.0, 0.0};
        for (const auto& [name, c] : terms) {
            const HarmonicEval h = eval_harmonic(name, th, ph);
            out.value += c * h.value;
            out.g1 += c * h.g1;
            out.g2 += c * h.g2;
        }
        return out;
    }
    double value(double th, double ph) const { return eval(th, ph).value; }

    SphereField sample(const SphereGrid& g) const {
        return SphereField::sample(g, [&](double th, double ph) { return value(th, ph); });
    }
    void sample_gradient(const SphereGrid& g, SphereField& g1, SphereField& g2) const {
        g1 = SphereField(g);
        g2 = SphereField(g);
        for (int i = 0; i < g.n_theta(); ++i)
            for (int j = 0; j < g.n_phi(); ++j) {
                const HarmonicEval h = eval(g.theta(i), g.phi(j));
                g1.at(i, j) = h.g1;
                g2.at(i, j) = h.g2;
            }
    }
};

// Trace-free part of the round-metric Hessian of a degree-2 harmonic,
// frame components (b11, b12); b22 = -b11. Degree <= 1 harmonics have
// conformal Hessians, so only the five l=2 generators are nontrivial.
inline void tracefree_hessian(const std::string& name, double th, double ph, double& b11,
                              double& b12) {
    const double st = std::sin(th), ct = std::cos(th);
    const double sp = std::sin(ph), cp = std::cos(ph);
    const double s2p = std::sin(2 * ph), c2p = std::cos(2 * ph);
    if (name == "xy") {
        b11 = 0.5 * (ct * ct + 1) * s2p;
        b12 = ct * c2p;
    } else if (name == "x2-y2") {
        b11 = (ct * ct + 1) * c2p;
        b12 = -2 * ct * s2p;
    } else if (name == "xz") {
        b11 = -st * ct * cp;
        b12 = st * sp;
    } else if (name == "yz") {
        b11 = -st * ct * sp;
        b12 = -st * cp;
    } else if (name == "3z2-1") {
        b11 = 3 * st * st;
        b12 = 0.0;
    } else {
        throw std::invalid_argument("tracefree_hessian: unknown generator '" + name + "'");
    }
}

inline TraceFreeTensor make_generator(const SphereGrid& g,
                                      const std::vector<std::pair<std::string, double>>& terms) {
    TraceFreeTensor B(g);
    for (int i = 0; i < g.n_theta(); ++i)
        for (int j = 0; j < g.n_phi(); ++j) {
            double a11 = 0.0, a12 = 0.0;
            for (const auto& [name, c] : terms) {
                double b11, b12;
                tracefree_hessian(name, g.theta(i), g.phi(j), b11, b12);
                a11 += c * b11;
                a12 += c * b12;
            }
            const std::size_t idx = g.index(i, j);
            B.b11[idx] = a11;
            B.b12[idx] = a12;
        }
    return B;
}

}  // namespace collar
