#pragma once

// Random smooth class-structured (N, k, p, sigma) datasets that do NOT
// solve the constraints: used to exercise the equivalence of the raw
// constraint operator and the first-order system on generic data.

#include <random>

#include "collar/data.hpp"
#include "collar/sphere/harmonics.hpp"

namespace collar::testsupport {

struct SmoothDataSpec {
    double r0 = 1.0, r_max = 4.0;
    double lambda = 1.0;
    AngularAmplitude n_amp, p_amp, k_amp;   // angular profiles
    double n_scale = 0.0, p_scale = 0.0, k_scale = 0.0;
    std::vector<std::pair<std::string, double>> b_terms;

    static SmoothDataSpec random(unsigned seed) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        SmoothDataSpec s;
        s.lambda = 1.0 + 0.5 * u(rng);
        auto amp = [&](double scale) {
            return AngularAmplitude(u(rng), {{"x", scale * u(rng)},
                                             {"z", scale * u(rng)},
                                             {"xy", scale * u(rng)},
                                             {"yz", scale * u(rng)}});
        };
        s.n_amp = amp(0.8);
        s.p_amp = amp(0.8);
        s.k_amp = amp(0.8);
        s.n_scale = 0.25;
        s.p_scale = 0.12;
        s.k_scale = 0.12;
        s.b_terms = {{"xy", 0.08 * u(rng)}, {"xz", 0.08 * u(rng)}, {"3z2-1", 0.05 * u(rng)},
                     {"x2-y2", 0.08 * u(rng)}};
        return s;
    }

    InitialDataFamily build(int n_theta, int n_phi, int n_radial, const SphereGrid& sphere) const {
        InitialDataFamily d;
        (void)n_theta;
        (void)n_phi;
        d.grid = RadialGrid::geometric(r0, r_max, n_radial, 3, 0.0);
        d.sphere = &sphere;
        d.family = MetricFamily::exp_perturbed_family(make_generator(sphere, b_terms), lambda, r0);
        d.matter = power_law_matter(AngularAmplitude(0.0), AngularAmplitude(0.0),
                                    AngularAmplitude(0.0), 2.0, 4.0, 0.0, 3);
        d.boundary = BoundaryMode::prescribed;
        for (std::size_t i = 0; i < d.grid.size(); ++i) {
            const double r = d.grid.nodes[i];
            SphereField w(sphere), pf(sphere), kf(sphere);
            for (int it = 0; it < sphere.n_theta(); ++it)
                for (int ip = 0; ip < sphere.n_phi(); ++ip) {
                    const double th = sphere.theta(it), ph = sphere.phi(ip);
                    const double N =
                        1.0 + n_scale * n_amp.value(th, ph) / r +
                        0.1 * n_scale * std::sin(r) / (r * r);
                    w.at(it, ip) = 1.0 / N;
                    pf.at(it, ip) = p_scale * p_amp.value(th, ph) / (r * r);
                    kf.at(it, ip) = k_scale * k_amp.value(th, ph) / (r * r) +
                                    0.05 * k_scale * std::cos(r) / (r * r);
                }
            d.inv_N.push_back(std::move(w));
            d.p.push_back(std::move(pf));
            d.k.push_back(std::move(kf));
        }
        d.validate();
        return d;
    }
};

}  // namespace collar::testsupport
