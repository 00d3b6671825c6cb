#pragma once

// A solved (or prescribed) initial data family sampled on radial grid x
// sphere grid: g = N^2 dr^2 + r^2 sigma(r), K = k N^2 dr^2 + p r^2 sigma(r).
// The regular stored lapse variable is inv_N = 1/N, which vanishes on
// horizon leaves instead of blowing up.

#include <stdexcept>
#include <vector>

#include "collar/family.hpp"
#include "collar/matter.hpp"
#include "collar/radial.hpp"
#include "collar/spherical.hpp"

namespace collar {

struct InitialDataFamily {
    RadialGrid grid;
    const SphereGrid* sphere = nullptr;
    MetricFamily family;
    MatterModel matter;
    BoundaryMode boundary = BoundaryMode::prescribed;
    bool hyperboloidal = false;  // Lambda = 0 data with p^2 = 1 + ptilde^2

    std::vector<SphereField> inv_N, p, k;  // one field per radial node

    int n() const { return grid.n; }
    double Lambda() const { return grid.Lambda; }
    std::size_t n_radii() const { return grid.size(); }
    double radius(std::size_t i) const { return grid.nodes[i]; }

    SphereMetric metric_at(std::size_t i) const { return family.metric_at(grid.nodes[i]); }

    DataSlice slice(std::size_t i, const SphereMetric& sigma) const {
        DataSlice s;
        s.r = grid.nodes[i];
        s.inv_N = inv_N[i];
        s.p = p[i];
        s.k = k[i];
        s.sigma = &sigma;
        return s;
    }

    void validate() const {
        if (inv_N.size() != grid.size() || p.size() != grid.size() || k.size() != grid.size())
            throw std::invalid_argument("InitialDataFamily: field count mismatch");
        for (std::size_t i = 0; i < inv_N.size(); ++i) {
            if (!inv_N[i].all_finite() || !p[i].all_finite() || !k[i].all_finite())
                throw std::invalid_argument("InitialDataFamily: non-finite field values");
            if (i > 0 && !(inv_N[i].min() > 0.0))
                throw std::invalid_argument(
                    "InitialDataFamily: lapse not positive on the open interior");
        }
    }
};

// broadcast a spherical solution onto the sphere grid
inline InitialDataFamily make_data_from_spherical(const RadialSolution& sol,
                                                  const SphereGrid& sphere) {
    InitialDataFamily d;
    d.grid = sol.grid;
    d.sphere = &sphere;
    d.family = MetricFamily::round_family(sphere);
    d.matter = sol.model;
    d.boundary = sol.boundary.mode;
    d.inv_N.reserve(sol.grid.size());
    d.p.reserve(sol.grid.size());
    d.k.reserve(sol.grid.size());
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double r = sol.grid.nodes[i];
        d.inv_N.emplace_back(sphere, sol.inv_N[i]);
        d.p.emplace_back(sphere, sol.p.at_node(i));
        d.k.emplace_back(sphere, sol.model.k_at(r, 0.0, 0.0));
    }
    d.validate();
    return d;
}

}  // namespace collar
