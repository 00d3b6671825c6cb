#pragma once

// Every tolerance that gates a verdict, in one place; the run manifest
// echoes this struct verbatim.

namespace collar {

struct Tolerances {
    double quad_rel = 1e-10;       // adaptive quadrature, relative
    double ode_residual = 1e-8;    // pointwise ODE residual, relative
    double monotonicity = 1e-8;    // d m_H / dr >= -mono * (1 + |m_H|)
    double penrose = 1e-6;         // penrose_gap >= -penrose
    double refined = 1e-6;         // refined gap per f-choice
    double dec = 1e-12;            // DEC margin slack (scaled by 1 + sup mu)
    double horizon = 1e-8;         // leaf-horizon detection (scaled)
    double rigidity_gap = 1e-6;    // |gap| below this triggers rigidity flags
    double step_rtol = 1e-8;       // parabolic local error target per step
    double step_cap = 0.01;        // hard cap dr <= step_cap * r
    double barrier_slop = 1e-8;    // barrier bracketing slack
    double compat = 1e-6;          // umbilic compatibility residual gate
    double volume_preservation = 1e-12;
};

}  // namespace collar
