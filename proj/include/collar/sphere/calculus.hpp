#pragma once

// Integration, divergence-form Laplace-Beltrami, gradients and Gauss
// curvature with respect to an arbitrary metric on the grid.
//
// The Laplacian is assembled from fluxes through cell faces,
//   V^theta = (sin(th) f22 d_th f - f12 d_ph f) / sqrt(D),
//   V^phi   = (-f12 d_th f + f11 d_ph f / sin(th)) / sqrt(D),
//   Lap f   = (d_th V^theta + d_ph V^phi) / (sin(th) sqrt(D)),
// with D the frame determinant. Fluxes through the two pole faces vanish
// identically (sin = 0 and d_ph f -> 0 there), so the discrete divergence
// theorem holds to rounding with the grid's cell-mass weights.
//
// Gauss curvature uses the Brioschi formula on coordinate components; the
// two rows adjacent to each pole are replaced by polynomial extrapolation
// along meridians, where the coordinate formula loses accuracy.

#include <array>
#include <cmath>
#include <stdexcept>

#include "collar/sphere/grid.hpp"
#include "collar/sphere/metric.hpp"

namespace collar {

inline double integrate(const SphereField& field, const SphereMetric& metric) {
    if (!field.grid().same_as(*metric.grid))
        throw std::invalid_argument("integrate: field and metric on different grids");
    double s = 0.0;
    for (std::size_t idx = 0; idx < field.size(); ++idx)
        s += field.grid().weight(idx) * metric.area_element_ratio(idx) * field[idx];
    return s;
}

inline double area(const SphereMetric& metric) {
    double s = 0.0;
    for (std::size_t idx = 0; idx < metric.size(); ++idx)
        s += metric.grid->weight(idx) * metric.area_element_ratio(idx);
    return s;
}

// coordinate partials, central differences (periodic in phi, across-pole in theta)
inline SphereField deriv_theta(const SphereField& f, int theta_parity = 1) {
    const SphereGrid& g = f.grid();
    SphereField out(g);
    const double inv2h = 0.5 / g.h_theta();
    for (int i = 0; i < g.n_theta(); ++i)
        for (int j = 0; j < g.n_phi(); ++j)
            out.at(i, j) =
                (ghost_value(f, i + 1, j, theta_parity) - ghost_value(f, i - 1, j, theta_parity)) *
                inv2h;
    return out;
}

inline SphereField deriv_phi(const SphereField& f) {
    const SphereGrid& g = f.grid();
    SphereField out(g);
    const double inv2h = 0.5 / g.h_phi();
    const int np = g.n_phi();
    for (int i = 0; i < g.n_theta(); ++i)
        for (int j = 0; j < np; ++j)
            out.at(i, j) = (f.at(i, (j + 1) % np) - f.at(i, (j - 1 + np) % np)) * inv2h;
    return out;
}

// frame gradient (d_th f, d_ph f / sin th)
inline void gradient_frame(const SphereField& f, SphereField& g1, SphereField& g2) {
    const SphereGrid& g = f.grid();
    g1 = deriv_theta(f);
    g2 = deriv_phi(f);
    for (int i = 0; i < g.n_theta(); ++i) {
        const double inv_s = 1.0 / g.sin_theta(i);
        for (int j = 0; j < g.n_phi(); ++j) g2.at(i, j) *= inv_s;
    }
}

// |grad f|^2 with respect to the metric
inline SphereField gradient_norm2(const SphereField& f, const SphereMetric& m) {
    SphereField g1, g2;
    gradient_frame(f, g1, g2);
    SphereField out(f.grid());
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        double i11, i12, i22;
        m.inverse_frame(idx, i11, i12, i22);
        out[idx] = i11 * g1[idx] * g1[idx] + 2.0 * i12 * g1[idx] * g2[idx] + i22 * g2[idx] * g2[idx];
    }
    return out;
}

namespace detail {
struct FaceCoeffs {
    double f11, f12, f22, sqrtD;
};
inline FaceCoeffs average_metric(const SphereMetric& m, std::size_t a, std::size_t b) {
    FaceCoeffs c;
    c.f11 = 0.5 * (m.f11[a] + m.f11[b]);
    c.f12 = 0.5 * (m.f12[a] + m.f12[b]);
    c.f22 = 0.5 * (m.f22[a] + m.f22[b]);
    c.sqrtD = std::sqrt(c.f11 * c.f22 - c.f12 * c.f12);
    return c;
}
}  // namespace detail

inline SphereField laplace_beltrami(const SphereField& f, const SphereMetric& m) {
    const SphereGrid& g = f.grid();
    if (!g.same_as(*m.grid))
        throw std::invalid_argument("laplace_beltrami: field and metric on different grids");
    m.check_nondegenerate();
    const int nt = g.n_theta(), np = g.n_phi();
    const double ht = g.h_theta(), hp = g.h_phi();

    // central d_phi at nodes (needed on theta-faces)
    SphereField dphi = deriv_phi(f);
    // central d_theta at nodes (needed on phi-faces)
    SphereField dth = deriv_theta(f);

    // theta-fluxes at faces iF = 0..nt; pole faces stay zero
    std::vector<double> Vth(static_cast<std::size_t>(nt + 1) * np, 0.0);
    for (int iF = 1; iF < nt; ++iF) {
        const double sF = std::sin(iF * ht);
        for (int j = 0; j < np; ++j) {
            const std::size_t a = g.index(iF - 1, j), b = g.index(iF, j);
            const auto c = detail::average_metric(m, a, b);
            const double dfd = (f[b] - f[a]) / ht;
            const double dfp = 0.5 * (dphi[a] + dphi[b]);
            Vth[static_cast<std::size_t>(iF) * np + j] = (sF * c.f22 * dfd - c.f12 * dfp) / c.sqrtD;
        }
    }
    SphereField out(g);
    for (int i = 0; i < nt; ++i) {
        const double s = g.sin_theta(i);
        for (int j = 0; j < np; ++j) {
            const int jm = (j - 1 + np) % np;
            // phi-fluxes through the two faces of this cell
            const std::size_t self = g.index(i, j);
            const std::size_t left = g.index(i, jm);
            const std::size_t right = g.index(i, (j + 1) % np);
            const auto cl = detail::average_metric(m, left, self);
            const auto cr = detail::average_metric(m, self, right);
            const double Vp_l = (-cl.f12 * 0.5 * (dth[left] + dth[self]) +
                                 cl.f11 * ((f[self] - f[left]) / hp) / s) /
                                cl.sqrtD;
            const double Vp_r = (-cr.f12 * 0.5 * (dth[self] + dth[right]) +
                                 cr.f11 * ((f[right] - f[self]) / hp) / s) /
                                cr.sqrtD;
            const double div = (Vth[static_cast<std::size_t>(i + 1) * np + j] -
                                Vth[static_cast<std::size_t>(i) * np + j]) /
                                   ht +
                               (Vp_r - Vp_l) / hp;
            out[self] = div / (s * std::sqrt(m.det_frame(self)));
        }
    }
    return out;
}

namespace detail {
// fourth-order central first/second derivatives of the frame components,
// across-pole ghosts; frame components carry theta-parity +1
struct FrameDerivs {
    double v, du, dv, duu, dvv, duv;
};
template <typename Getter>
inline FrameDerivs frame_derivs(const SphereGrid& g, const Getter& get, int i, int j) {
    const double ht = g.h_theta(), hp = g.h_phi();
    auto at = [&](int a, int b) { return ghost_value(g, get, a, b, +1); };
    auto d1 = [](double m2, double m1, double p1, double p2, double h) {
        return (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h);
    };
    auto d2 = [](double m2, double m1, double c, double p1, double p2, double h) {
        return (-p2 + 16 * p1 - 30 * c + 16 * m1 - m2) / (12 * h * h);
    };
    FrameDerivs out;
    out.v = at(i, j);
    out.du = d1(at(i - 2, j), at(i - 1, j), at(i + 1, j), at(i + 2, j), ht);
    out.dv = d1(at(i, j - 2), at(i, j - 1), at(i, j + 1), at(i, j + 2), hp);
    out.duu = d2(at(i - 2, j), at(i - 1, j), out.v, at(i + 1, j), at(i + 2, j), ht);
    out.dvv = d2(at(i, j - 2), at(i, j - 1), out.v, at(i, j + 1), at(i, j + 2), hp);
    // mixed: fourth-order d/dv applied to fourth-order d/du
    double dus[4];
    int off[4] = {-2, -1, 1, 2};
    for (int k = 0; k < 4; ++k)
        dus[k] = d1(at(i - 2, j + off[k]), at(i - 1, j + off[k]), at(i + 1, j + off[k]),
                    at(i + 2, j + off[k]), ht);
    out.duv = d1(dus[0], dus[1], dus[2], dus[3], hp);
    return out;
}
}  // namespace detail

// Gauss curvature by the Brioschi formula. Finite differences act on the
// frame components only; the sin(theta) factors of the coordinate
// components and their derivatives are carried analytically, which keeps
// the formula accurate up to the pole rows (round metrics come out exact).
inline SphereField gauss_curvature(const SphereMetric& m) {
    const SphereGrid& g = *m.grid;
    m.check_nondegenerate();
    const int nt = g.n_theta(), np = g.n_phi();
    SphereField K(g);
    for (int i = 0; i < nt; ++i) {
        const double s = g.sin_theta(i), c = g.cos_theta(i);
        const double s2 = 2 * s * c, c2 = c * c - s * s;  // sin(2th), cos(2th)
        for (int j = 0; j < np; ++j) {
            const auto A = detail::frame_derivs(g, [&](int a, int b) { return m.f11[g.index(a, b)]; }, i, j);
            const auto B = detail::frame_derivs(g, [&](int a, int b) { return m.f12[g.index(a, b)]; }, i, j);
            const auto C = detail::frame_derivs(g, [&](int a, int b) { return m.f22[g.index(a, b)]; }, i, j);
            // E = f11, F = f12 sin, G = f22 sin^2 and their chart derivatives
            const double E = A.v, Ev = A.dv, Evv = A.dvv, Eu = A.du;
            const double F = B.v * s;
            const double Fu = B.du * s + B.v * c;
            const double Fv = B.dv * s;
            const double Fuv = B.duv * s + B.dv * c;
            const double G = C.v * s * s;
            const double Gu = C.du * s * s + C.v * s2;
            const double Gv = C.dv * s * s;
            const double Guu = C.duu * s * s + 2 * C.du * s2 + 2 * C.v * c2;
            const double a11 = -0.5 * Evv + Fuv - 0.5 * Guu;
            const double a12 = 0.5 * Eu, a13 = Fu - 0.5 * Ev;
            const double a21 = Fv - 0.5 * Gu, a31 = 0.5 * Gv;
            const double det1 = a11 * (E * G - F * F) - a12 * (a21 * G - F * a31) +
                                a13 * (a21 * F - E * a31);
            const double b12 = 0.5 * Ev, b13 = 0.5 * Gu;
            const double det2 = -b12 * (b12 * G - F * b13) + b13 * (b12 * F - E * b13);
            const double det = E * G - F * F;
            K.at(i, j) = (det1 - det2) / (det * det);
        }
    }
    return K;
}

}  // namespace collar
