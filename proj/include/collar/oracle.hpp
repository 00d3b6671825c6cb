#pragma once

// Independent verification of an initial data family against the raw
// constraint equations,
//   R(g) + (tr K)^2 - |K|^2 - 2 Lambda = 16 pi mu,
//   div(K - (tr K) g)              = 8 pi J,
// by finite differences in the full (r, theta, phi) chart: Christoffels and
// curvature are built from sampled g, K only, with no code shared with the
// solver right-hand sides. Finite differences act on the smooth scalar and
// frame-component samples; the sin(theta) factors of the chart components
// are carried analytically (flat data then comes out residual-free to
// rounding, and accuracy is uniform up to the pole rows). Radial stencils
// are 4-point one-sided-capable Fornberg weights, second order in the
// second derivative.
//
// The implied (mu, J) are compared against the prescribed model, and
// independently against the implied sources of the first-order evolutionary
// system,
//   16 pi mu N^3 = (2(n-1)/r) N_r - (2N^2/r^2) Lap N + (R(sigma)/r^2) N^3
//                  - (n-1)(n-2)/r^2 N - (N/4)|sigma'|^2
//                  + (2(n-1) k p + (n-1)(n-2) p^2) N^3 - 2 Lambda N^3,
//   8 pi J_0     = (n-1)/r (k - p) - (n-1) p_r,
//   8 pi J_I     = (p - k) N^-1 d_I N - (n-2) d_I p - d_I k,
// which is the raw system rewritten for this metric ansatz. The scalar
// curvature is additionally cross-checked against the block formula
//   R(g) = (2/(r^2 N))(-Lap N + (R(sigma)/2) N)
//          + N^-2 (2(n-1) N_r/(r N) - (n-1)(n-2)/r^2 - |sigma'|^2/4).

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "collar/data.hpp"
#include "collar/diagnostics.hpp"
#include "collar/math/fornberg.hpp"

namespace collar {

// implied sources on one radial slice, angular components in the round
// orthonormal frame
struct ImpliedSources {
    SphereField mu, j0, j1, j2;
    SphereField scalar_curvature;  // R(g) of the route that produced them
};

// radial stencil of 4 nodes clamped to [lo, hi); first and second
// derivative weights at node i
struct RadialStencil {
    int lo = 0;
    std::array<double, 4> w1{}, w2{};
};

inline RadialStencil radial_stencil(const RadialGrid& g, int i, int i_lo, int i_hi) {
    if (i_hi - i_lo < 4) throw std::runtime_error("radial_stencil: too few valid radial nodes");
    RadialStencil s;
    s.lo = std::max(i_lo, std::min(i - 1, i_hi - 4));
    std::vector<double> xs(g.nodes.begin() + s.lo, g.nodes.begin() + s.lo + 4);
    const auto w = fd_weights(g.nodes[i], xs, 2);
    for (int k = 0; k < 4; ++k) {
        s.w1[k] = w[1][k];
        s.w2[k] = w[2][k];
    }
    return s;
}

namespace oracle_detail {

// chart components of g on a slice, assembled from frame samples with
// analytic trig factors; indices {0=rr, 1=tt, 2=tp, 3=pp}
struct SliceBundle {
    double r = 0.0;
    // value, d_theta, d_phi for the four g components
    std::array<SphereField, 4> g, gt, gp;
    // second angular derivatives of g (center slices only)
    std::array<SphereField, 4> gtt, gpp, gtp2;
    // K00 and p with angular derivatives (K_IJ = p g_IJ)
    SphereField K0, K0t, K0p, pf, pt, pp_;

    static SliceBundle build(const InitialDataFamily& d, std::size_t i, bool with_second) {
        const SphereGrid& gr = *d.sphere;
        SliceBundle b;
        b.r = d.radius(i);
        SphereMetric sigma = d.family.metric_at(b.r);

        SphereField A(gr), B(gr);  // N^2, k N^2
        for (std::size_t m = 0; m < gr.size(); ++m) {
            const double N2 = 1.0 / (d.inv_N[i][m] * d.inv_N[i][m]);
            A[m] = N2;
            B[m] = d.k[i][m] * N2;
        }
        for (auto* arr : {&b.g, &b.gt, &b.gp})
            for (auto& f : *arr) f = SphereField(gr);
        if (with_second)
            for (auto* arr : {&b.gtt, &b.gpp, &b.gtp2})
                for (auto& f : *arr) f = SphereField(gr);
        b.K0 = B;
        b.pf = d.p[i];

        const double r2 = b.r * b.r;
        auto getter = [&gr](const auto& f) {
            return [&gr, &f](int a2, int b2) { return f[gr.index(a2, b2)]; };
        };
        for (int it = 0; it < gr.n_theta(); ++it) {
            const double s = gr.sin_theta(it), c = gr.cos_theta(it);
            const double s2 = 2 * s * c, c2 = c * c - s * s;
            for (int ip = 0; ip < gr.n_phi(); ++ip) {
                const std::size_t m = gr.index(it, ip);
                const auto dA = detail::frame_derivs(gr, getter(A), it, ip);
                const auto d11 = detail::frame_derivs(gr, getter(sigma.f11), it, ip);
                const auto d12 = detail::frame_derivs(gr, getter(sigma.f12), it, ip);
                const auto d22 = detail::frame_derivs(gr, getter(sigma.f22), it, ip);
                b.g[0][m] = dA.v;
                b.gt[0][m] = dA.du;
                b.gp[0][m] = dA.dv;
                b.g[1][m] = r2 * d11.v;
                b.gt[1][m] = r2 * d11.du;
                b.gp[1][m] = r2 * d11.dv;
                b.g[2][m] = r2 * d12.v * s;
                b.gt[2][m] = r2 * (d12.du * s + d12.v * c);
                b.gp[2][m] = r2 * d12.dv * s;
                b.g[3][m] = r2 * d22.v * s * s;
                b.gt[3][m] = r2 * (d22.du * s * s + d22.v * s2);
                b.gp[3][m] = r2 * d22.dv * s * s;
                if (with_second) {
                    b.gtt[0][m] = dA.duu;
                    b.gpp[0][m] = dA.dvv;
                    b.gtp2[0][m] = dA.duv;
                    b.gtt[1][m] = r2 * d11.duu;
                    b.gpp[1][m] = r2 * d11.dvv;
                    b.gtp2[1][m] = r2 * d11.duv;
                    b.gtt[2][m] = r2 * (d12.duu * s + 2 * d12.du * c - d12.v * s);
                    b.gpp[2][m] = r2 * d12.dvv * s;
                    b.gtp2[2][m] = r2 * (d12.duv * s + d12.dv * c);
                    b.gtt[3][m] = r2 * (d22.duu * s * s + 2 * d22.du * s2 + 2 * d22.v * c2);
                    b.gpp[3][m] = r2 * d22.dvv * s * s;
                    b.gtp2[3][m] = r2 * (d22.duv * s * s + d22.dv * s2);
                }
            }
        }
        b.K0t = deriv_theta(B);
        b.K0p = deriv_phi(B);
        b.pt = deriv_theta(b.pf);
        b.pp_ = deriv_phi(b.pf);
        return b;
    }
};

}  // namespace oracle_detail

// Raw-route implied sources at radial node i over the valid radial range
// [i_lo, i_hi): full chart finite differences and curvature contraction.
inline ImpliedSources implied_sources_raw(const InitialDataFamily& d, std::size_t i, int i_lo,
                                          int i_hi) {
    using oracle_detail::SliceBundle;
    const SphereGrid& g = *d.sphere;
    const RadialStencil st = radial_stencil(d.grid, static_cast<int>(i), i_lo, i_hi);
    const int ic = static_cast<int>(i) - st.lo;
    std::array<SliceBundle, 4> sl;
    for (int k = 0; k < 4; ++k)
        sl[k] = SliceBundle::build(d, st.lo + k, /*with_second=*/k == ic);
    const SliceBundle& c = sl[ic];

    ImpliedSources out{SphereField(g), SphereField(g), SphereField(g), SphereField(g),
                       SphereField(g)};
    // component -> (a,b) chart index pairs
    static constexpr int ca[4] = {0, 1, 1, 2};
    static constexpr int cb[4] = {0, 1, 2, 2};
    for (int it = 0; it < g.n_theta(); ++it) {
        const double sth = g.sin_theta(it);
        for (int ip = 0; ip < g.n_phi(); ++ip) {
            const std::size_t m = g.index(it, ip);
            double gg[3][3] = {}, kk[3][3] = {};
            double dg[3][3][3] = {}, dk[3][3][3] = {};
            double ddg[3][3][3][3] = {};

            for (int comp = 0; comp < 4; ++comp) {
                const int a = ca[comp], b = cb[comp];
                auto put1 = [&](int cc, double v, double dst[3][3][3]) {
                    dst[cc][a][b] = dst[cc][b][a] = v;
                };
                auto put2 = [&](int cc, int dd, double v) {
                    ddg[cc][dd][a][b] = ddg[cc][dd][b][a] = v;
                    ddg[dd][cc][a][b] = ddg[dd][cc][b][a] = v;
                };
                gg[a][b] = gg[b][a] = c.g[comp][m];
                double d_r = 0.0, d_rr = 0.0, d_rt = 0.0, d_rp = 0.0;
                for (int k = 0; k < 4; ++k) {
                    d_r += st.w1[k] * sl[k].g[comp][m];
                    d_rr += st.w2[k] * sl[k].g[comp][m];
                    d_rt += st.w1[k] * sl[k].gt[comp][m];
                    d_rp += st.w1[k] * sl[k].gp[comp][m];
                }
                put1(0, d_r, dg);
                put1(1, c.gt[comp][m], dg);
                put1(2, c.gp[comp][m], dg);
                put2(0, 0, d_rr);
                put2(0, 1, d_rt);
                put2(0, 2, d_rp);
                put2(1, 1, c.gtt[comp][m]);
                put2(1, 2, c.gtp2[comp][m]);
                put2(2, 2, c.gpp[comp][m]);
            }

            // K and its first derivatives: K00 = B, K_IJ = p g_IJ
            kk[0][0] = c.K0[m];
            double dK0_r = 0.0, dp_r = 0.0;
            for (int k = 0; k < 4; ++k) {
                dK0_r += st.w1[k] * sl[k].K0[m];
                dp_r += st.w1[k] * sl[k].pf[m];
            }
            dk[0][0][0] = dK0_r;
            dk[1][0][0] = c.K0t[m];
            dk[2][0][0] = c.K0p[m];
            const double pv = c.pf[m];
            const double dpv[3] = {dp_r, c.pt[m], c.pp_[m]};
            for (int comp = 1; comp < 4; ++comp) {
                const int a = ca[comp], b = cb[comp];
                kk[a][b] = kk[b][a] = pv * gg[a][b];
                for (int cc = 0; cc < 3; ++cc)
                    dk[cc][a][b] = dk[cc][b][a] = dpv[cc] * gg[a][b] + pv * dg[cc][a][b];
            }

            // inverse metric: rr block and angular 2x2 block
            double gi[3][3] = {};
            gi[0][0] = 1.0 / gg[0][0];
            const double det2 = gg[1][1] * gg[2][2] - gg[1][2] * gg[1][2];
            gi[1][1] = gg[2][2] / det2;
            gi[2][2] = gg[1][1] / det2;
            gi[1][2] = gi[2][1] = -gg[1][2] / det2;

            double C1[3][3][3], C2[3][3][3];
            for (int cc = 0; cc < 3; ++cc)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        C1[cc][a][b] = 0.5 * (dg[a][b][cc] + dg[b][a][cc] - dg[cc][a][b]);
            for (int dd = 0; dd < 3; ++dd)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) {
                        double acc = 0.0;
                        for (int e = 0; e < 3; ++e) acc += gi[dd][e] * C1[e][a][b];
                        C2[dd][a][b] = acc;
                    }
            double dgi[3][3][3];
            for (int cc = 0; cc < 3; ++cc)
                for (int dd = 0; dd < 3; ++dd)
                    for (int e = 0; e < 3; ++e) {
                        double acc = 0.0;
                        for (int a = 0; a < 3; ++a)
                            for (int b = 0; b < 3; ++b)
                                acc -= gi[dd][a] * gi[e][b] * dg[cc][a][b];
                        dgi[cc][dd][e] = acc;
                    }
            auto dC2 = [&](int cc, int dd, int a, int b) {
                double acc = 0.0;
                for (int e = 0; e < 3; ++e) {
                    acc += dgi[cc][dd][e] * C1[e][a][b];
                    acc += gi[dd][e] * 0.5 *
                           (ddg[cc][a][b][e] + ddg[cc][b][a][e] - ddg[cc][e][a][b]);
                }
                return acc;
            };

            double R = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    double Rab = 0.0;
                    for (int cc = 0; cc < 3; ++cc) {
                        Rab += dC2(cc, cc, a, b) - dC2(a, cc, cc, b);
                        for (int dd = 0; dd < 3; ++dd)
                            Rab += C2[cc][cc][dd] * C2[dd][a][b] -
                                   C2[cc][a][dd] * C2[dd][cc][b];
                    }
                    R += gi[a][b] * Rab;
                }
            out.scalar_curvature[m] = R;

            double trK = 0.0, K2 = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) trK += gi[a][b] * kk[a][b];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int cc = 0; cc < 3; ++cc)
                        for (int dd = 0; dd < 3; ++dd)
                            K2 += gi[a][cc] * gi[b][dd] * kk[a][b] * kk[cc][dd];
            out.mu[m] = (R + trK * trK - K2 - 2.0 * d.Lambda()) / (16.0 * kPi);

            double dtrK[3];
            for (int cc = 0; cc < 3; ++cc) {
                double acc = 0.0;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        acc += dgi[cc][a][b] * kk[a][b] + gi[a][b] * dk[cc][a][b];
                dtrK[cc] = acc;
            }
            double pi[3][3], dpi[3][3][3];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) pi[a][b] = kk[a][b] - trK * gg[a][b];
            for (int cc = 0; cc < 3; ++cc)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        dpi[cc][a][b] = dk[cc][a][b] - dtrK[cc] * gg[a][b] - trK * dg[cc][a][b];

            double div[3];
            for (int b = 0; b < 3; ++b) {
                double acc = 0.0;
                for (int a = 0; a < 3; ++a)
                    for (int cc = 0; cc < 3; ++cc) {
                        double cov = dpi[a][cc][b];
                        for (int dd = 0; dd < 3; ++dd)
                            cov -= C2[dd][a][cc] * pi[dd][b] + C2[dd][a][b] * pi[cc][dd];
                        acc += gi[a][cc] * cov;
                    }
                div[b] = acc;
            }
            out.j0[m] = div[0] / (8.0 * kPi);
            out.j1[m] = div[1] / (8.0 * kPi);
            out.j2[m] = div[2] / (8.0 * kPi) / sth;  // frame component
        }
    }
    return out;
}

// Evolutionary-system route: the same implied sources from the first-order
// system (independent discretization of the same content).
inline ImpliedSources implied_sources_lemma(const InitialDataFamily& d, std::size_t i, int i_lo,
                                            int i_hi) {
    const SphereGrid& g = *d.sphere;
    const double r = d.radius(i);
    const int n = d.n();
    const RadialStencil st = radial_stencil(d.grid, static_cast<int>(i), i_lo, i_hi);

    SphereMetric sigma = d.family.metric_at(r);
    SphereField Nf(g);
    for (std::size_t m = 0; m < g.size(); ++m) Nf[m] = 1.0 / d.inv_N[i][m];
    SphereField lapN = laplace_beltrami(Nf, sigma);
    SphereField Rsig = d.family.scalar_curvature(r);
    SphereField sp2 = d.family.derivative_norm2(r);
    SphereField N_t = deriv_theta(Nf), N_p = deriv_phi(Nf);
    SphereField p_t = deriv_theta(d.p[i]), p_p = deriv_phi(d.p[i]);
    SphereField k_t = deriv_theta(d.k[i]), k_p = deriv_phi(d.k[i]);

    ImpliedSources out{SphereField(g), SphereField(g), SphereField(g), SphereField(g),
                       SphereField(g)};
    for (int it = 0; it < g.n_theta(); ++it) {
        const double sth = g.sin_theta(it);
        for (int ip = 0; ip < g.n_phi(); ++ip) {
            const std::size_t m = g.index(it, ip);
            double N_r = 0.0, p_r = 0.0;
            for (int k4 = 0; k4 < 4; ++k4) {
                N_r += st.w1[k4] / d.inv_N[st.lo + k4][m];
                p_r += st.w1[k4] * d.p[st.lo + k4][m];
            }
            const double N = Nf[m], pp = d.p[i][m], kk = d.k[i][m];
            const double N3 = N * N * N;
            const double mu16 =
                2.0 * (n - 1) / r * N_r - 2.0 * N * N / (r * r) * lapN[m] +
                Rsig[m] / (r * r) * N3 - (n - 1.0) * (n - 2.0) / (r * r) * N -
                N / 4.0 * sp2[m] +
                (2.0 * (n - 1) * kk * pp + (n - 1.0) * (n - 2.0) * pp * pp) * N3 -
                2.0 * d.Lambda() * N3;
            out.mu[m] = mu16 / (16.0 * kPi * N3);
            out.j0[m] = ((n - 1.0) / r * (kk - pp) - (n - 1.0) * p_r) / (8.0 * kPi);
            out.j1[m] = ((pp - kk) / N * N_t[m] - (n - 2.0) * p_t[m] - k_t[m]) / (8.0 * kPi);
            out.j2[m] =
                ((pp - kk) / N * N_p[m] - (n - 2.0) * p_p[m] - k_p[m]) / (8.0 * kPi) / sth;

            out.scalar_curvature[m] =
                2.0 / (r * r * N) * (-lapN[m] + 0.5 * Rsig[m] * N) +
                (2.0 * (n - 1) * N_r / (r * N) - (n - 1.0) * (n - 2.0) / (r * r) -
                 0.25 * sp2[m]) /
                    (N * N);
        }
    }
    return out;
}

struct ResidualNorms {
    double mu_max = 0.0, mu_l2 = 0.0;
    double j_max = 0.0, j_l2 = 0.0;
};

struct ResidualReport {
    std::vector<std::size_t> radial_indices;
    std::vector<ResidualNorms> per_radius;  // raw route vs prescribed model
    ResidualNorms global;
    double block_gap_max = 0.0;      // sup |R_raw - R_block| over the sampled set
    double convergence_order = 0.0;  // filled by refinement studies
};

// valid contiguous radial range: rows where the lapse is sound
inline void valid_radial_range(const InitialDataFamily& d, double w_min, int& i_lo, int& i_hi) {
    i_lo = 0;
    i_hi = static_cast<int>(d.n_radii());
    while (i_lo < i_hi && d.inv_N[i_lo].min() <= w_min) ++i_lo;
    while (i_hi > i_lo && d.inv_N[i_hi - 1].min() <= w_min) --i_hi;
}

// Raw-route residuals against the prescribed model. radial_stride
// subsamples radii to keep refinement studies affordable.
inline ResidualReport constraint_residuals(const InitialDataFamily& d, const MatterModel& matter,
                                           int radial_stride = 1, double w_min = 1e-6) {
    require_n3(d, "constraint_residuals");
    const SphereGrid& g = *d.sphere;
    ResidualReport rep;
    int i_lo = 0, i_hi = 0;
    valid_radial_range(d, w_min, i_lo, i_hi);
    if (i_hi - i_lo < 5) throw std::runtime_error("constraint_residuals: grid too coarse");

    double gl_mu2 = 0.0, gl_j2 = 0.0, wsum = 0.0;
    for (int i = i_lo; i < i_hi; i += radial_stride) {
        ImpliedSources raw = implied_sources_raw(d, i, i_lo, i_hi);
        ImpliedSources lem = implied_sources_lemma(d, i, i_lo, i_hi);
        const double r = d.radius(i);
        SphereField mu_model = matter.mu_field(g, r);
        SphereField j0_model = matter.j0_field(g, r);
        SphereField j1_model, j2_model;
        matter.jI_frame(g, r, j1_model, j2_model);

        ResidualNorms nn;
        double mu2 = 0.0, j2acc = 0.0;
        for (std::size_t m = 0; m < g.size(); ++m) {
            const double w = g.weight(m);
            const double rmu = raw.mu[m] - mu_model[m];
            const double rj0 = raw.j0[m] - j0_model[m];
            const double rj1 = raw.j1[m] - j1_model[m];
            const double rj2 = raw.j2[m] - j2_model[m];
            nn.mu_max = std::max(nn.mu_max, std::abs(rmu));
            const double jn = std::sqrt(rj0 * rj0 + rj1 * rj1 + rj2 * rj2);
            nn.j_max = std::max(nn.j_max, jn);
            mu2 += w * rmu * rmu;
            j2acc += w * jn * jn;
            rep.block_gap_max = std::max(
                rep.block_gap_max, std::abs(raw.scalar_curvature[m] - lem.scalar_curvature[m]));
        }
        nn.mu_l2 = std::sqrt(mu2 / kFourPi);
        nn.j_l2 = std::sqrt(j2acc / kFourPi);
        rep.radial_indices.push_back(i);
        rep.per_radius.push_back(nn);
        rep.global.mu_max = std::max(rep.global.mu_max, nn.mu_max);
        rep.global.j_max = std::max(rep.global.j_max, nn.j_max);
        gl_mu2 += mu2;
        gl_j2 += j2acc;
        wsum += kFourPi;
    }
    rep.global.mu_l2 = std::sqrt(gl_mu2 / wsum);
    rep.global.j_l2 = std::sqrt(gl_j2 / wsum);
    return rep;
}

}  // namespace collar
