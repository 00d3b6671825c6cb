#pragma once

// Quasi-local and asymptotic diagnostics on a solved initial data family
// (n = 3): null expansions, Hawking energy and its asymptotically
// hyperbolic variant, modified masses, ADM quantities by radius-ladder
// extrapolation, trapping scans, decay measurement, and the assembled
// inequality report.
//
// Conventions: leaves are Sigma_r = {r} x S^2 with outward unit normal
// (increasing r), so
//   theta_pm = 2/(r N) +- 2 p,   H^2 - P^2 = theta_+ theta_-,
//   m_H(Sigma_r)    = (1/8pi) int r (1 + r^2 p^2 - 1/N^2) dA_sigma,
//   m_H^AH(Sigma)   = sqrt(|S|/16pi) (1 - (1/16pi) int H^2 - P^2 dA + |S|/4pi),
//   strictly untrapped: (4/r^2)(1/N^2 - r^2 p^2) > 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "collar/data.hpp"
#include "collar/math/extrapolation.hpp"
#include "collar/math/fornberg.hpp"
#include "collar/math/nodal.hpp"
#include "collar/tolerances.hpp"

namespace collar {

struct NullExpansions {
    SphereField theta_plus, theta_minus, H, P_trace, spacetime_H2;
};

inline NullExpansions null_expansions(const InitialDataFamily& d, std::size_t i) {
    const SphereGrid& g = *d.sphere;
    const double r = d.radius(i);
    NullExpansions out{SphereField(g), SphereField(g), SphereField(g), SphereField(g),
                       SphereField(g)};
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const double H = (d.n() - 1) * d.inv_N[i][idx] / r;
        const double P = (d.n() - 1) * d.p[i][idx];
        out.H[idx] = H;
        out.P_trace[idx] = P;
        out.theta_plus[idx] = H + P;
        out.theta_minus[idx] = H - P;
        out.spacetime_H2[idx] = out.theta_plus[idx] * out.theta_minus[idx];
    }
    return out;
}

inline void require_n3(const InitialDataFamily& d, const char* who) {
    if (d.n() != 3) throw std::invalid_argument(std::string(who) + ": defined for n = 3 only");
}

inline double hawking_energy(const InitialDataFamily& d, std::size_t i) {
    require_n3(d, "hawking_energy");
    const double r = d.radius(i);
    const SphereMetric sigma = d.metric_at(i);
    SphereField integrand(*d.sphere);
    for (std::size_t idx = 0; idx < integrand.size(); ++idx) {
        const double w = d.inv_N[i][idx], pp = d.p[i][idx];
        integrand[idx] = r * (1.0 + r * r * pp * pp - w * w);
    }
    return integrate(integrand, sigma) / (8.0 * kPi);
}

// reduced_ptilde: evaluate with respect to (g, ptilde g), ptilde^2 = p^2 - 1
// (the hyperboloidal comparison of the identity m_H = m_H^AH)
inline double hawking_energy_AH(const InitialDataFamily& d, std::size_t i,
                                bool reduced_ptilde = false) {
    require_n3(d, "hawking_energy_AH");
    const double r = d.radius(i);
    const SphereMetric sigma = d.metric_at(i);
    const double A = r * r * area(sigma);
    SphereField H2mP2(*d.sphere);
    for (std::size_t idx = 0; idx < H2mP2.size(); ++idx) {
        const double w = d.inv_N[i][idx];
        double p2 = d.p[i][idx] * d.p[i][idx];
        if (reduced_ptilde) p2 = std::max(p2 - 1.0, 0.0);
        H2mP2[idx] = r * r * (4.0 * w * w / (r * r) - 4.0 * p2);  // (H^2 - P^2) dA weight r^2
    }
    const double integral = integrate(H2mP2, sigma);
    return std::sqrt(A / (16.0 * kPi)) * (1.0 - integral / (16.0 * kPi) + A / (4.0 * kPi));
}

enum class FChoiceKind { zero, eps_full, angular_ratio };

struct FChoice {
    FChoiceKind kind = FChoiceKind::zero;
    double eps = 0.5;  // eps_full only

    std::string name() const {
        switch (kind) {
            case FChoiceKind::zero: return "zero";
            case FChoiceKind::eps_full: return "eps_full(" + format_eps() + ")";
            case FChoiceKind::angular_ratio: return "angular_ratio";
        }
        return "?";
    }
    std::string format_eps() const {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", eps);
        return buf;
    }
};

// the admissible density f of the refined inequality, evaluated on slice i
inline SphereField f_choice_field(const InitialDataFamily& d, std::size_t i, const FChoice& fc,
                                  const SphereMetric& sigma) {
    const SphereGrid& g = *d.sphere;
    SphereField out(g);
    if (fc.kind == FChoiceKind::zero) return out;
    // eps = 1 degenerates to the zero choice and is allowed
    if (fc.kind == FChoiceKind::eps_full && !(fc.eps > 0.0 && fc.eps <= 1.0))
        throw std::invalid_argument("f_choice: eps must lie in (0,1]");
    const double r = d.radius(i);
    SphereField j0 = d.matter.j0_field(g, r);
    SphereField j1, j2;
    d.matter.jI_frame(g, r, j1, j2);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double i11, i12, i22;
        sigma.inverse_frame(idx, i11, i12, i22);
        const double jt2 =
            i11 * j1[idx] * j1[idx] + 2 * i12 * j1[idx] * j2[idx] + i22 * j2[idx] * j2[idx];
        const double w = d.inv_N[i][idx];
        const double radial = w * std::abs(j0[idx]);
        const double jn = std::sqrt(radial * radial + jt2 / (r * r));
        double f = 0.0;
        if (fc.kind == FChoiceKind::eps_full) {
            f = (1.0 - fc.eps) * (jn - radial);
        } else {  // angular_ratio: r^-2 |J^T|^2 / (2 |J|_g), zero where J vanishes
            f = (jn > 0.0) ? (jt2 / (r * r)) / (2.0 * jn) : 0.0;
        }
        if (f < -1e-14)
            throw std::invalid_argument("f_choice: density evaluates negative (invalid choice)");
        out[idx] = std::max(f, 0.0);
    }
    return out;
}

// int_{S^2} r^2 f dA_sigma per radial node
inline std::vector<double> f_choice_slice_integrals(const InitialDataFamily& d,
                                                    const FChoice& fc) {
    std::vector<double> out(d.n_radii(), 0.0);
    if (fc.kind == FChoiceKind::zero) return out;
    for (std::size_t i = 0; i < d.n_radii(); ++i) {
        const SphereMetric sigma = d.metric_at(i);
        SphereField f = f_choice_field(d, i, fc, sigma);
        const double r = d.radius(i);
        out[i] = r * r * integrate(f, sigma);
    }
    return out;
}

// M_f(r_i) = m_H(Sigma_{r_i}) - int_{r0}^{r_i} int s^2 f dA ds
inline std::vector<double> modified_mass_series(const InitialDataFamily& d, const FChoice& fc) {
    std::vector<double> mh(d.n_radii());
    for (std::size_t i = 0; i < d.n_radii(); ++i) mh[i] = hawking_energy(d, i);
    const std::vector<double> slices = f_choice_slice_integrals(d, fc);
    const std::vector<double> cum = cumulative_nodal_integral(d.grid.nodes, slices);
    for (std::size_t i = 0; i < mh.size(); ++i) mh[i] -= cum[i];
    return mh;
}

inline double modified_mass(const InitialDataFamily& d, const FChoice& fc, std::size_t i) {
    return modified_mass_series(d, fc)[i];
}

struct AdmResult {
    double E = 0.0;
    std::array<double, 3> P{0.0, 0.0, 0.0};
    bool P_converged = false;
    double tail_bound = 0.0;
    double measured_exponent = 0.0;
    bool converged = false;
    std::string method;  // adm_integral | hawking_limit_ah | hawking_limit
    std::vector<double> ladder_radii;
};

namespace detail {
// ladder of node indices from the top of the grid, consecutive rungs a
// fixed index stride apart (ratio as close to 2^(1/2) as the grid allows)
inline std::vector<std::size_t> ladder_indices(const RadialGrid& g, int rungs, double& ratio) {
    const double node_ratio = g.nodes[1] / g.nodes[0];
    int stride = std::max(1, static_cast<int>(std::lround(0.5 * std::log(2.0) / std::log(node_ratio))));
    std::vector<std::size_t> idx;
    long top = static_cast<long>(g.size()) - 1;
    for (int j = 0; j < rungs; ++j) {
        const long i = top - static_cast<long>(j) * stride;
        if (i < 0) break;
        idx.push_back(static_cast<std::size_t>(i));
    }
    ratio = std::pow(node_ratio, stride);
    return idx;
}
}  // namespace detail

// E from the (N^2 - 1) r^{n-2} integral against the round measure on a
// geometric radius ladder with Richardson extrapolation in the measured
// decay exponent; P from the p N^2 r^{n-1} nu^i integral on the same
// ladder. For asymptotically hyperbolic or hyperboloidal data the energy
// is instead the extrapolated limit of the matching Hawking energy.
inline AdmResult adm_quantities(const InitialDataFamily& d, int rungs = 7) {
    require_n3(d, "adm_quantities");
    AdmResult out;
    double ratio = 0.0;
    const auto idx = detail::ladder_indices(d.grid, rungs, ratio);
    if (idx.size() < 3) throw std::runtime_error("adm_quantities: radial grid too short for ladder");
    const SphereGrid& g = *d.sphere;
    const SphereMetric round = SphereMetric::round(g);

    const bool ah_mode = d.Lambda() < 0.0 || d.hyperboloidal;
    std::vector<double> Evals;
    std::array<std::vector<double>, 3> Pvals;
    for (std::size_t j : idx) {
        out.ladder_radii.push_back(d.radius(j));
        const double r = d.radius(j);
        if (ah_mode) {
            Evals.push_back(d.Lambda() < 0.0 ? hawking_energy_AH(d, j) : hawking_energy(d, j));
        } else {
            SphereField e(g);
            for (std::size_t m = 0; m < g.size(); ++m) {
                const double w = d.inv_N[j][m];
                e[m] = (1.0 - w * w) / (w * w) * r;
            }
            Evals.push_back(integrate(e, round) / (8.0 * kPi));
        }
        for (int comp = 0; comp < 3; ++comp) {
            SphereField e(g);
            for (int it = 0; it < g.n_theta(); ++it)
                for (int jp = 0; jp < g.n_phi(); ++jp) {
                    const std::size_t m = g.index(it, jp);
                    const double nu = comp == 0 ? g.sin_theta(it) * std::cos(g.phi(jp))
                                     : comp == 1 ? g.sin_theta(it) * std::sin(g.phi(jp))
                                                 : g.cos_theta(it);
                    const double w = d.inv_N[j][m];
                    e[m] = d.p[j][m] / (w * w) * r * r * nu;
                }
            Pvals[comp].push_back(integrate(e, round) / kFourPi);
        }
    }
    const LadderFit fit = ladder_extrapolate(Evals, ratio);
    if (!fit.converged)
        throw std::runtime_error("adm_quantities: energy ladder does not converge (decay too weak)");
    out.E = fit.value;
    out.tail_bound = fit.tail_bound;
    out.measured_exponent = fit.exponent;
    out.converged = true;
    out.method = ah_mode ? (d.Lambda() < 0.0 ? "hawking_limit_ah" : "hawking_limit")
                         : "adm_integral";
    out.P_converged = true;
    for (int comp = 0; comp < 3; ++comp) {
        const LadderFit pf = ladder_extrapolate(Pvals[comp], ratio);
        if (pf.converged) {
            out.P[comp] = pf.value;
        } else {
            out.P[comp] = Pvals[comp].front();
            out.P_converged = false;
        }
    }
    return out;
}

struct UntrappedScan {
    std::vector<bool> flag;
    std::vector<double> margin;  // min over the leaf of (4/r^2)(1/N^2 - r^2 p^2)
    bool all_true() const {
        for (bool b : flag)
            if (!b) return false;
        return true;
    }
    // boundary leaf may sit exactly on a horizon; the strict condition is
    // asked of the open interior
    bool interior_true() const {
        for (std::size_t i = 1; i < flag.size(); ++i)
            if (!flag[i]) return false;
        return true;
    }
};

inline UntrappedScan untrapped_scan(const InitialDataFamily& d) {
    UntrappedScan out;
    out.flag.resize(d.n_radii());
    out.margin.resize(d.n_radii());
    for (std::size_t i = 0; i < d.n_radii(); ++i) {
        const double r = d.radius(i);
        double mn = 1e300;
        for (std::size_t idx = 0; idx < d.inv_N[i].size(); ++idx) {
            const double w = d.inv_N[i][idx], pp = d.p[i][idx];
            mn = std::min(mn, (4.0 / (r * r)) * (w * w - r * r * pp * pp));
        }
        out.margin[i] = mn;
        out.flag[i] = mn > 0.0;
    }
    return out;
}

struct DecayCheck {
    double a_N = 0.0;      // exponent of sup|N - 1| (or |N sqrt(1+r^2) - 1|)
    double a_drN = 0.0;    // exponent of sup|d_r N| minus 1
    double a_dIN = 0.0;    // exponent of sup|d_I N| minus 1 (coordinate form)
    double b_p = 0.0, b_k = 0.0, b_dIp = 0.0, b_dIk = 0.0;
    double tau_rate = 0.0;  // measured exponential rate of sigma - round
    bool pass = false;
};

inline DecayCheck decay_suite(const InitialDataFamily& d) {
    DecayCheck out;
    double ratio = 0.0;
    const auto idx = detail::ladder_indices(d.grid, 3, ratio);
    if (idx.size() < 2) throw std::runtime_error("decay_suite: grid too short");
    const std::size_t hi = idx[0], lo = idx.back();
    const double r_hi = d.radius(hi), r_lo = d.radius(lo);
    const bool tilde = d.Lambda() < 0.0 || d.hyperboloidal;

    auto lapse_dev = [&](std::size_t i) {
        double m = 0.0;
        const double r = d.radius(i);
        const double scale = tilde ? std::sqrt(1.0 + r * r) : 1.0;
        for (std::size_t m2 = 0; m2 < d.inv_N[i].size(); ++m2)
            m = std::max(m, std::abs(scale / d.inv_N[i][m2] - 1.0));
        return m;
    };
    out.a_N = measured_exponent(lapse_dev(lo), r_lo, lapse_dev(hi), r_hi);

    auto sup_field = [](const SphereField& f) { return f.max_abs(); };
    auto dI_sup = [&](const SphereField& f) {
        return std::max(sup_field(deriv_theta(f)), sup_field(deriv_phi(f)));
    };
    auto lapse_field = [&](std::size_t i) {
        SphereField N(*d.sphere);
        const double r = d.radius(i);
        const double scale = tilde ? std::sqrt(1.0 + r * r) : 1.0;
        for (std::size_t m2 = 0; m2 < N.size(); ++m2) N[m2] = scale / d.inv_N[i][m2];
        return N;
    };
    out.a_dIN = measured_exponent(dI_sup(lapse_field(lo)), r_lo, dI_sup(lapse_field(hi)), r_hi) -
                1.0;

    // radial derivative of N by nonuniform stencils on the top nodes
    auto drN_sup = [&](std::size_t i) {
        const int nn = static_cast<int>(d.n_radii());
        const int c = static_cast<int>(i);
        const int lo2 = std::max(0, std::min(c - 2, nn - 5));
        std::vector<double> xs(d.grid.nodes.begin() + lo2, d.grid.nodes.begin() + lo2 + 5);
        const auto w = fd_weights(d.grid.nodes[c], xs, 1);
        double mx = 0.0;
        const bool t = tilde;
        for (std::size_t m2 = 0; m2 < d.inv_N[i].size(); ++m2) {
            double acc = 0.0;
            for (int k2 = 0; k2 < 5; ++k2) {
                const double r = d.grid.nodes[lo2 + k2];
                const double scale = t ? std::sqrt(1.0 + r * r) : 1.0;
                acc += w[1][k2] * (scale / d.inv_N[lo2 + k2][m2]);
            }
            mx = std::max(mx, std::abs(acc));
        }
        return mx;
    };
    out.a_drN = measured_exponent(drN_sup(lo), r_lo, drN_sup(hi), r_hi) - 1.0;

    out.b_p = measured_exponent(sup_field(d.p[lo]), r_lo, sup_field(d.p[hi]), r_hi);
    out.b_k = measured_exponent(sup_field(d.k[lo]), r_lo, sup_field(d.k[hi]), r_hi);
    out.b_dIp = measured_exponent(dI_sup(d.p[lo]), r_lo, dI_sup(d.p[hi]), r_hi) - 1.0;
    out.b_dIk = measured_exponent(dI_sup(d.k[lo]), r_lo, dI_sup(d.k[hi]), r_hi) - 1.0;

    const double t_lo = d.family.metric_at(r_lo).max_deviation_from_round();
    const double t_hi = d.family.metric_at(r_hi).max_deviation_from_round();
    out.tau_rate = (t_lo <= 1e-300 && t_hi <= 1e-300)
                       ? 1e308
                       : -std::log(std::max(t_hi, 1e-300) / std::max(t_lo, 1e-300)) /
                             (r_hi - r_lo);

    const int n = d.n();
    const double tol = 0.05;
    out.pass = out.a_N > 0.5 * (n - 2) - tol && out.b_p > 0.5 * n - tol &&
               out.b_k > 0.5 * n - tol && out.tau_rate > 0.0;
    return out;
}

enum class VerdictState { pass, fail, not_applicable };

struct Verdict {
    VerdictState state = VerdictState::not_applicable;
    double value = 0.0;  // the margin the verdict is judged on

    std::string str() const {
        switch (state) {
            case VerdictState::pass: return "pass";
            case VerdictState::fail: return "fail";
            case VerdictState::not_applicable: return "not applicable";
        }
        return "?";
    }
};

struct RigidityFlags {
    bool evaluated = false;
    bool sigma_round = false, N_angular_constant = false, J0_small = false;
    double sigma_deviation = 0.0, N_spread = 0.0, J0_sup = 0.0;
};

struct PerRadiusRow {
    double r = 0.0;
    double m_H = 0.0, m_H_AH = 0.0;
    std::map<std::string, double> M_f;
    double theta_plus_min = 0.0, theta_plus_max = 0.0;
    double theta_minus_min = 0.0, theta_minus_max = 0.0;
    bool untrapped = false;
    double dec_margin_min = 0.0;
};

struct ResidualSummary {
    bool present = false;
    double mu_max = 0.0, mu_l2 = 0.0;
    double j_max = 0.0, j_l2 = 0.0;
    double convergence_order = 0.0;
    double block_formula_gap = 0.0;
};

struct DiagnosticsReport {
    std::string nu_orientation = "outward";
    int n = 3;
    double Lambda = 0.0;
    bool hyperboloidal = false;
    std::string boundary_mode;
    std::string energy_method;

    std::vector<PerRadiusRow> per_radius;

    double E_ADM = 0.0;
    std::array<double, 3> P{0, 0, 0};
    bool P_converged = false;
    double E_tail_bound = 0.0;
    double area_r0 = 0.0;
    double penrose_gap = 0.0;
    std::map<std::string, double> f_integral;   // int int r^2 f (with tail ignored: finite part)
    std::map<std::string, double> refined_gap;  // E - sqrt(|S|/16pi) - f_integral
    std::vector<double> horizon_radii;
    double conjecture1_lhs = 0.0, conjecture1_rhs = 0.0;

    Verdict dec_verdict, untrapped_verdict, monotonicity, penrose;
    std::map<std::string, Verdict> refined;
    std::map<std::string, Verdict> modified_mass_monotone;
    RigidityFlags rigidity;
    DecayCheck decay;
    ResidualSummary residuals;
    Tolerances tol;
};

inline std::string boundary_mode_name(BoundaryMode m) {
    switch (m) {
        case BoundaryMode::minimal: return "minimal";
        case BoundaryMode::generalized_horizon: return "generalized_horizon";
        case BoundaryMode::prescribed: return "prescribed";
    }
    return "?";
}

// Assembles the report: per-radius energies and expansions, ADM limits,
// inequality verdicts with precondition gating, rigidity proximity flags,
// and the conjecture probe numbers (reported, never asserted).
inline DiagnosticsReport penrose_report(const InitialDataFamily& d,
                                        const std::vector<FChoice>& f_choices,
                                        const Tolerances& tol = {}) {
    require_n3(d, "penrose_report");
    DiagnosticsReport rep;
    rep.n = d.n();
    rep.Lambda = d.Lambda();
    rep.hyperboloidal = d.hyperboloidal;
    rep.boundary_mode = boundary_mode_name(d.boundary);
    rep.tol = tol;

    const std::size_t nr = d.n_radii();
    const bool use_ah_energy = d.Lambda() < 0.0;

    std::vector<double> mono_series(nr);
    double mu_sup = 0.0, j0_sup = 0.0;
    std::vector<double> conj_integrand(nr);
    rep.per_radius.resize(nr);
    UntrappedScan scan = untrapped_scan(d);
    double dec_min = 1e300;
    for (std::size_t i = 0; i < nr; ++i) {
        const SphereMetric sigma = d.metric_at(i);
        PerRadiusRow& row = rep.per_radius[i];
        row.r = d.radius(i);
        row.m_H = hawking_energy(d, i);
        row.m_H_AH = hawking_energy_AH(d, i, d.hyperboloidal);
        NullExpansions ex = null_expansions(d, i);
        row.theta_plus_min = ex.theta_plus.min();
        row.theta_plus_max = ex.theta_plus.max();
        row.theta_minus_min = ex.theta_minus.min();
        row.theta_minus_max = ex.theta_minus.max();
        row.untrapped = scan.flag[i];
        SphereField margin = dec_margin(d.matter, d.slice(i, sigma));
        row.dec_margin_min = margin.min();
        dec_min = std::min(dec_min, row.dec_margin_min);
        mu_sup = std::max(mu_sup, d.matter.mu_field(*d.sphere, row.r).max_abs());
        j0_sup = std::max(j0_sup, d.matter.j0_field(*d.sphere, row.r).max_abs());
        mono_series[i] = use_ah_energy ? row.m_H_AH : row.m_H;

        SphereField jn = momentum_norm(d.matter, d.slice(i, sigma));
        SphereField gap(*d.sphere);
        SphereField j0f = d.matter.j0_field(*d.sphere, row.r);
        for (std::size_t m = 0; m < gap.size(); ++m)
            gap[m] = row.r * row.r * (jn[m] - d.inv_N[i][m] * std::abs(j0f[m]));
        conj_integrand[i] = integrate(gap, sigma);
    }

    // modified masses per choice
    std::vector<std::vector<double>> mf_series;
    for (const FChoice& fc : f_choices) {
        std::vector<double> mf = modified_mass_series(d, fc);
        for (std::size_t i = 0; i < nr; ++i) rep.per_radius[i].M_f[fc.name()] = mf[i];
        mf_series.push_back(std::move(mf));
    }

    // asymptotics
    AdmResult adm = adm_quantities(d);
    rep.E_ADM = adm.E;
    rep.P = adm.P;
    rep.P_converged = adm.P_converged;
    rep.E_tail_bound = adm.tail_bound;
    rep.energy_method = adm.method;
    rep.decay = decay_suite(d);

    // boundary leaf geometry
    const SphereMetric sigma0 = d.metric_at(0);
    rep.area_r0 = d.radius(0) * d.radius(0) * area(sigma0);
    const double sqrt_term = std::sqrt(rep.area_r0 / (16.0 * kPi));
    rep.penrose_gap = rep.E_ADM - sqrt_term;

    // horizon leaves: spacetime mean curvature vanishing on the whole leaf
    for (std::size_t i = 0; i < nr; ++i) {
        double sup = 0.0;
        const double r = d.radius(i);
        for (std::size_t m = 0; m < d.inv_N[i].size(); ++m) {
            const double w = d.inv_N[i][m], pp = d.p[i][m];
            sup = std::max(sup, std::abs(w * w - r * r * pp * pp));
        }
        if (sup <= tol.horizon * (1.0 + 1.0 / (r * r))) rep.horizon_radii.push_back(r);
    }
    const bool boundary_is_horizon = !rep.horizon_radii.empty() &&
                                     rep.horizon_radii.front() == d.radius(0);

    // precondition verdicts
    rep.dec_verdict.value = dec_min;
    rep.dec_verdict.state =
        dec_min >= -tol.dec * (1.0 + mu_sup) ? VerdictState::pass : VerdictState::fail;
    rep.untrapped_verdict.value = *std::min_element(scan.margin.begin() + 1, scan.margin.end());
    rep.untrapped_verdict.state =
        scan.interior_true() ? VerdictState::pass : VerdictState::fail;

    const bool preconditions = rep.dec_verdict.state == VerdictState::pass &&
                               rep.untrapped_verdict.state == VerdictState::pass;

    // monotonicity of the matching energy along the foliation
    double mono_min = 1e300;
    for (std::size_t i = 0; i + 1 < nr; ++i) {
        const double dr = d.radius(i + 1) - d.radius(i);
        const double slope = (mono_series[i + 1] - mono_series[i]) / dr;
        mono_min = std::min(mono_min,
                            slope + tol.monotonicity * (1.0 + std::abs(mono_series[i])));
    }
    rep.monotonicity.value = mono_min;
    rep.monotonicity.state = !preconditions ? VerdictState::not_applicable
                             : mono_min >= 0.0 ? VerdictState::pass
                                               : VerdictState::fail;

    rep.penrose.value = rep.penrose_gap;
    rep.penrose.state = (!preconditions || !boundary_is_horizon)
                            ? VerdictState::not_applicable
                        : rep.penrose_gap >= -tol.penrose ? VerdictState::pass
                                                          : VerdictState::fail;

    for (std::size_t c = 0; c < f_choices.size(); ++c) {
        const std::string name = f_choices[c].name();
        const std::vector<double> fints = f_choice_slice_integrals(d, f_choices[c]);
        const std::vector<double> cum = cumulative_nodal_integral(d.grid.nodes, fints);
        rep.f_integral[name] = cum.back();
        rep.refined_gap[name] = rep.E_ADM - sqrt_term - cum.back();
        Verdict v;
        v.value = rep.refined_gap[name];
        v.state = (!preconditions || !boundary_is_horizon) ? VerdictState::not_applicable
                  : v.value >= -tol.refined               ? VerdictState::pass
                                                          : VerdictState::fail;
        rep.refined[name] = v;

        Verdict mono;
        double mn = 1e300;
        for (std::size_t i = 0; i + 1 < nr; ++i) {
            const double dr = d.radius(i + 1) - d.radius(i);
            const double slope = (mf_series[c][i + 1] - mf_series[c][i]) / dr;
            mn = std::min(mn, slope + tol.monotonicity * (1.0 + std::abs(mf_series[c][i])));
        }
        mono.value = mn;
        mono.state = !preconditions ? VerdictState::not_applicable
                     : mn >= 0.0    ? VerdictState::pass
                                    : VerdictState::fail;
        rep.modified_mass_monotone[name] = mono;
    }

    // conjecture probe: |P| vs the accumulated angular-momentum budget
    rep.conjecture1_lhs = std::sqrt(rep.P[0] * rep.P[0] + rep.P[1] * rep.P[1] +
                                    rep.P[2] * rep.P[2]);
    rep.conjecture1_rhs = cumulative_nodal_integral(d.grid.nodes, conj_integrand).back();

    // rigidity proximity: necessary conditions near equality
    if (rep.penrose.state != VerdictState::not_applicable &&
        std::abs(rep.penrose_gap) <= tol.rigidity_gap) {
        rep.rigidity.evaluated = true;
        double sig_dev = 0.0, n_spread = 0.0;
        for (std::size_t i = 0; i < nr; i += std::max<std::size_t>(1, nr / 16)) {
            sig_dev = std::max(sig_dev, d.metric_at(i).max_deviation_from_round());
            n_spread = std::max(n_spread, d.inv_N[i].max() - d.inv_N[i].min());
        }
        rep.rigidity.sigma_deviation = sig_dev;
        rep.rigidity.N_spread = n_spread;
        rep.rigidity.J0_sup = j0_sup;
        rep.rigidity.sigma_round = sig_dev <= 1e-10;
        rep.rigidity.N_angular_constant = n_spread <= 1e-10;
        rep.rigidity.J0_small = j0_sup <= 1e-10;
    }
    return rep;
}

}  // namespace collar
