#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature on finite intervals, plus the
// power-law tail estimate used to close improper integrals over [r_max, inf).
//
// The tail convention: if f behaves like f(R)*(s/R)^(-e) for s >= R with
// e > 1, then int_R^inf f = f(R)*R/(e-1). This is exact for pure power laws,
// which is what the matter families produce.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace collar {

namespace detail {
// Kronrod-15 abscissae on [0,1] side (symmetric), Gauss-7 embedded.
inline constexpr double kGK15X[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGK15WK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGK15WG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kGK15X[i]);
        fv[14 - i] = f(c + h * kGK15X[i]);
    }
    fv[7] = f(c);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 7; ++i) resk += kGK15WK[i] * (fv[i] + fv[14 - i]);
    resk += kGK15WK[7] * fv[7];
    for (int i = 0; i < 3; ++i) resg += kGK15WG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    resg += kGK15WG[3] * fv[7];
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}
}  // namespace detail

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 48;
};

// Adaptive bisection driven by the K15-G7 error estimate.
template <typename F>
inline double integrate_adaptive(const F& f, double a, double b,
                                 const QuadratureOptions& opt = {}) {
    if (!(a <= b)) throw std::invalid_argument("integrate_adaptive: a > b");
    if (a == b) return 0.0;
    struct Frame {
        double a, b;
        int depth;
    };
    double total = 0.0;
    std::vector<Frame> stack{{a, b, 0}};
    // first pass estimate of the overall scale for the relative test
    double scale_val, scale_err;
    detail::gk15(f, a, b, scale_val, scale_err);
    double scale = std::abs(scale_val);
    while (!stack.empty()) {
        const Frame fr = stack.back();
        stack.pop_back();
        double val, err;
        detail::gk15(f, fr.a, fr.b, val, err);
        scale = std::max(scale, std::abs(total + val));
        const double tol = std::max(opt.abs_tol, opt.rel_tol * scale) *
                           std::max(1e-30, (fr.b - fr.a) / (b - a));
        if (err <= tol || fr.depth >= opt.max_depth) {
            total += val;
        } else {
            const double m = 0.5 * (fr.a + fr.b);
            stack.push_back({fr.a, m, fr.depth + 1});
            stack.push_back({m, fr.b, fr.depth + 1});
        }
    }
    return total;
}

// Tail of int_R^inf f(s) ds assuming f(s) ~ f(R) (s/R)^(-e), e > 1.
inline double power_law_tail(double f_at_R, double R, double e) {
    if (!(e > 1.0)) throw std::invalid_argument("power_law_tail: needs decay exponent > 1");
    return f_at_R * R / (e - 1.0);
}

}  // namespace collar
