#pragma once

// Radius-ladder extrapolation for quantities Q(r) = Q_inf + C r^(-s) + ...
// The ladder is geometric, r_j = r_max * 2^(-j/2), so consecutive
// differences shrink by the fixed factor 2^(s/2) and the decay exponent s
// can be measured from difference ratios before extrapolating.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace collar {

struct LadderFit {
    double value = 0.0;      // extrapolated Q_inf
    double exponent = 0.0;   // measured s
    double tail_bound = 0.0; // estimate of |Q(r_max) - Q_inf|
    bool converged = false;
};

// values[j] = Q(r_max * ratio^-j), j = 0..m (ratio > 1). values[0] is the
// outermost sample. The error modes C_k r^{-s-k} become geometric sequences
// in j, so iterated Shanks transforms peel them off one per round.
inline LadderFit ladder_extrapolate(const std::vector<double>& values, double ratio) {
    LadderFit fit;
    const std::size_t m = values.size();
    if (m < 3) throw std::invalid_argument("ladder_extrapolate: need >= 3 ladder values");
    const double qscale = std::max(1.0, std::abs(values[0]));

    std::vector<double> d(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) d[j] = values[j] - values[j + 1];
    double dmax = 0.0;
    for (double x : d) dmax = std::max(dmax, std::abs(x));
    if (dmax <= 1e-13 * qscale) {
        fit.value = values[0];
        fit.exponent = 0.0;
        fit.tail_bound = 1e-13 * qscale;
        fit.converged = true;
        return fit;
    }
    // leading exponent from the innermost difference ratios (reported, and a
    // convergence gate: differences must shrink outward)
    double slog = 0.0;
    int cnt = 0;
    for (std::size_t j = 0; j + 1 < d.size(); ++j) {
        const double q = d[j + 1] / d[j];
        if (q > 1.0 + 1e-12) {
            slog += std::log(q);
            ++cnt;
        }
    }
    if (cnt == 0) return fit;  // not converging along the ladder
    fit.exponent = slog / cnt / std::log(ratio);

    // iterated Shanks on the sequence ordered inside -> out
    std::vector<double> seq(values.rbegin(), values.rend());
    double last = seq.back();
    while (seq.size() >= 3) {
        std::vector<double> next;
        for (std::size_t k = 0; k + 2 < seq.size(); ++k) {
            const double d1 = seq[k + 1] - seq[k];
            const double d2 = seq[k + 2] - seq[k + 1];
            const double den = d2 - d1;
            if (std::abs(den) <= 1e-14 * qscale) {
                next.push_back(seq[k + 2]);
            } else {
                next.push_back(seq[k + 2] - d2 * d2 / den);
            }
        }
        // stop when the transform no longer changes the estimate
        if (std::abs(next.back() - last) <= 1e-14 * qscale) {
            last = next.back();
            break;
        }
        last = next.back();
        seq = std::move(next);
    }
    fit.value = last;
    fit.tail_bound = 3.0 * std::abs(values[0] - fit.value) + 1e-12 * qscale;
    fit.converged = std::isfinite(fit.value) && fit.exponent > 0.0;
    return fit;
}

// Measured decay exponent e of q(r) ~ r^-e from two samples.
inline double measured_exponent(double q1, double r1, double q2, double r2) {
    const double a1 = std::abs(q1), a2 = std::abs(q2);
    if (a1 <= 1e-300 && a2 <= 1e-300) return 1e308;  // identically zero decays faster than anything
    if (a1 <= 1e-300 || a2 <= 1e-300) return 1e308;
    return -std::log(a2 / a1) / std::log(r2 / r1);
}

// Order of convergence from errors at resolution h and h/2.
inline double convergence_order(double err_coarse, double err_fine) {
    if (err_fine <= 0.0) return 16.0;
    return std::log2(err_coarse / err_fine);
}

}  // namespace collar
