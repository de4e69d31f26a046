#include "fos/gauge.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fos/errors.hpp"

namespace fos {

namespace {

constexpr int kMaxExpansions = 2000;  // 2^2000 spans far more than the double range

}  // namespace

GaugeResult luxemburg_gauge(const RayModular& phi, double k_start, double rel_tol) {
    if (!(k_start > 0.0) || !std::isfinite(k_start)) throw RangeError("luxemburg_gauge: k_start must be positive");
    GaugeResult r;
    auto eval = [&](double k) {
        ++r.evaluations;
        const double v = phi(k);
        if (std::isnan(v)) throw DegenerateInputError("luxemburg_gauge: modular returned NaN");
        return v;
    };
    double k_lo = k_start, k_hi = k_start;
    double f_lo = eval(k_lo);
    for (int i = 0; f_lo > 1.0; ++i) {
        if (i == kMaxExpansions || k_lo < std::numeric_limits<double>::min())
            throw ConvergenceError("luxemburg_gauge: no scaling brings the modular below 1 (bracket exhausted at k = " +
                                   std::to_string(k_lo) + ")");
        k_hi = k_lo;
        k_lo *= 0.5;
        f_lo = eval(k_lo);
    }
    if (k_hi == k_lo) {
        double f_hi = f_lo;
        for (int i = 0; f_hi <= 1.0; ++i) {
            if (i == kMaxExpansions || k_hi > std::numeric_limits<double>::max() / 4)
                throw ConvergenceError("luxemburg_gauge: modular stays below 1 on the whole bracket (k = " +
                                       std::to_string(k_hi) + "); u is numerically zero");
            k_lo = k_hi;
            f_lo = f_hi;
            k_hi *= 2.0;
            f_hi = eval(k_hi);
        }
    }
    // Invariant: phi(k_lo) <= 1 < phi(k_hi).
    while (k_hi / k_lo - 1.0 > rel_tol) {
        const double k_mid = std::sqrt(k_lo * k_hi);
        if (k_mid <= k_lo || k_mid >= k_hi) break;
        const double f_mid = eval(k_mid);
        if (f_mid <= 1.0) {
            k_lo = k_mid;
            f_lo = f_mid;
        } else {
            k_hi = k_mid;
        }
    }
    r.k = k_lo;
    r.value = 1.0 / k_lo;
    r.modular_at = f_lo;
    return r;
}

GaugeResult amemiya_gauge(const RayModular& phi, double k_lux, double rel_tol) {
    if (!(k_lux > 0.0) || !std::isfinite(k_lux)) throw RangeError("amemiya_gauge: k_lux must be positive");
    GaugeResult r;
    auto g = [&](double logk) {
        ++r.evaluations;
        const double k = std::exp(logk);
        return (1.0 + phi(k)) / k;
    };
    // Bracket [a, b] in log k: below k_lux / 2 the objective exceeds 2 / k_lux >= g(k_lux).
    double a = std::log(0.5 * k_lux);
    double m = std::log(k_lux);
    double gm = g(m);
    double b = m + std::log(2.0);
    double gb = g(b);
    for (int i = 0; gb < gm; ++i) {
        if (i == kMaxExpansions)
            throw ConvergenceError("amemiya_gauge: objective keeps decreasing up to k = " + std::to_string(std::exp(b)));
        m = b;
        gm = gb;
        b += std::log(2.0);
        gb = g(b);
    }
    if (m - a > std::log(2.0) + 1e-12) a = m - std::log(2.0);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double g1 = g(x1), g2 = g(x2);
    const double tol = std::log1p(rel_tol);
    while (b - a > tol) {
        if (g1 <= g2) {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - invphi * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + invphi * (b - a);
            g2 = g(x2);
        }
    }
    const double best = g1 <= g2 ? x1 : x2;
    r.k = std::exp(best);
    r.modular_at = phi(r.k);
    r.value = std::min({g1, g2, gm});
    if (gm < std::min(g1, g2)) {
        r.k = std::exp(m);
        r.modular_at = phi(r.k);
    }
    if (!std::isfinite(r.value))
        throw ConvergenceError("amemiya_gauge: objective infinite on the search bracket");
    return r;
}

}  // namespace fos
