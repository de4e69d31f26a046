#pragma once

#include <functional>

namespace fos {

/// A modular along a ray: phi(k) = rho(k u), non-decreasing in k >= 0, possibly +inf.
using RayModular = std::function<double(double)>;

struct GaugeResult {
    double value = 0.0;       ///< the norm
    double k = 0.0;           ///< scaling at which it was attained (1/lambda for Luxemburg)
    double modular_at = 0.0;  ///< phi(k)
    int evaluations = 0;
};

/// inf{lambda > 0 : phi(1/lambda) <= 1}, by bisection in log k after geometric bracketing
/// from k_start. The returned lambda satisfies phi(1/lambda) <= 1.
GaugeResult luxemburg_gauge(const RayModular& phi, double k_start, double rel_tol = 1e-13);

/// inf_{k > 0} (1 + phi(k)) / k, by golden-section search in log k. The search starts from
/// the Luxemburg scaling k_lux; the minimiser is never below k_lux / 2.
GaugeResult amemiya_gauge(const RayModular& phi, double k_lux, double rel_tol = 1e-10);

}  // namespace fos
