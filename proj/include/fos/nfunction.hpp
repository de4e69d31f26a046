#pragma once

#include <memory>
#include <string>
#include <vector>

namespace fos {

enum class Family {
    Power,            ///< M(t) = c t^p
    PowerLog,         ///< M(t) = t^p log(1+t)
    ExpQuad,          ///< M(t) = exp(t^2) - 1
    Tabulated,        ///< sampled density or sampled values
    Conjugate,        ///< complementary function of another N-function
    YoungTruncation,  ///< linear below alpha, M above
};

std::string to_string(Family f);

namespace detail {
class NFunctionImpl;
}

/// Evidence for the integrability conditions that gate the Sobolev conjugate.
struct IntegrabilityReport {
    double near_zero = 0.0;          ///< int_0^1 M^{-1}(tau) tau^{-(N+s)/N} dtau
    bool near_zero_finite = false;   ///< geometric refinement settled at working precision
    int levels = 0;                  ///< geometric subdivision levels used near tau = 0
    double tail = 0.0;               ///< int_1^{tau_max} of the same integrand
    double tau_max = 0.0;
    double tail_increment_prev = 0.0;  ///< tail growth over (tau_max/100, tau_max/10]
    double tail_increment_last = 0.0;  ///< tail growth over (tau_max/10, tau_max]
    bool tail_growing = false;          ///< last decade adds at least as much as the previous
};

struct YoungTruncation;
struct GrowthEstimate;

/// An N-function M(t) = int_0^t m, represented by its density m.
///
/// Instances are immutable and cheap to copy (shared state); every operation is
/// pure and safe to call concurrently. Evaluation is trusted on [0, domain_cap()]
/// and raises RangeError outside it.
class NFunction {
public:
    /// M(t) = scale * t^p, p > 1.
    static NFunction power(double p, double scale = 1.0, double cap = 1e6);
    /// M(t) = t^p log(1 + t), p >= 1.
    static NFunction power_log(double p, double cap = 1e6);
    /// M(t) = exp(t^2) - 1.
    static NFunction exp_quad(double cap = 20.0);
    /// Density given on strictly increasing knots; shape-preserving cubic interpolation,
    /// M integrated exactly from the interpolant. A knot at t = 0 with m = 0 is added if absent.
    static NFunction tabulated_density(std::vector<double> t, std::vector<double> m);
    /// Values M and densities m given on strictly increasing knots starting at 0;
    /// cubic Hermite interpolation of M with the densities as slopes.
    static NFunction tabulated_values(std::vector<double> t, std::vector<double> values,
                                      std::vector<double> density);

    Family family() const;
    /// Exponent p for Power / PowerLog, alpha for YoungTruncation, 0 otherwise.
    double parameter() const;
    /// Multiplicative constant for Power, 1 otherwise.
    double scale() const;
    double domain_cap() const;
    /// False for Young truncations, whose density does not vanish at 0.
    bool is_n_function() const;
    std::string describe() const;

    /// M(t); |t| is used, matching the even extension to all of R.
    double eval(double t) const;
    /// m(t) for t >= 0.
    double density(double t) const;
    /// M(t) for |t| <= cap, +inf beyond. For use inside modular sums.
    double eval_saturating(double t) const;
    /// Smallest t with M(t) = y, by geometric bracketing and bisection.
    double inverse(double y) const;

    /// Complementary N-function, density m_bar(s) = sup{t : m(t) <= s}.
    NFunction conjugate() const;
    /// M(t) + M_bar(s) - s t; non-negative by Young's inequality.
    double young_gap(double s, double t) const;
    /// Largest sampled M(2t)/M(t) over t in [max(t0, eps_grid), T].
    double delta2_constant(double t0, double T) const;
    /// other(lambda T) / M(T).
    double dominance_ratio(const NFunction& other, double lambda, double T) const;
    /// Smallest p with M_bar(m(t)) <= (p - 1) M(t) on a log grid over [t_lo, t_hi].
    double conjugate_growth_index(double t_lo, double t_hi) const;

    IntegrabilityReport check_integrability(int N, double s, double tau_max = 1e3) const;
    /// Sobolev conjugate M_*, tabulated through M_*^{-1}(t) = int_0^t M^{-1}(tau) tau^{-(N+s)/N}.
    NFunction sobolev_conjugate(int N, double s) const;
    YoungTruncation young_truncation() const;
    /// K_eps for [M_*(t)]^{(N-s)/N} <= M_*(t)/(2 eps) + (K_eps/eps) t, on this function's
    /// Sobolev conjugate.
    GrowthEstimate growth_estimate_keps(double eps, int N, double s, double t_probe) const;

private:
    explicit NFunction(std::shared_ptr<const detail::NFunctionImpl> impl);
    std::shared_ptr<const detail::NFunctionImpl> impl_;
};

struct YoungTruncation {
    NFunction function;
    double alpha;  ///< M(t) <= t on [0, alpha]
    double slope;  ///< M(alpha) / alpha
};

struct GrowthEstimate {
    double k_eps = 0.0;
    double t0 = 0.0;              ///< first probe point with h(t) <= g(t) / (2 eps)
    double max_violation = 0.0;   ///< largest LHS - RHS over the probe grid (<= 0 when it holds)
    int points = 0;
};

/// Same estimate for an already tabulated Sobolev conjugate.
GrowthEstimate growth_estimate_keps(const NFunction& m_star, double eps, int N, double s, double t_probe);

/// Least-squares slope of log M(t) against log t at n log-spaced points in [a, b].
double loglog_slope(const NFunction& f, double a, double b, int n = 64);

}  // namespace fos
