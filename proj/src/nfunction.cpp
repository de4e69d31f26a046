#include "fos/nfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fos/errors.hpp"
#include "fos/gauss.hpp"

namespace fos {

std::string to_string(Family f) {
    switch (f) {
        case Family::Power: return "power";
        case Family::PowerLog: return "power_log";
        case Family::ExpQuad: return "exp_quad";
        case Family::Tabulated: return "tabulated";
        case Family::Conjugate: return "conjugate";
        case Family::YoungTruncation: return "young_truncation";
    }
    return "unknown";
}

namespace detail {

class NFunctionImpl {
public:
    virtual ~NFunctionImpl() = default;
    virtual Family family() const = 0;
    virtual double parameter() const { return 0.0; }
    virtual double scale() const { return 1.0; }
    virtual double cap() const = 0;
    // Both assume 0 <= t <= cap().
    virtual double value(double t) const = 0;
    virtual double density(double t) const = 0;
    virtual bool is_n_function() const { return true; }
    virtual std::string describe() const = 0;
};

}  // namespace detail

namespace {

using detail::NFunctionImpl;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

class PowerImpl final : public NFunctionImpl {
public:
    PowerImpl(double p, double c, double cap) : p_(p), c_(c), cap_(cap) {}
    Family family() const override { return Family::Power; }
    double parameter() const override { return p_; }
    double scale() const override { return c_; }
    double cap() const override { return cap_; }
    double value(double t) const override { return c_ * std::pow(t, p_); }
    double density(double t) const override { return c_ * p_ * std::pow(t, p_ - 1.0); }
    std::string describe() const override {
        return c_ == 1.0 ? "power(p=" + fmt(p_) + ")"
                         : "power(p=" + fmt(p_) + ", scale=" + fmt(c_) + ")";
    }

private:
    double p_, c_, cap_;
};

class PowerLogImpl final : public NFunctionImpl {
public:
    PowerLogImpl(double p, double cap) : p_(p), cap_(cap) {}
    Family family() const override { return Family::PowerLog; }
    double parameter() const override { return p_; }
    double cap() const override { return cap_; }
    double value(double t) const override { return std::pow(t, p_) * std::log1p(t); }
    double density(double t) const override {
        if (t == 0.0) return 0.0;
        return p_ * std::pow(t, p_ - 1.0) * std::log1p(t) + std::pow(t, p_) / (1.0 + t);
    }
    std::string describe() const override { return "power_log(p=" + fmt(p_) + ")"; }

private:
    double p_, cap_;
};

class ExpQuadImpl final : public NFunctionImpl {
public:
    explicit ExpQuadImpl(double cap) : cap_(cap) {}
    Family family() const override { return Family::ExpQuad; }
    double cap() const override { return cap_; }
    double value(double t) const override { return std::expm1(t * t); }
    double density(double t) const override { return 2.0 * t * std::exp(t * t); }
    std::string describe() const override { return "exp_quad"; }

private:
    double cap_;
};

std::size_t segment(const std::vector<double>& x, double t) {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t k = static_cast<std::size_t>(it - x.begin());
    if (k == 0) return 0;
    return std::min(k - 1, x.size() - 2);
}

// Fritsch-Carlson slopes (the scheme scipy's PchipInterpolator uses).
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        delta[k] = (y[k + 1] - y[k]) / h[k];
    }
    if (n == 2) {
        d[0] = d[1] = delta[0];
        return d;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    auto edge = [](double h0, double h1, double d0, double d1) {
        double e = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (std::signbit(e) != std::signbit(d0) || e == 0.0) return 0.0;
        if (std::signbit(d0) != std::signbit(d1) && std::abs(e) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return e;
    };
    d[0] = edge(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

class DensityTableImpl final : public NFunctionImpl {
public:
    DensityTableImpl(std::vector<double> x, std::vector<double> m)
        : x_(std::move(x)), m_(std::move(m)) {
        d_ = pchip_slopes(x_, m_);
        cumulative_.assign(x_.size(), 0.0);
        for (std::size_t k = 0; k + 1 < x_.size(); ++k)
            cumulative_[k + 1] = cumulative_[k] + piece_integral(k, x_[k + 1] - x_[k]);
    }
    Family family() const override { return Family::Tabulated; }
    double cap() const override { return x_.back(); }
    double value(double t) const override {
        const std::size_t k = segment(x_, t);
        return cumulative_[k] + piece_integral(k, t - x_[k]);
    }
    double density(double t) const override {
        const std::size_t k = segment(x_, t);
        const auto [c2, c3] = coefficients(k);
        const double tau = t - x_[k];
        return m_[k] + tau * (d_[k] + tau * (c2 + tau * c3));
    }
    std::string describe() const override {
        return "tabulated_density(knots=" + std::to_string(x_.size()) + ")";
    }

private:
    std::pair<double, double> coefficients(std::size_t k) const {
        const double h = x_[k + 1] - x_[k];
        const double delta = (m_[k + 1] - m_[k]) / h;
        return {(3.0 * delta - 2.0 * d_[k] - d_[k + 1]) / h, (d_[k] + d_[k + 1] - 2.0 * delta) / (h * h)};
    }
    double piece_integral(std::size_t k, double tau) const {
        const auto [c2, c3] = coefficients(k);
        return tau * (m_[k] + tau * (d_[k] / 2.0 + tau * (c2 / 3.0 + tau * c3 / 4.0)));
    }

    std::vector<double> x_, m_, d_, cumulative_;
};

class ValueTableImpl final : public NFunctionImpl {
public:
    ValueTableImpl(std::vector<double> x, std::vector<double> v, std::vector<double> d)
        : x_(std::move(x)), v_(std::move(v)), d_(std::move(d)) {
        // Power-law start on [0, x_1] matched to value and slope at x_1.
        first_exponent_ = v_[1] > 0.0 ? x_[1] * d_[1] / v_[1] : 1.0;
    }
    Family family() const override { return Family::Tabulated; }
    double cap() const override { return x_.back(); }
    double value(double t) const override {
        const std::size_t k = segment(x_, t);
        if (k == 0) return v_[1] * std::pow(t / x_[1], first_exponent_);
        const auto [c2, c3] = coefficients(k);
        const double tau = t - x_[k];
        return v_[k] + tau * (d_[k] + tau * (c2 + tau * c3));
    }
    double density(double t) const override {
        const std::size_t k = segment(x_, t);
        if (k == 0) {
            if (t == 0.0) return first_exponent_ > 1.0 ? 0.0 : d_[1];
            return d_[1] * std::pow(t / x_[1], first_exponent_ - 1.0);
        }
        const auto [c2, c3] = coefficients(k);
        const double tau = t - x_[k];
        return d_[k] + tau * (2.0 * c2 + 3.0 * c3 * tau);
    }
    std::string describe() const override {
        return "tabulated_values(knots=" + std::to_string(x_.size()) + ")";
    }

private:
    std::pair<double, double> coefficients(std::size_t k) const {
        const double h = x_[k + 1] - x_[k];
        const double delta = (v_[k + 1] - v_[k]) / h;
        return {(3.0 * delta - 2.0 * d_[k] - d_[k + 1]) / h, (d_[k] + d_[k + 1] - 2.0 * delta) / (h * h)};
    }

    std::vector<double> x_, v_, d_;
    double first_exponent_;
};

// sup{t in [0, cap] : m(t) <= s}, with sup of the empty set taken as 0.
double generalized_inverse_density(const NFunctionImpl& f, double s) {
    const double cap = f.cap();
    const double mcap = f.density(cap);
    if (s > mcap) throw RangeError("conjugate density: argument " + fmt(s) + " beyond trusted range " + fmt(mcap));
    if (s == mcap) return cap;
    if (f.density(0.0) > s) return 0.0;
    if (s == 0.0 && f.density(0.0) == 0.0) {
        // m > 0 on (0, cap] for N-functions; for flat starts bisect below.
        if (f.density(std::numeric_limits<double>::min()) > 0.0) return 0.0;
    }
    double lo, hi;
    double t = std::min(1.0, cap);
    if (f.density(t) <= s) {
        lo = t;
        hi = std::min(2.0 * t, cap);
        while (f.density(hi) <= s) {
            lo = hi;
            hi = std::min(2.0 * hi, cap);
        }
    } else {
        hi = t;
        lo = 0.5 * t;
        while (f.density(lo) > s) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) return 0.0;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f.density(mid) <= s) lo = mid;
        else hi = mid;
    }
    return lo;
}

class ConjugateImpl final : public NFunctionImpl {
public:
    explicit ConjugateImpl(std::shared_ptr<const NFunctionImpl> base)
        : base_(std::move(base)), cap_(base_->density(base_->cap())) {}
    Family family() const override { return Family::Conjugate; }
    double cap() const override { return cap_; }
    double value(double s) const override {
        // Young's equality at t = m_bar(s).
        const double t = generalized_inverse_density(*base_, s);
        return std::max(0.0, s * t - base_->value(t));
    }
    double density(double s) const override { return generalized_inverse_density(*base_, s); }
    bool is_n_function() const override { return base_->is_n_function(); }
    std::string describe() const override { return "conjugate(" + base_->describe() + ")"; }

private:
    std::shared_ptr<const NFunctionImpl> base_;
    double cap_;
};

class YoungTruncationImpl final : public NFunctionImpl {
public:
    YoungTruncationImpl(std::shared_ptr<const NFunctionImpl> base, double alpha)
        : base_(std::move(base)), alpha_(alpha), slope_(base_->value(alpha) / alpha) {}
    Family family() const override { return Family::YoungTruncation; }
    double parameter() const override { return alpha_; }
    double cap() const override { return base_->cap(); }
    double value(double t) const override { return t <= alpha_ ? slope_ * t : base_->value(t); }
    double density(double t) const override { return t < alpha_ ? slope_ : base_->density(t); }
    bool is_n_function() const override { return false; }
    std::string describe() const override {
        return "young_truncation(" + base_->describe() + ", alpha=" + fmt(alpha_) + ")";
    }

private:
    std::shared_ptr<const NFunctionImpl> base_;
    double alpha_, slope_;
};

void validate_sampled(const NFunctionImpl& f) {
    const double cap = f.cap();
    if (!(cap > 0.0) || !std::isfinite(cap)) throw DegenerateInputError("N-function: domain cap must be positive and finite");
    if (f.density(0.0) != 0.0) throw DegenerateInputError("N-function: m(0) must be 0");
    const int n = 200;
    const double t_min = cap * 1e-9;
    double prev_m = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = t_min * std::pow(cap / t_min, static_cast<double>(k) / n);
        const double m = f.density(t);
        if (!(m > 0.0) || !std::isfinite(m))
            throw DegenerateInputError("N-function: m(t) must be positive and finite at t=" + fmt(t));
        if (m < prev_m * (1.0 - 1e-12))
            throw DegenerateInputError("N-function: density decreases near t=" + fmt(t));
        prev_m = m;
    }
    const double ratio_lo = f.value(t_min) / t_min;
    const double ratio_hi = f.value(cap) / cap;
    if (!(ratio_lo < ratio_hi))
        throw DegenerateInputError("N-function: M(t)/t must grow from the small-t to the large-t end of the grid");
}

// int_0^upper f by geometric subdivision [upper 2^{-k-1}, upper 2^{-k}], stopping once a
// level changes the running total by less than rel_tol. Divergence is declared when
// piece sizes stop shrinking for `stall` consecutive levels or max_levels is hit.
struct NearZeroResult {
    double value = 0.0;
    bool converged = false;
    int levels = 0;
};

template <class F>
NearZeroResult near_zero_integral(F&& f, double upper, double rel_tol = 1e-10, int max_levels = 1000,
                                  int stall = 16) {
    NearZeroResult r;
    double hi = upper;
    double prev_piece = std::numeric_limits<double>::infinity();
    int non_shrinking = 0;
    for (int level = 0; level < max_levels; ++level) {
        const double lo = 0.5 * hi;
        if (lo < 1e-300) break;
        const double piece = gauss_panel(f, lo, hi, 10);
        r.value += piece;
        r.levels = level + 1;
        if (!std::isfinite(r.value)) return r;
        if (std::abs(piece) <= rel_tol * std::abs(r.value)) {
            r.converged = true;
            return r;
        }
        non_shrinking = (std::abs(piece) >= std::abs(prev_piece)) ? non_shrinking + 1 : 0;
        if (non_shrinking >= stall) return r;
        prev_piece = piece;
        hi = lo;
    }
    return r;
}

template <class F>
double log_panels(F&& f, double a, double b, int per_decade = 8) {
    if (b <= a) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(std::log10(b / a) * per_decade)));
    const double r = std::pow(b / a, 1.0 / panels);
    double sum = 0.0, lo = a;
    for (int k = 0; k < panels; ++k) {
        const double hi = (k + 1 == panels) ? b : lo * r;
        sum += gauss_panel(f, lo, hi, 10);
        lo = hi;
    }
    return sum;
}

}  // namespace

NFunction::NFunction(std::shared_ptr<const detail::NFunctionImpl> impl) : impl_(std::move(impl)) {}

NFunction NFunction::power(double p, double scale, double cap) {
    if (!(p > 1.0)) throw DegenerateInputError("power: exponent must exceed 1 for an N-function, got " + fmt(p));
    if (!(scale > 0.0)) throw DegenerateInputError("power: scale must be positive");
    auto impl = std::make_shared<PowerImpl>(p, scale, cap);
    validate_sampled(*impl);
    return NFunction(std::move(impl));
}

NFunction NFunction::power_log(double p, double cap) {
    if (!(p >= 1.0)) throw DegenerateInputError("power_log: exponent must be >= 1, got " + fmt(p));
    auto impl = std::make_shared<PowerLogImpl>(p, cap);
    validate_sampled(*impl);
    return NFunction(std::move(impl));
}

NFunction NFunction::exp_quad(double cap) {
    if (!(cap > 0.0) || cap > 26.0) throw RangeError("exp_quad: cap must lie in (0, 26] to stay finite");
    auto impl = std::make_shared<ExpQuadImpl>(cap);
    validate_sampled(*impl);
    return NFunction(std::move(impl));
}

NFunction NFunction::tabulated_density(std::vector<double> t, std::vector<double> m) {
    if (t.size() != m.size()) throw DegenerateInputError("tabulated density: column lengths differ");
    if (t.size() < 2) throw DegenerateInputError("tabulated density: need at least two knots");
    if (t.front() < 0.0) throw DegenerateInputError("tabulated density: knots must be non-negative");
    if (t.front() > 0.0) {
        t.insert(t.begin(), 0.0);
        m.insert(m.begin(), 0.0);
    }
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (!(t[k + 1] > t[k])) throw DegenerateInputError("tabulated density: knots must be strictly increasing");
        if (m[k + 1] < m[k]) throw DegenerateInputError("tabulated density: density must be non-decreasing");
    }
    if (m.front() != 0.0) throw DegenerateInputError("tabulated density: m(0) must be 0");
    for (std::size_t k = 1; k < m.size(); ++k)
        if (!(m[k] > 0.0)) throw DegenerateInputError("tabulated density: m(t) must be positive for t > 0");
    return NFunction(std::make_shared<DensityTableImpl>(std::move(t), std::move(m)));
}

NFunction NFunction::tabulated_values(std::vector<double> t, std::vector<double> values, std::vector<double> density) {
    if (t.size() != values.size() || t.size() != density.size())
        throw DegenerateInputError("tabulated values: column lengths differ");
    if (t.size() < 3) throw DegenerateInputError("tabulated values: need at least three knots");
    if (t.front() != 0.0 || values.front() != 0.0)
        throw DegenerateInputError("tabulated values: table must start at (0, 0)");
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (!(t[k + 1] > t[k])) throw DegenerateInputError("tabulated values: knots must be strictly increasing");
        if (!(values[k + 1] > values[k])) throw DegenerateInputError("tabulated values: M must be strictly increasing");
        if (density[k + 1] < density[k] * (1.0 - 1e-10))
            throw DegenerateInputError("tabulated values: density must be non-decreasing (convexity)");
    }
    return NFunction(std::make_shared<ValueTableImpl>(std::move(t), std::move(values), std::move(density)));
}

Family NFunction::family() const { return impl_->family(); }
double NFunction::parameter() const { return impl_->parameter(); }
double NFunction::scale() const { return impl_->scale(); }
double NFunction::domain_cap() const { return impl_->cap(); }
bool NFunction::is_n_function() const { return impl_->is_n_function(); }
std::string NFunction::describe() const { return impl_->describe(); }

double NFunction::eval(double t) const {
    t = std::abs(t);
    if (!(t <= impl_->cap()))
        throw RangeError(describe() + ": argument " + fmt(t) + " beyond domain cap " + fmt(impl_->cap()));
    return impl_->value(t);
}

double NFunction::eval_saturating(double t) const {
    t = std::abs(t);
    if (!(t <= impl_->cap())) return std::numeric_limits<double>::infinity();
    return impl_->value(t);
}

double NFunction::density(double t) const {
    if (t < 0.0) throw RangeError(describe() + ": density needs t >= 0");
    if (!(t <= impl_->cap()))
        throw RangeError(describe() + ": argument " + fmt(t) + " beyond domain cap " + fmt(impl_->cap()));
    return impl_->density(t);
}

double NFunction::inverse(double y) const {
    if (!(y >= 0.0)) throw RangeError(describe() + ": inverse needs y >= 0");
    if (y == 0.0) return 0.0;
    const double cap = impl_->cap();
    const double ycap = impl_->value(cap);
    if (y > ycap) throw RangeError(describe() + ": inverse argument " + fmt(y) + " beyond M(cap) = " + fmt(ycap));
    if (y == ycap) return cap;
    double lo, hi;
    const double t = std::min(1.0, cap);
    if (impl_->value(t) < y) {
        lo = t;
        hi = std::min(2.0 * t, cap);
        while (impl_->value(hi) < y) {
            lo = hi;
            hi = std::min(2.0 * hi, cap);
        }
    } else {
        hi = t;
        lo = 0.5 * t;
        while (impl_->value(lo) >= y) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) return lo;
        }
    }
    // Invariant: M(lo) < y <= M(hi).
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (impl_->value(mid) < y) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

NFunction NFunction::conjugate() const { return NFunction(std::make_shared<ConjugateImpl>(impl_)); }

double NFunction::young_gap(double s, double t) const {
    if (s < 0.0 || t < 0.0) throw RangeError("young_gap: arguments must be non-negative");
    const NFunction conj = conjugate();
    // tau = m_bar(s): s is a subgradient of M at tau, so the gap equals
    // int_tau^t (m(r) - s) dr, whose integrand has one sign on the interval.
    const double tau = conj.density(s);
    if (t > domain_cap()) throw RangeError("young_gap: t beyond the domain cap");
    if (std::abs(t - tau) <= 0.25 * std::max(t, tau) && t > 0.0 && tau > 0.0) {
        const double lo = std::min(t, tau), hi = std::max(t, tau);
        const double integral = gauss_panel([&](double r) { return impl_->density(r) - s; }, lo, hi, 10);
        return t >= tau ? integral : -integral;
    }
    return (impl_->value(t) - impl_->value(tau)) - s * (t - tau);
}

double NFunction::delta2_constant(double t0, double T) const {
    if (!(T > 0.0) || t0 < 0.0 || t0 >= T) throw RangeError("delta2_constant: need 0 <= t0 < T");
    if (2.0 * T > domain_cap()) throw RangeError("delta2_constant: 2T exceeds the domain cap");
    const double lo = std::max(t0, T * 1e-6);
    const int n = 400;
    double k_hat = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = lo * std::pow(T / lo, static_cast<double>(k) / n);
        const double m_t = impl_->value(t);
        if (!(m_t > 0.0)) throw DegenerateInputError("delta2_constant: M vanishes at t=" + fmt(t));
        k_hat = std::max(k_hat, impl_->value(2.0 * t) / m_t);
    }
    return k_hat;
}

double NFunction::dominance_ratio(const NFunction& other, double lambda, double T) const {
    if (!(lambda > 0.0) || !(T > 0.0)) throw RangeError("dominance_ratio: lambda and T must be positive");
    return other.eval(lambda * T) / eval(T);
}

double NFunction::conjugate_growth_index(double t_lo, double t_hi) const {
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw RangeError("conjugate_growth_index: need 0 < t_lo < t_hi");
    const NFunction conj = conjugate();
    const int n = 200;
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(k) / n);
        worst = std::max(worst, conj.eval(density(t)) / eval(t));
    }
    return 1.0 + worst;
}

IntegrabilityReport NFunction::check_integrability(int N, double s, double tau_max) const {
    if (N < 1) throw RangeError("check_integrability: N must be positive");
    if (!(s > 0.0 && s < 1.0)) throw RangeError("check_integrability: s must lie in (0, 1)");
    if (!(tau_max > 100.0)) throw RangeError("check_integrability: tau_max must exceed 100");
    const double exponent = (N + s) / N;
    auto integrand = [&](double tau) { return inverse(tau) / std::pow(tau, exponent); };

    IntegrabilityReport rep;
    rep.tau_max = tau_max;
    const NearZeroResult nz = near_zero_integral(integrand, 1.0);
    rep.levels = nz.levels;
    rep.near_zero_finite = nz.converged;
    rep.near_zero = nz.converged ? nz.value : std::numeric_limits<double>::infinity();

    const double t100 = log_panels(integrand, 1.0, tau_max / 100.0);
    const double t10 = t100 + log_panels(integrand, tau_max / 100.0, tau_max / 10.0);
    rep.tail = t10 + log_panels(integrand, tau_max / 10.0, tau_max);
    rep.tail_increment_prev = t10 - t100;
    rep.tail_increment_last = rep.tail - t10;
    rep.tail_growing = rep.tail_increment_last >= 0.99 * rep.tail_increment_prev;
    return rep;
}

NFunction NFunction::sobolev_conjugate(int N, double s) const {
    const IntegrabilityReport rep = check_integrability(N, s, std::min(1e3, eval(domain_cap())));
    if (!rep.near_zero_finite)
        throw PreconditionError("sobolev_conjugate: int_0^1 M^{-1}(tau)/tau^{(N+s)/N} does not settle (condition fails near 0)");
    if (!rep.tail_growing)
        throw PreconditionError("sobolev_conjugate: int_1^inf M^{-1}(tau)/tau^{(N+s)/N} appears finite (condition fails at infinity)");

    const double exponent = (N + s) / N;
    auto integrand = [&](double tau) { return inverse(tau) / std::pow(tau, exponent); };
    const double t_lo = 1e-12;
    const double t_hi = std::min(eval(domain_cap()), 1e30);
    if (!(t_hi > 1e3 * t_lo)) throw DegenerateInputError("sobolev_conjugate: trusted range too small to tabulate");
    const int per_decade = 30;
    const int n = static_cast<int>(std::ceil(std::log10(t_hi / t_lo) * per_decade));
    const double ratio = std::pow(t_hi / t_lo, 1.0 / n);

    // Knots of M_*: abscissa G(t) = M_*^{-1}(t), value t, slope 1 / G'(t).
    std::vector<double> y{0.0}, v{0.0}, d{0.0};
    const NearZeroResult start = near_zero_integral(integrand, t_lo);
    if (!start.converged) throw DivergenceError("sobolev_conjugate: near-zero tabulation did not settle");
    double g = start.value;
    double t = t_lo;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            const double t_next = (k == n) ? t_hi : t * ratio;
            g += gauss_panel(integrand, t, t_next, 10);
            t = t_next;
        }
        y.push_back(g);
        v.push_back(t);
        d.push_back(1.0 / integrand(t));
    }
    for (std::size_t k = 1; k + 1 < d.size(); ++k)
        if (d[k + 1] < d[k] * (1.0 - 1e-9))
            throw DegenerateInputError("sobolev_conjugate: tabulated M_* fails the convexity check");
    return tabulated_values(std::move(y), std::move(v), std::move(d));
}

YoungTruncation NFunction::young_truncation() const {
    auto below = [&](double t) { return impl_->value(t) <= t; };
    const double cap = domain_cap();
    double alpha;
    if (cap >= 1.0 && below(1.0)) {
        alpha = 1.0;
    } else {
        double hi = std::min(1.0, cap), lo = -1.0;
        for (int k = 0; k < 1000 && hi > 1e-300; ++k) {
            const double t = 0.5 * hi;
            if (below(t)) {
                lo = t;
                break;
            }
            hi = t;
        }
        if (lo < 0.0) throw DegenerateInputError("young_truncation: no t with M(t) <= t found below the domain cap");
        // Invariant: M(lo) <= lo, M(hi) > hi.
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (below(mid)) lo = mid;
            else hi = mid;
        }
        alpha = lo;
    }
    const double slope = impl_->value(alpha) / alpha;
    return {NFunction(std::make_shared<YoungTruncationImpl>(impl_, alpha)), alpha, slope};
}

GrowthEstimate growth_estimate_keps(const NFunction& m_star, double eps, int N, double s, double t_probe) {
    if (!(eps > 0.0)) throw RangeError("growth_estimate_keps: eps must be positive");
    if (!(t_probe > 0.0) || t_probe > m_star.domain_cap())
        throw RangeError("growth_estimate_keps: t_probe must lie in (0, cap of M_*]");
    const double q = (N - s) / N;
    const int points = 1000;
    std::vector<double> t(points), h(points), g(points), mstar(points);
    for (int k = 0; k < points; ++k) {
        t[k] = t_probe * (k + 1) / points;
        mstar[k] = m_star.eval(t[k]);
        h[k] = std::pow(mstar[k], q) / t[k];
        g[k] = mstar[k] / t[k];
    }
    int k0 = -1;
    for (int k = 0; k < points; ++k) {
        if (h[k] <= g[k] / (2.0 * eps)) {
            k0 = k;
            break;
        }
    }
    if (k0 < 0)
        throw DegenerateInputError("growth_estimate_keps: h(t) <= g(t)/(2 eps) never holds on the probe grid; largest violating t = " + fmt(t.back()));
    GrowthEstimate est;
    est.points = points;
    est.t0 = t[k0];
    double sup_h = 0.0;
    for (int k = 0; k <= k0; ++k) sup_h = std::max(sup_h, h[k]);
    est.k_eps = eps * sup_h;
    est.max_violation = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < points; ++k) {
        const double lhs = std::pow(mstar[k], q);
        const double rhs = mstar[k] / (2.0 * eps) + est.k_eps / eps * t[k];
        est.max_violation = std::max(est.max_violation, lhs - rhs);
    }
    return est;
}

GrowthEstimate NFunction::growth_estimate_keps(double eps, int N, double s, double t_probe) const {
    return fos::growth_estimate_keps(sobolev_conjugate(N, s), eps, N, s, t_probe);
}

double loglog_slope(const NFunction& f, double a, double b, int n) {
    if (!(a > 0.0) || !(b > a) || n < 2) throw RangeError("loglog_slope: need 0 < a < b and n >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < n; ++k) {
        const double x = std::log(a) + (std::log(b) - std::log(a)) * k / (n - 1);
        const double y = std::log(f.eval(std::exp(x)));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fos
