#include "fos/orlicz.hpp"

#include <algorithm>
#include <cmath>

#include "fos/errors.hpp"

namespace fos {

namespace {

double ray_modular(const GridFunction& u, const NFunction& M, double k) {
    std::vector<double> vals(u.values.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = M.eval_saturating(k * u.values[i]);
    return integrate(u.domain, vals);
}

double start_scaling(const GridFunction& u, const NFunction& M) {
    // k u stays below M^{-1}(1/|Omega|) pointwise, so the modular is at most 1 there.
    const double target = std::min(1.0 / u.domain.measure(), M.eval(M.domain_cap()));
    return M.inverse(target) / u.sup_norm();
}

}  // namespace

double modular(const GridFunction& u, const NFunction& M, SingleRule rule) {
    std::vector<double> vals(u.values.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = M.eval(u.values[i]);
    return integrate(u.domain, vals, rule);
}

double modular_saturating(const GridFunction& u, const NFunction& M, SingleRule rule) {
    std::vector<double> vals(u.values.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = M.eval_saturating(u.values[i]);
    return integrate(u.domain, vals, rule);
}

GaugeResult luxemburg_norm_detail(const GridFunction& u, const NFunction& M) {
    if (u.sup_norm() == 0.0) return {};
    return luxemburg_gauge([&](double k) { return ray_modular(u, M, k); }, start_scaling(u, M));
}

double luxemburg_norm(const GridFunction& u, const NFunction& M) { return luxemburg_norm_detail(u, M).value; }

GaugeResult amemiya_orlicz_norm_detail(const GridFunction& u, const NFunction& M) {
    if (u.sup_norm() == 0.0) return {};
    const auto lux = luxemburg_norm_detail(u, M);
    auto res = amemiya_gauge([&](double k) { return ray_modular(u, M, k); }, lux.k);
    res.evaluations += lux.evaluations;
    return res;
}

double amemiya_orlicz_norm(const GridFunction& u, const NFunction& M) {
    return amemiya_orlicz_norm_detail(u, M).value;
}

double holder_gap(const GridFunction& u, const GridFunction& v, const NFunction& M, const NFunction& M_bar) {
    if (!(u.domain == v.domain)) throw ValidationError("v", "u and v must live on the same domain");
    std::vector<double> prod(u.values.size());
    for (size_t i = 0; i < prod.size(); ++i) prod[i] = std::abs(u.values[i] * v.values[i]);
    return 2.0 * luxemburg_norm(u, M) * luxemburg_norm(v, M_bar) - integrate(u.domain, prod);
}

double holder_gap(const GridFunction& u, const GridFunction& v, const NFunction& M) {
    return holder_gap(u, v, M, M.conjugate());
}

TruncationConstants truncation_constants(const NFunction& M, const Domain& d) {
    const auto yt = M.young_truncation();
    TruncationConstants c;
    c.alpha = yt.alpha;
    const double m_alpha = M.eval(yt.alpha);
    c.beta = std::max(1.0, yt.alpha / m_alpha);
    c.gamma = m_alpha * d.measure() + 1.0;
    return c;
}

}  // namespace fos
