#include "fos/fracspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fos/errors.hpp"
#include "fos/orlicz.hpp"

namespace fos {

void FracParams::validate() const {
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("s", "fractional order must lie in (0, 1)");
    rule.validate();
}

QuadratureRule FracParams::effective_rule() const {
    QuadratureRule r = rule;
    if (s >= 0.7 && r.depth < kMaxLadderDepth) ++r.depth;
    return r;
}

FracKernel::FracKernel(const Domain& d, const FracParams& p, Extent extent)
    : domain_(d), params_(p), extent_(extent) {
    p.validate();
    layout_ = kernels::PairLayout::build(d, extent, p.effective_rule());
    k_.assign(layout_.offset_r.size(), 0.0);
    const int N = d.dim();
    for (size_t o = 0; o < k_.size(); ++o) {
        if (layout_.offset_class[o] < 0) continue;
        const double r = layout_.offset_r[o];
        k_[o] = std::pow(r, p.s) * p.M.inverse(std::pow(r, N));
    }
}

LadderResult FracKernel::modular_ladder(const std::vector<double>& u, double lambda) const {
    const NFunction& M = params_.M;
    const auto sums = kernels::pair_total(layout_, [&](int i, int j, int o) {
        return M.eval_saturating(lambda * (u[i] - value_at(u, j)) / k_[o]);
    });
    return kernels::summarize_ladder(layout_, sums);
}

namespace {

void check_extent(const GridFunction& u, Extent extent) {
    if (extent == Extent::WithExterior && u.extension != Extension::ZeroOutside)
        throw ValidationError("u.extension", "exterior integrals need a ZeroOutside function");
}

bool trivially_zero(const GridFunction& u, Extent extent) {
    return extent == Extent::Domain ? u.is_constant() : u.sup_norm() == 0.0;
}

}  // namespace

LadderResult frac_modular_ladder(const GridFunction& u, const FracParams& p, double lambda, Extent extent) {
    if (!(lambda > 0.0)) throw RangeError("frac_modular: lambda must be positive");
    check_extent(u, extent);
    if (trivially_zero(u, extent)) {
        LadderResult r;
        r.ladder.assign(p.effective_rule().depth, 0.0);
        return r;
    }
    return FracKernel(u.domain, p, extent).modular_ladder(u.values, lambda);
}

double frac_modular(const GridFunction& u, const FracParams& p, double lambda, Extent extent) {
    const auto r = frac_modular_ladder(u, p, lambda, extent);
    if (std::isinf(r.value))
        throw RangeError("frac_modular: difference quotients leave the trusted range of " + p.M.describe());
    if (!r.converged)
        throw DivergenceError("frac_modular: refinement ladder does not settle (finest bands " +
                              std::to_string(r.ladder[r.ladder.size() - 2]) + ", " + std::to_string(r.value) + ")");
    return r.value;
}

GaugeResult gagliardo_seminorm_detail(const GridFunction& u, const FracKernel& k) {
    check_extent(u, k.extent());
    if (trivially_zero(u, k.extent())) return {};
    // K grows with r, so at this scaling every difference quotient is at most one.
    const auto& L = k.layout();
    double k_min = 0.0;
    for (const auto& d : L.half_offsets) {
        const int o = L.offset_id(d[0], d[1]);
        if (L.offset_class[o] >= 0) {
            k_min = k.kernel(o);
            break;
        }
    }
    const double k_start = k_min / (2.0 * u.sup_norm());
    return luxemburg_gauge([&](double kk) { return k.modular_ladder(u.values, kk).value; }, k_start);
}

GaugeResult gagliardo_seminorm_detail(const GridFunction& u, const FracParams& p, Extent extent) {
    check_extent(u, extent);
    if (trivially_zero(u, extent)) return {};
    return gagliardo_seminorm_detail(u, FracKernel(u.domain, p, extent));
}

double gagliardo_seminorm(const GridFunction& u, const FracParams& p, Extent extent) {
    return gagliardo_seminorm_detail(u, p, extent).value;
}

double frac_norm(const GridFunction& u, const FracParams& p) {
    return luxemburg_norm(u, p.M) + gagliardo_seminorm(u, p);
}

double orlicz_gagliardo_seminorm(const GridFunction& u, const FracParams& p) {
    if (u.is_constant()) return 0.0;
    const FracKernel k(u.domain, p, Extent::Domain);
    const auto lux = gagliardo_seminorm_detail(u, k);
    return amemiya_gauge([&](double kk) { return k.modular_ladder(u.values, kk).value; }, lux.k).value;
}

}  // namespace fos
