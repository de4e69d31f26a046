#pragma once

#include <vector>

#include "fos/domain.hpp"
#include "fos/gauge.hpp"
#include "fos/kernels/pair_sum.hpp"
#include "fos/nfunction.hpp"

namespace fos {

using kernels::Extent;

/// Fractional order, N-function, and quadrature for the space W^s L_M.
struct FracParams {
    double s = 0.5;
    NFunction M = NFunction::power(2.0);
    QuadratureRule rule{};

    void validate() const;
    /// The rule actually used: one extra ladder level when s >= 0.7.
    QuadratureRule effective_rule() const;
};

/// Pair layout plus the composite kernel K(r) = r^s M^{-1}(r^N) tabulated per lattice offset.
/// Building one is the expensive setup step; reuse it across modular evaluations.
class FracKernel {
public:
    FracKernel(const Domain& d, const FracParams& p, Extent extent);

    const kernels::PairLayout& layout() const { return layout_; }
    const Domain& domain() const { return domain_; }
    const FracParams& params() const { return params_; }
    Extent extent() const { return extent_; }
    double kernel(int offset) const { return k_[offset]; }
    /// u at a lattice node, 0 on the halo.
    double value_at(const std::vector<double>& u, int lattice) const {
        const int o = layout_.lattice_to_omega[lattice];
        return o >= 0 ? u[o] : 0.0;
    }

    /// Ladder of the modular sum of M(lambda (u(x) - u(y)) / K) over the extent, M saturating.
    LadderResult modular_ladder(const std::vector<double>& u, double lambda) const;

private:
    Domain domain_;
    FracParams params_;
    Extent extent_;
    kernels::PairLayout layout_;
    std::vector<double> k_;
};

/// Phi_{s,M}(lambda u): double integral over Omega x Omega (or the halo-extended product).
/// Raises RangeError if a quotient leaves M's trusted range and DivergenceError if the
/// refinement ladder does not settle.
double frac_modular(const GridFunction& u, const FracParams& p, double lambda, Extent extent = Extent::Domain);
LadderResult frac_modular_ladder(const GridFunction& u, const FracParams& p, double lambda,
                                 Extent extent = Extent::Domain);

/// [u]_{s,M} = inf{lambda > 0 : Phi(u / lambda) <= 1}; 0 for constant u.
double gagliardo_seminorm(const GridFunction& u, const FracParams& p, Extent extent = Extent::Domain);
GaugeResult gagliardo_seminorm_detail(const GridFunction& u, const FracParams& p, Extent extent = Extent::Domain);
GaugeResult gagliardo_seminorm_detail(const GridFunction& u, const FracKernel& k);

/// ||u||_M + [u]_{s,M}.
double frac_norm(const GridFunction& u, const FracParams& p);

/// Amemiya form inf_{k>0} (1 + Phi(k u)) / k of the seminorm.
double orlicz_gagliardo_seminorm(const GridFunction& u, const FracParams& p);

}  // namespace fos
