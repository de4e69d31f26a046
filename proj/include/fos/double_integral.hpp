#pragma once

#include "fos/domain.hpp"
#include "fos/kernels/pair_sum.hpp"

namespace fos {

/// Ladder quadrature of int_Omega int_Omega kernel(x, y) dx dy with the diagonal handled by `rule`.
/// kernel(x, y) receives node coordinates as std::array<double, 2>.
template <class K>
LadderResult double_integrate(K&& kernel, const Domain& dom, const QuadratureRule& rule) {
    const auto L = kernels::PairLayout::build(dom, kernels::Extent::Domain, rule);
    const auto sums = kernels::pair_total(L, [&](int i, int j, int) {
        return kernel(dom.coord(i), dom.coord(L.lattice_to_omega[j]));
    });
    return kernels::summarize_ladder(L, sums);
}

}  // namespace fos
