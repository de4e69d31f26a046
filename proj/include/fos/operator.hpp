#pragma once

#include <vector>

#include "fos/fracspace.hpp"

namespace fos {

/// The fractional M-Laplacian on a fixed grid, with exterior values u = 0 supplied by the halo.
///
/// A(u)(x) = 2 PV sum_y w_y m(|h_{x,y}(u)|) sign(u(x) - u(y)) / K(|x - y|), h = (u(x) - u(y)) / K.
/// With this scaling sum_x w_x v(x) A(u)(x) equals weak_pairing(u, v) on the same grid.
class FracOperator {
public:
    FracOperator(const Domain& d, const FracParams& p);

    const FracKernel& kernel() const { return kernel_; }
    const Domain& domain() const { return kernel_.domain(); }

    /// A(u) at every domain node, finest ladder rung.
    std::vector<double> apply(const std::vector<double>& u) const;
    /// Ladder of A(u) at one node.
    LadderResult apply_ladder(const std::vector<double>& u, int node) const;
    /// sum over the halo-extended product of m(|h(u)|) sign(du) h(v).
    double pairing(const std::vector<double>& u, const std::vector<double>& v) const;
    /// Phi_{s,M}(u) over the halo-extended product; its derivative is `pairing`.
    double energy_modular(const std::vector<double>& u) const;

private:
    FracKernel kernel_;
};

/// A(u) at one interior node (ladder finest rung); u must vanish outside Omega.
double apply_pv(const GridFunction& u, int node, const FracParams& p);
LadderResult apply_pv_ladder(const GridFunction& u, int node, const FracParams& p);
/// A(u) at every node.
std::vector<double> apply_pv_all(const GridFunction& u, const FracParams& p);

/// <A(u), v> as a double integral over the halo-extended product.
double weak_pairing(const GridFunction& u, const GridFunction& v, const FracParams& p);

/// Fractional p-Laplacian 2 PV sum_y w_y |du|^{p-2} du / |x - y|^{N + s p} with the same
/// quadrature policy as apply_pv.
double p_laplacian_reference(const GridFunction& u, int node, double s, double p,
                             const QuadratureRule& rule = QuadratureRule{});

/// Halo doubling until the exterior-extended modular changes by less than rel_tol.
/// The truncated tail decays like halo^{-2s}, so small s needs many doublings.
struct HaloStudy {
    std::vector<double> halos;
    std::vector<double> modulars;
    bool converged = false;
};
HaloStudy halo_convergence(const GridFunction& u, const FracParams& p, double rel_tol = 1e-3, int max_doublings = 8);

}  // namespace fos
