#pragma once

#include <vector>

#include "fos/operator.hpp"

namespace fos {

/// (-Delta)^s_m u = f in Omega, u = 0 outside Omega, in weak form.
struct DirichletProblem {
    Domain dom;
    GridFunction f;
    FracParams params;

    void validate() const;
};

struct SolverConfig {
    double grad_tol = 1e-8;
    int max_iter = 10000;
    double contraction = 0.5;           ///< backtracking factor
    double sufficient_decrease = 1e-4;  ///< Armijo constant
    double p0_probe = 2.0;              ///< exponent used to scale coercivity probes

    void validate() const;
};

struct SolveTrace {
    std::vector<double> energy;    ///< J at each iterate, starting point included
    std::vector<double> residual;  ///< ||grad J||_2 at each iterate
    std::vector<double> step;      ///< accepted step length (0 for the starting point)
};

struct SolveResult {
    GridFunction u;
    SolveTrace trace;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    double delta2 = 0.0;  ///< Delta2 constant of M on the working range
};

/// Energy J(U) = Phi_{s,M}(u_U) - int f u_U over nodal coefficients U at interior nodes,
/// with Phi taken over the halo-extended product (u = 0 outside Omega).
class DirichletSolver {
public:
    explicit DirichletSolver(const DirichletProblem& prob);

    int unknowns() const { return static_cast<int>(interior_.size()); }
    const std::vector<int>& interior_nodes() const { return interior_; }
    const FracOperator& op() const { return op_; }

    GridFunction expand(const std::vector<double>& U) const;
    double energy(const std::vector<double>& U) const;
    /// dJ/dU_k = <A(u_U), e_k> - int f e_k for the nodal hat e_k.
    std::vector<double> gradient(const std::vector<double>& U) const;

    /// Steepest descent with Barzilai-Borwein trial steps and Armijo backtracking, from U0
    /// (zero when empty). Raises ConvergenceError if the step size underflows.
    SolveResult solve(const SolverConfig& cfg, std::vector<double> U0 = {}) const;

private:
    DirichletProblem prob_;
    FracOperator op_;
    std::vector<int> interior_;
    std::vector<double> lattice_w_;  ///< pairing weights at domain nodes
    std::vector<double> domain_w_;   ///< single-integral weights for int f u
};

SolveResult solve(const DirichletProblem& prob, const SolverConfig& cfg);

/// <A(u) - A(v), u - v>; positive for u != v by strict monotonicity.
double monotonicity_probe(const GridFunction& u, const GridFunction& v, const FracParams& p);

struct CoercivityTable {
    std::vector<double> scales;
    std::vector<double> norms;   ///< ||c u||_{s,M}
    std::vector<double> ratios;  ///< <A(c u), c u> / ||c u||_{s,M}
    bool increasing = true;
    double slope = 0.0;     ///< log-log slope of ratios against norms
    double p0_probe = 0.0;  ///< slope + 1
};
CoercivityTable coercivity_probe(const GridFunction& u, const std::vector<double>& scales, const FracParams& p);

}  // namespace fos
