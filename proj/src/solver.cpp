#include "fos/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fos/errors.hpp"
#include "fos/orlicz.hpp"

namespace fos {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double working_delta2(const NFunction& M) {
    const double T = std::min(0.5 * M.domain_cap(), 1e3);
    double c = 0.0;
    try {
        c = M.delta2_constant(1e-6, T);
    } catch (const Error& e) {
        throw PreconditionError(std::string("solve: Delta2 check failed: ") + e.what());
    }
    if (!std::isfinite(c)) throw PreconditionError("solve: M fails Delta2 on the working range");
    return c;
}

}  // namespace

void DirichletProblem::validate() const {
    params.validate();
    if (!(f.domain == dom)) throw ValidationError("f", "right-hand side must live on the problem domain");
    if (static_cast<int>(f.values.size()) != dom.size()) throw ValidationError("f", "size does not match the grid");
    for (double v : f.values)
        if (!std::isfinite(v)) throw ValidationError("f", "right-hand side must be finite");
}

void SolverConfig::validate() const {
    if (!(grad_tol > 0.0)) throw ValidationError("solver.grad_tol", "must be > 0");
    if (max_iter < 1) throw ValidationError("solver.max_iter", "must be >= 1");
    if (!(contraction > 0.0 && contraction < 1.0)) throw ValidationError("solver.contraction", "must lie in (0, 1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
        throw ValidationError("solver.sufficient_decrease", "must lie in (0, 1)");
    if (!(p0_probe > 1.0)) throw ValidationError("solver.p0_probe", "must be > 1");
}

DirichletSolver::DirichletSolver(const DirichletProblem& prob) : prob_(prob), op_(prob.dom, prob.params) {
    prob.validate();
    for (int i = 0; i < prob.dom.size(); ++i)
        if (!prob.dom.on_boundary(i)) interior_.push_back(i);
    const auto& L = op_.kernel().layout();
    lattice_w_.resize(prob.dom.size());
    for (int i = 0; i < prob.dom.size(); ++i) lattice_w_[i] = L.weight[L.omega_to_lattice[i]];
    domain_w_ = node_weights(prob.dom, prob.params.rule.single);
}

GridFunction DirichletSolver::expand(const std::vector<double>& U) const {
    if (static_cast<int>(U.size()) != unknowns())
        throw ValidationError("U", "expected " + std::to_string(unknowns()) + " coefficients");
    GridFunction u = GridFunction::zero(prob_.dom);
    for (size_t k = 0; k < interior_.size(); ++k) u.values[interior_[k]] = U[k];
    return u;
}

double DirichletSolver::energy(const std::vector<double>& U) const {
    const auto u = expand(U);
    double load = 0.0;
    for (size_t k = 0; k < interior_.size(); ++k) load += domain_w_[interior_[k]] * prob_.f.values[interior_[k]] * U[k];
    return op_.energy_modular(u.values) - load;
}

std::vector<double> DirichletSolver::gradient(const std::vector<double>& U) const {
    const auto u = expand(U);
    const auto A = op_.apply(u.values);
    std::vector<double> g(interior_.size());
    for (size_t k = 0; k < interior_.size(); ++k) {
        const int i = interior_[k];
        g[k] = lattice_w_[i] * A[i] - domain_w_[i] * prob_.f.values[i];
    }
    return g;
}

SolveResult DirichletSolver::solve(const SolverConfig& cfg, std::vector<double> U) const {
    cfg.validate();
    SolveResult res;
    res.delta2 = working_delta2(prob_.params.M);
    if (U.empty()) U.assign(unknowns(), 0.0);
    double J = energy(U);
    auto g = gradient(U);
    double gn = norm2(g);
    res.trace.energy.push_back(J);
    res.trace.residual.push_back(gn);
    res.trace.step.push_back(0.0);
    double trial = 1.0;
    std::vector<double> Un(U.size()), g_new;
    while (gn > cfg.grad_tol && res.iterations < cfg.max_iter) {
        double t = trial, Jn = 0.0;
        bool accepted = false;
        g_new.clear();
        for (int ls = 0; ls < 200 && !accepted; ++ls, t *= cfg.contraction) {
            for (size_t k = 0; k < U.size(); ++k) Un[k] = U[k] - t * g[k];
            Jn = energy(Un);
            if (Jn <= J - cfg.sufficient_decrease * t * gn * gn) {
                accepted = true;
                break;
            }
            // Near the minimiser the predicted decrease drops below the rounding of J; a step
            // that keeps J non-increasing and shrinks the gradient is accepted there.
            if (Jn <= J && cfg.sufficient_decrease * t * gn * gn <= 1e-12 * (std::abs(J) + std::abs(Jn))) {
                g_new = gradient(Un);
                if (norm2(g_new) < gn) {
                    accepted = true;
                    break;
                }
                g_new.clear();
            }
        }
        if (!accepted)
            throw ConvergenceError("solve: step size underflow in the line search (residual " + std::to_string(gn) +
                                   ")");
        if (g_new.empty()) g_new = gradient(Un);
        // Barzilai-Borwein trial step for the next iteration.
        double ss = 0.0, sy = 0.0;
        for (size_t k = 0; k < U.size(); ++k) {
            const double sk = Un[k] - U[k], yk = g_new[k] - g[k];
            ss += sk * sk;
            sy += sk * yk;
        }
        trial = sy > 0.0 ? ss / sy : 2.0 * t;
        U.swap(Un);
        g.swap(g_new);
        J = Jn;
        gn = norm2(g);
        ++res.iterations;
        res.trace.energy.push_back(J);
        res.trace.residual.push_back(gn);
        res.trace.step.push_back(t);
    }
    res.converged = gn <= cfg.grad_tol;
    res.residual = gn;
    res.u = expand(U);
    return res;
}

SolveResult solve(const DirichletProblem& prob, const SolverConfig& cfg) { return DirichletSolver(prob).solve(cfg); }

double monotonicity_probe(const GridFunction& u, const GridFunction& v, const FracParams& p) {
    const auto diff = u - v;
    if (u.extension != Extension::ZeroOutside || v.extension != Extension::ZeroOutside)
        throw ValidationError("u.extension", "monotonicity probe needs ZeroOutside functions");
    const FracOperator op(u.domain, p);
    return op.pairing(u.values, diff.values) - op.pairing(v.values, diff.values);
}

CoercivityTable coercivity_probe(const GridFunction& u, const std::vector<double>& scales, const FracParams& p) {
    if (scales.empty()) throw ValidationError("scales", "need at least one scale");
    if (u.sup_norm() == 0.0) throw DegenerateInputError("coercivity_probe: u must be nonzero");
    if (u.extension != Extension::ZeroOutside) throw ValidationError("u.extension", "needs a ZeroOutside function");
    const FracOperator op(u.domain, p);
    CoercivityTable t;
    for (double c : scales) {
        if (!(c > 0.0)) throw ValidationError("scales", "scales must be positive");
        const auto cu = u * c;
        const double nrm = frac_norm(cu, p);
        t.scales.push_back(c);
        t.norms.push_back(nrm);
        t.ratios.push_back(op.pairing(cu.values, cu.values) / nrm);
    }
    for (size_t k = 1; k < t.ratios.size(); ++k)
        if (!(t.ratios[k] > t.ratios[k - 1])) t.increasing = false;
    if (t.ratios.size() >= 2) {
        // Least-squares slope of log ratio against log norm.
        const size_t n = t.ratios.size();
        double mx = 0.0, my = 0.0;
        for (size_t k = 0; k < n; ++k) {
            mx += std::log(t.norms[k]) / n;
            my += std::log(t.ratios[k]) / n;
        }
        double sxy = 0.0, sxx = 0.0;
        for (size_t k = 0; k < n; ++k) {
            const double dx = std::log(t.norms[k]) - mx;
            sxy += dx * (std::log(t.ratios[k]) - my);
            sxx += dx * dx;
        }
        t.slope = sxx > 0.0 ? sxy / sxx : 0.0;
        t.p0_probe = t.slope + 1.0;
    }
    return t;
}

}  // namespace fos
