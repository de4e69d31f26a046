#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "fos/errors.hpp"
#include "fos/solver.hpp"

using namespace fos;

namespace {

FracParams params(double s, NFunction M) {
    FracParams p;
    p.s = s;
    p.M = M;
    return p;
}

DirichletProblem problem(int nodes, double s, NFunction M, double f = 1.0) {
    const auto d = Domain::interval(0.0, 1.0, nodes);
    return {d, GridFunction::constant(d, f), params(s, M)};
}

std::vector<double> random_vector(int n, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> U(-amp, amp);
    std::vector<double> v(n);
    for (double& x : v) x = U(rng);
    return v;
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

// Quadratic energy sum w_i w_j (u_i - u_j)^2 / r^{2s+1} over the halo-extended product:
// the Hessian is 4 (D - W) on interior nodes. Built from the lattice directly.
Eigen::VectorXd dense_quadratic_solution(const DirichletProblem& prob) {
    const Domain& d = prob.dom;
    const double h = d.spacing(0), s = prob.params.s;
    const int n = d.size(), layers = d.halo_layers(0);
    const int lo = -layers, hi = n - 1 + layers;
    auto weight = [&](int j) { return (j == lo || j == hi) ? 0.5 * h : h; };
    const int m = n - 2;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    for (int a = 1; a < n - 1; ++a) {
        double diag = 0.0;
        for (int j = lo; j <= hi; ++j) {
            if (j == a) continue;
            const double c = weight(a) * weight(j) / std::pow(std::abs(j - a) * h, 2.0 * s + 1.0);
            diag += c;
            if (j >= 1 && j <= n - 2) H(a - 1, j - 1) -= 4.0 * c;
        }
        H(a - 1, a - 1) += 4.0 * diag;
        rhs(a - 1) = weight(a) * prob.f.values[a];
    }
    return H.ldlt().solve(rhs);
}

}  // namespace

TEST_CASE("energy and gradient examples") {
    const auto prob = problem(33, 0.4, NFunction::power(2.5));
    const DirichletSolver S(prob);
    const std::vector<double> zero(S.unknowns(), 0.0);
    CHECK(S.energy(zero) == 0.0);
    const auto g0 = S.gradient(zero);
    for (int k = 0; k < S.unknowns(); ++k) CHECK(g0[k] == doctest::Approx(-prob.dom.spacing(0)));

    const auto free = problem(33, 0.4, NFunction::power(2.5), 0.0);
    const DirichletSolver F(free);
    for (double g : F.gradient(zero)) CHECK(g == 0.0);

    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t) {
        const auto U = random_vector(F.unknowns(), rng, 1.0);
        CHECK(F.energy(U) > 0.0);
    }
    for (int t = 0; t < 20; ++t) {
        const auto U1 = random_vector(S.unknowns(), rng, 1.0), U2 = random_vector(S.unknowns(), rng, 1.0);
        std::vector<double> mid(U1.size());
        for (size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (U1[k] + U2[k]);
        CHECK(S.energy(mid) <= 0.5 * S.energy(U1) + 0.5 * S.energy(U2));
    }
}

TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(2);
    for (const auto& M : {NFunction::power(2.0), NFunction::power(3.0), NFunction::power_log(2.0)}) {
        const auto prob = problem(25, 0.45, M);
        const DirichletSolver S(prob);
        const auto U = random_vector(S.unknowns(), rng, 0.5);
        const auto g = S.gradient(U);
        for (int k : {0, 5, 11, 22}) {
            auto up = U, dn = U;
            const double eps = 1e-5;
            up[k] += eps;
            dn[k] -= eps;
            const double fd = (S.energy(up) - S.energy(dn)) / (2.0 * eps);
            CHECK(std::abs(fd - g[k]) <= 1e-4 * std::abs(g[k]));
        }
    }
}

TEST_CASE("zero load gives the zero solution") {
    const auto prob = problem(33, 0.4, NFunction::power(2.5), 0.0);
    const auto r = solve(prob, SolverConfig{});
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.u.sup_norm() == 0.0);
}

TEST_CASE("quadratic case matches the dense linear solve") {
    for (double s : {0.3, 0.6}) {
        const auto prob = problem(41, s, NFunction::power(2.0));
        const DirichletSolver S(prob);
        const auto r = S.solve(SolverConfig{});
        REQUIRE(r.converged);
        CHECK(r.residual <= 1e-8);
        const auto ref = dense_quadratic_solution(prob);
        std::vector<double> U(S.unknowns()), R(ref.data(), ref.data() + ref.size());
        for (int k = 0; k < S.unknowns(); ++k) U[k] = r.u.values[S.interior_nodes()[k]];
        CHECK(rel_diff(U, R) <= 1e-6);
        for (size_t k = 1; k < r.trace.energy.size(); ++k) CHECK(r.trace.energy[k] <= r.trace.energy[k - 1]);
    }
}

TEST_CASE("p = 3 multi-start agreement") {
    const auto prob = problem(66, 0.4, NFunction::power(3.0));
    const DirichletSolver S(prob);
    REQUIRE(S.unknowns() == 64);
    std::mt19937_64 rng(3);
    const auto a = S.solve(SolverConfig{}, random_vector(64, rng, 0.5));
    const auto b = S.solve(SolverConfig{}, random_vector(64, rng, 0.5));
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(rel_diff(a.u.values, b.u.values) <= 1e-6);
    for (const auto* r : {&a, &b})
        for (size_t k = 1; k < r->trace.energy.size(); ++k) CHECK(r->trace.energy[k] <= r->trace.energy[k - 1]);
}

TEST_CASE("non-convergence is reported") {
    SolverConfig cfg;
    cfg.max_iter = 3;
    const auto r = solve(problem(33, 0.4, NFunction::power(2.5)), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.residual > cfg.grad_tol);
    cfg.contraction = 1.5;
    CHECK_THROWS_AS(solve(problem(33, 0.4, NFunction::power(2.5)), cfg), ValidationError);
}

TEST_CASE("monotonicity probe") {
    const auto d = Domain::interval(0.0, 1.0, 33);
    const auto p = params(0.3, NFunction::power(2.5));
    const auto u = make_test_function(TestFunctionKind::Bump, d, 1);
    CHECK(monotonicity_probe(u, u, p) == 0.0);
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto a = make_test_function(TestFunctionKind::Random, d, 1000 + t);
        const auto b = make_test_function(TestFunctionKind::Bump, d, 2000 + t);
        CHECK(monotonicity_probe(a, b, p) > 0.0);
    }
    auto v = u;
    v.values[10] += 1e-3;
    CHECK(monotonicity_probe(u, v, p) > 0.0);
}

TEST_CASE("coercivity probe") {
    const auto d = Domain::interval(0.0, 1.0, 33);
    const auto u = make_test_function(TestFunctionKind::Bump, d, 5);
    const auto t2 = coercivity_probe(u, {1, 2, 4, 8}, params(0.4, NFunction::power(2.0)));
    CHECK(t2.increasing);
    CHECK(t2.ratios.size() == 4);
    for (double p : {1.5, 2.0, 3.0}) {
        const auto t = coercivity_probe(u, {1, 2, 4, 8, 16}, params(0.4, NFunction::power(p)));
        CHECK(std::abs(t.slope - (p - 1.0)) <= 0.05 * (p - 1.0));
    }
    const auto one = coercivity_probe(u, {3.0}, params(0.4, NFunction::power(2.0)));
    CHECK(one.ratios.size() == 1);
    CHECK_THROWS_AS(coercivity_probe(GridFunction::zero(d), {1.0}, params(0.4, NFunction::power(2.0))),
                    DegenerateInputError);
}

TEST_CASE("mesh refinement changes the solution norm by a shrinking amount") {
    std::vector<double> norms;
    for (int n : {17, 33, 65, 129}) {
        const auto prob = problem(n, 0.4, NFunction::power(2.0));
        const auto r = solve(prob, SolverConfig{});
        REQUIRE(r.converged);
        norms.push_back(frac_norm(r.u, prob.params));
    }
    for (size_t k = 2; k < norms.size(); ++k)
        CHECK(std::abs(norms[k] - norms[k - 1]) < std::abs(norms[k - 1] - norms[k - 2]));
}
