// Parallel pair kernel against the serial reference on the fractional modular integrand.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "fos/fracspace.hpp"

using namespace fos;
namespace K = fos::kernels;

namespace {

template <class F>
double best_ms(int reps, F&& f) {
    double best = INFINITY;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

double total(const K::LadderSums& s) {
    double t = 0.0;
    for (int c = 0; c < s.depth; ++c) t += s.by_class[c];
    return t;
}

void run_case(const char* label, const Domain& d, Extent extent, int reps, const std::vector<int>& threads) {
    FracParams p;
    p.s = 0.4;
    p.M = NFunction::power(2.5);
    const FracKernel k(d, p, extent);
    const auto& L = k.layout();
    const auto u = make_test_function(TestFunctionKind::Bump, d, 0);
    auto f = [&](int i, int j, int o) {
        return p.M.eval((u.values[i] - k.value_at(u.values, j)) / k.kernel(o));
    };

    K::LadderSums ref{};
    const double t_ref = best_ms(std::max(1, reps / 2), [&] { ref = K::reference_total(L, d, f); });
    std::printf("%-16s %8d %8s %12.3f %10s %12s\n", label, d.size(), "serial", t_ref, "1.00", "reference");
    double first = 0.0;
    for (int nt : threads) {
        K::set_threads(nt);
        K::LadderSums par{};
        const double t = best_ms(reps, [&] { par = K::pair_total(L, f); });
        const double rel = std::abs(total(par) - total(ref)) / std::abs(total(ref));
        if (nt == threads.front()) first = total(par);
        const bool same = total(par) == first;
        std::printf("%-16s %8d %8d %12.3f %10.2f %12.2e%s\n", label, d.size(), nt, t, t_ref / t, rel,
                    same ? "" : "  (differs across thread counts)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pair kernel benchmark: OpenMP rows against the serial reference"};
    int n1 = 2048, n2 = 41, reps = 5;
    bool quick = false;
    app.add_option("--nodes-1d", n1, "nodes on the 1D grid");
    app.add_option("--nodes-2d", n2, "nodes per axis on the 2D grid");
    app.add_option("--reps", reps, "repetitions, best time kept");
    app.add_flag("--quick", quick, "tiny sizes for a smoke run");
    CLI11_PARSE(app, argc, argv);
    if (quick) n1 = 128, n2 = 13, reps = 1;

    const int hw = K::max_threads();
    std::vector<int> threads;
    for (int t = 1; t < hw; t *= 2) threads.push_back(t);
    threads.push_back(hw);

    std::printf("%-16s %8s %8s %12s %10s %12s\n", "case", "nodes", "threads", "best_ms", "speedup", "rel_diff");
    run_case("1d_domain", Domain::interval(0.0, 1.0, n1), Extent::Domain, reps, threads);
    run_case("1d_exterior", Domain::interval(0.0, 1.0, n1 / 2), Extent::WithExterior, reps, threads);
    run_case("2d_domain", Domain::box({0.0, 0.0}, {1.0, 1.0}, {n2, n2}), Extent::Domain, reps, threads);
    return 0;
}
