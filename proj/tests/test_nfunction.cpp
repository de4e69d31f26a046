#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fos/errors.hpp"
#include "fos/nfunction.hpp"

using fos::NFunction;

namespace {

NFunction quadratic_half() { return NFunction::power(2.0, 0.5); }

// A sampled density that is not a pure power: m(s) = 2s + s^2 on [0, 8].
NFunction sampled_family() {
    std::vector<double> t, m;
    for (int k = 0; k <= 400; ++k) {
        const double x = 8.0 * k / 400.0;
        t.push_back(x);
        m.push_back(2.0 * x + x * x);
    }
    return NFunction::tabulated_density(t, m);
}

struct Case {
    const char* name;
    NFunction f;
    double t_range;  // random t drawn from [0, t_range]
};

std::vector<Case> builtin_cases() {
    return {
        {"power2_half", quadratic_half(), 5.0},
        {"power1.5", NFunction::power(1.5), 5.0},
        {"power3", NFunction::power(3.0), 4.0},
        {"power_log2", NFunction::power_log(2.0), 4.0},
        {"exp_quad", NFunction::exp_quad(), 2.0},
        {"tabulated", sampled_family(), 4.0},
    };
}

}  // namespace

TEST_CASE("eval examples") {
    CHECK(NFunction::power(2.0).eval(2.0) == doctest::Approx(4.0).epsilon(1e-15));
    for (const auto& c : builtin_cases()) CHECK(c.f.eval(0.0) == 0.0);

    // Tabulated m(s) = s on [0, 4] at coarse knots; oracle: trapezoid at 10x resolution.
    std::vector<double> t, m;
    for (int k = 0; k <= 8; ++k) {
        t.push_back(0.5 * k);
        m.push_back(0.5 * k);
    }
    const NFunction tab = NFunction::tabulated_density(t, m);
    double oracle = 0.0;
    for (int k = 0; k < 60; ++k) {
        const double a = 3.0 * k / 60.0, b = 3.0 * (k + 1) / 60.0;
        oracle += 0.5 * (a + b) * (b - a);
    }
    CHECK(oracle == doctest::Approx(4.5).epsilon(1e-14));
    CHECK(tab.eval(3.0) == doctest::Approx(oracle).epsilon(1e-13));

    CHECK_THROWS_AS(tab.eval(4.5), fos::RangeError);
    CHECK_THROWS_AS(NFunction::power(2.0, 1.0, 10.0).eval(11.0), fos::RangeError);
}

TEST_CASE("construction rejects invalid densities") {
    CHECK_THROWS_AS(NFunction::power(1.0), fos::DegenerateInputError);
    CHECK_THROWS_AS(NFunction::tabulated_density({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}), fos::DegenerateInputError);
    CHECK_THROWS_AS(NFunction::tabulated_density({0.0, 2.0, 1.0}, {0.0, 1.0, 2.0}), fos::DegenerateInputError);
    CHECK_THROWS_AS(NFunction::tabulated_density({0.0, 1.0}, {0.5, 1.0}), fos::DegenerateInputError);
}

TEST_CASE("inverse examples") {
    CHECK(NFunction::power(2.0).inverse(9.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(NFunction::power(2.0).inverse(0.0) == 0.0);
    CHECK(NFunction::power(3.0).inverse(8.0) == doctest::Approx(std::cbrt(8.0)).epsilon(1e-14));
    CHECK_THROWS_AS(NFunction::power(2.0, 1.0, 10.0).inverse(101.0), fos::RangeError);
}

TEST_CASE("inverse after eval is the identity on random points") {
    std::mt19937_64 rng(11);
    for (const auto& c : builtin_cases()) {
        std::uniform_real_distribution<double> dist(0.0, c.t_range);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double t = dist(rng);
            worst = std::max(worst, std::abs(c.f.inverse(c.f.eval(t)) - t) / std::max(1.0, t));
        }
        INFO(c.name);
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("conjugate examples") {
    // M(t) = t^p / p has conjugate s^q / q with 1/p + 1/q = 1.
    for (double p : {1.5, 2.0, 3.0, 4.5}) {
        const double q = p / (p - 1.0);
        const NFunction conj = NFunction::power(p, 1.0 / p).conjugate();
        for (double s : {0.01, 0.3, 1.0, 2.5, 7.0}) {
            INFO("p=" << p << " s=" << s);
            CHECK(conj.eval(s) == doctest::Approx(std::pow(s, q) / q).epsilon(1e-12));
        }
    }
    const NFunction self = quadratic_half().conjugate();
    for (double s : {0.2, 1.0, 3.0}) CHECK(self.eval(s) == doctest::Approx(s * s / 2.0).epsilon(1e-13));

    // Tabulated m(s) = 2s: direct sup over a fine grid gives m_bar(t) = t/2.
    std::vector<double> t, m;
    for (int k = 0; k <= 40; ++k) {
        t.push_back(0.25 * k);
        m.push_back(0.5 * k);
    }
    const NFunction conj = NFunction::tabulated_density(t, m).conjugate();
    for (double x : {0.5, 3.0, 11.0}) {
        double sup = 0.0;
        for (int k = 0; k <= 100000; ++k) {
            const double s = 10.0 * k / 100000.0;
            if (2.0 * s <= x) sup = s;
        }
        CHECK(conj.density(x) == doctest::Approx(sup).epsilon(1e-4));
        CHECK(conj.density(x) == doctest::Approx(x / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("conjugate involution on every builtin family") {
    for (const auto& c : builtin_cases()) {
        const NFunction twice = c.f.conjugate().conjugate();
        const double hi = std::min(c.f.domain_cap(), c.f.family() == fos::Family::ExpQuad ? 10.0 : 100.0);
        double worst = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double t = 1e-3 * std::pow(hi / 1e-3, k / 200.0);
            const double ref = c.f.eval(t);
            worst = std::max(worst, std::abs(twice.eval(t) - ref) / std::max(1.0, ref));
        }
        INFO(c.name << " worst=" << worst);
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("young_gap examples and positivity") {
    CHECK(NFunction::power(2.0).young_gap(0.0, 0.0) == 0.0);
    CHECK(std::abs(quadratic_half().young_gap(3.0, 3.0)) <= 1e-12);
    CHECK(quadratic_half().young_gap(1.0, 3.0) == doctest::Approx(4.5 + 0.5 - 3.0).epsilon(1e-13));

    std::mt19937_64 rng(2024);
    for (const auto& c : builtin_cases()) {
        INFO(c.name);
        std::uniform_real_distribution<double> tdist(0.0, c.t_range);
        std::uniform_real_distribution<double> sdist(0.0, c.f.density(c.t_range));
        double worst = 0.0;
        for (int k = 0; k < 10000; ++k) worst = std::min(worst, c.f.young_gap(sdist(rng), tdist(rng)));
        CHECK(worst >= -1e-12);
        double eq = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double t = tdist(rng);
            eq = std::max(eq, std::abs(c.f.young_gap(c.f.density(t), t)));
        }
        CHECK(eq <= 1e-8);
    }
}

TEST_CASE("delta2 constant") {
    for (double p : {1.5, 2.0, 3.0}) {
        const double k = NFunction::power(p).delta2_constant(0.0, 100.0);
        CHECK(std::abs(k - std::pow(2.0, p)) <= 1e-12);
    }
    const NFunction e = NFunction::exp_quad();
    const double k2 = e.delta2_constant(0.0, 2.0);
    const double k4 = e.delta2_constant(0.0, 4.0);
    const double k8 = e.delta2_constant(0.0, 8.0);
    CHECK(k2 < k4);
    CHECK(k4 < k8);
    CHECK(e.delta2_constant(0.0, 10.0) > 1e100);
    CHECK_THROWS_AS(NFunction::power(2.0, 1.0, 10.0).delta2_constant(0.0, 6.0), fos::RangeError);
}

TEST_CASE("dominance ratio") {
    const NFunction p3 = NFunction::power(3.0), p2 = NFunction::power(2.0);
    CHECK(p3.dominance_ratio(p2, 1.0, 100.0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(p2.dominance_ratio(p2, 1.0, 37.0) == doctest::Approx(1.0).epsilon(1e-15));
    const double tiny = NFunction::exp_quad().dominance_ratio(NFunction::power(4.0), 2.0, 10.0);
    CHECK(tiny == doctest::Approx(std::pow(20.0, 4) / std::expm1(100.0)).epsilon(1e-12));
    CHECK(tiny < 1e-30);
}

TEST_CASE("conjugate growth index equals p for powers") {
    for (double p : {1.5, 2.0, 3.0}) {
        // Closed form: M_bar(m(t)) = (p - 1) t^p for M(t) = t^p / p.
        const double idx = NFunction::power(p, 1.0 / p).conjugate_growth_index(1e-3, 1e3);
        CHECK(std::abs(idx - p) <= 1e-6);
    }
}

TEST_CASE("integrability conditions") {
    // s p < N: finite near zero.
    auto rep = NFunction::power(2.0).check_integrability(2, 0.5);
    CHECK(rep.near_zero_finite);
    // int_0^1 tau^{-3/4} = 4.
    CHECK(rep.near_zero == doctest::Approx(4.0).epsilon(1e-9));
    // Tail oracle: int_1^T tau^{-3/4} = 4 (T^{1/4} - 1).
    CHECK(rep.tail == doctest::Approx(4.0 * (std::pow(1e3, 0.25) - 1.0)).epsilon(1e-10));
    CHECK(rep.tail_growing);

    CHECK_FALSE(NFunction::power(2.0).check_integrability(1, 0.5).near_zero_finite);   // sp = N
    CHECK_FALSE(NFunction::power(3.0).check_integrability(1, 0.5).near_zero_finite);   // sp > N
    CHECK_FALSE(NFunction::power(4.0).check_integrability(2, 0.75).near_zero_finite);  // sp > N
    CHECK(NFunction::power(1.5).check_integrability(1, 0.5).near_zero_finite);         // sp < N
}

TEST_CASE("sobolev conjugate exponent") {
    struct Triple {
        double p;
        int N;
        double s;
    };
    for (const Triple tr : {Triple{2, 2, 0.5}, Triple{1.5, 2, 0.25}, Triple{2, 3, 0.5}}) {
        const double expected = tr.N * tr.p / (tr.N - tr.s * tr.p);
        const NFunction star = NFunction::power(tr.p).sobolev_conjugate(tr.N, tr.s);
        const double slope = fos::loglog_slope(star, 1e-1, 1e2);
        INFO("p=" << tr.p << " N=" << tr.N << " s=" << tr.s << " slope=" << slope);
        CHECK(std::abs(slope - expected) <= 1e-3);
    }
    CHECK_THROWS_AS(NFunction::power(2.0).sobolev_conjugate(1, 0.5), fos::PreconditionError);

    // Power(2), N = 2, s = 1/2: M_*(y) = (y/4)^4 in closed form.
    const NFunction star = NFunction::power(2.0).sobolev_conjugate(2, 0.5);
    for (double y : {0.5, 2.0, 9.0}) CHECK(star.eval(y) == doctest::Approx(std::pow(y / 4.0, 4)).epsilon(1e-6));

    const NFunction tab_star = sampled_family().sobolev_conjugate(2, 0.5);
    for (double t : {0.1, 1.0, 5.0}) CHECK(std::abs(tab_star.inverse(tab_star.eval(t)) - t) <= 1e-10 * std::max(1.0, t));
}

TEST_CASE("young truncation") {
    const auto y2 = NFunction::power(2.0).young_truncation();
    CHECK(y2.alpha == 1.0);
    CHECK(y2.function.eval(0.5) == doctest::Approx(0.5));
    CHECK(y2.function.eval(2.0) == doctest::Approx(4.0));
    CHECK(y2.function.eval(std::nextafter(1.0, 0.0)) == doctest::Approx(1.0));
    CHECK(y2.function.eval(std::nextafter(1.0, 2.0)) == doctest::Approx(1.0));
    CHECK_FALSE(y2.function.is_n_function());

    const auto y3 = NFunction::power(3.0).young_truncation();
    CHECK(y3.alpha == doctest::Approx(1.0));
    CHECK(y3.slope == doctest::Approx(1.0));

    // M(t) = 4 t^2 crosses t at 1/4; bisection against the closed form.
    const auto y4 = NFunction::power(2.0, 4.0).young_truncation();
    CHECK(y4.alpha == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(y4.function.eval(y4.alpha) == doctest::Approx(NFunction::power(2.0, 4.0).eval(y4.alpha)));
}

TEST_CASE("growth estimate K_eps") {
    const NFunction m = NFunction::power(2.0);
    const auto est = m.growth_estimate_keps(1.0, 2, 0.5, 100.0);
    CHECK(est.points == 1000);
    CHECK(std::isfinite(est.k_eps));
    CHECK(est.max_violation <= 0.0);
    // Direct scan oracle of the inequality.
    const NFunction star = m.sobolev_conjugate(2, 0.5);
    for (int k = 1; k <= 1000; ++k) {
        const double t = 100.0 * k / 1000.0;
        const double ms = star.eval(t);
        CHECK(std::pow(ms, 0.75) <= ms / 2.0 + est.k_eps * t + 1e-12 * ms);
    }
    double prev_t0 = 0.0;
    for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const auto e = fos::growth_estimate_keps(star, eps, 2, 0.5, 200.0);
        CHECK(e.t0 >= prev_t0);
        CHECK(e.max_violation <= 0.0);
        prev_t0 = e.t0;
    }
}
