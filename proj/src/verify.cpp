#include "fos/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "fos/kernels/pair_sum.hpp"
#include "fos/errors.hpp"

namespace fos {

namespace {

// Runs f(i) for i in [0, n) across threads; the first exception (lowest index) is rethrown.
template <class F>
void parallel_members(int n, F&& f) {
    std::vector<std::exception_ptr> errs(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            f(i);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

void check_family(const std::vector<GridFunction>& family) {
    for (size_t i = 1; i < family.size(); ++i)
        if (!(family[i].domain == family[0].domain))
            throw ValidationError("family[" + std::to_string(i) + "]", "all members must share one domain");
}

struct Member {
    bool skip = false;
    std::string note;
    double num = 0.0, den = 0.0;
};

RatioReport assemble(const std::vector<Member>& m) {
    RatioReport r;
    for (size_t i = 0; i < m.size(); ++i) {
        if (m[i].skip) {
            r.skipped.push_back("family[" + std::to_string(i) + "]: " + m[i].note);
            continue;
        }
        const double q = m[i].num / m[i].den;
        r.rows.push_back({static_cast<int>(i), m[i].num, m[i].den, q});
        r.max_ratio = std::max(r.max_ratio, q);
    }
    return r;
}

GridFunction abs_of(const GridFunction& u) {
    GridFunction a = u;
    for (double& v : a.values) v = std::abs(v);
    return a;
}

// B grows strictly slower than M_*: B(lambda T) / M_*(T) falls along T for every probed lambda.
bool strictly_dominated(const NFunction& m_star, const NFunction& B, std::string& note) {
    for (double lambda : {1.0, 4.0, 16.0}) {
        const double t_hi = std::min(m_star.domain_cap(), B.domain_cap() / lambda);
        const double t_lo = 1.0;
        if (!(t_hi > 1e2 * t_lo)) {
            note = "probe range too short to compare B with M_*";
            return false;
        }
        double first = 0.0, prev = 0.0;
        for (int k = 0; k <= 8; ++k) {
            const double T = t_lo * std::pow(t_hi / t_lo, k / 8.0);
            const double q = m_star.dominance_ratio(B, lambda, T);
            if (k == 0) first = q;
            else if (q > prev * (1.0 + 1e-9)) {
                note = "B(lambda T)/M_*(T) does not decrease for lambda=" + std::to_string(lambda);
                return false;
            }
            prev = q;
        }
        if (!(prev < 0.5 * first)) {
            note = "B(lambda T)/M_*(T) stays bounded away from 0 for lambda=" + std::to_string(lambda) +
                   "; B does not grow strictly slower than M_*";
            return false;
        }
    }
    return true;
}

}  // namespace

QuadratureRecord QuadratureRecord::of(const Domain& d, const FracParams& p) {
    const auto r = p.effective_rule();
    QuadratureRecord q;
    q.s = p.s;
    q.M = p.M.describe();
    q.single = r.single;
    q.diagonal = r.diagonal;
    q.band = r.band;
    q.depth = r.depth;
    q.dim = d.dim();
    for (int a = 0; a < d.dim(); ++a) q.nodes.push_back(d.nodes(a));
    q.halo = d.halo();
    return q;
}

RatioReport poincare_ratio(const std::vector<GridFunction>& family, const FracParams& p) {
    p.validate();
    check_family(family);
    if (family.empty()) return {};
    for (const auto& u : family)
        if (u.extension != Extension::ZeroOutside)
            throw ValidationError("family", "poincare_ratio needs ZeroOutside members");
    const FracKernel k(family[0].domain, p, Extent::Domain);
    std::vector<Member> m(family.size());
    parallel_members(static_cast<int>(family.size()), [&](int i) {
        const auto& u = family[i];
        if (u.is_constant()) {
            m[i] = {true, "constant function, seminorm vanishes", 0.0, 0.0};
            return;
        }
        m[i].num = luxemburg_norm(u, p.M);
        m[i].den = gagliardo_seminorm_detail(u, k).value;
    });
    auto r = assemble(m);
    r.quadrature = QuadratureRecord::of(family[0].domain, p);
    return r;
}

RatioReport embedding_ratio(const std::vector<GridFunction>& family, const FracParams& p, int N) {
    p.validate();
    check_family(family);
    if (family.empty()) return {};
    if (N != family[0].domain.dim()) throw ValidationError("N", "must equal the domain dimension");
    NFunction m_star = p.M;
    try {
        m_star = p.M.sobolev_conjugate(N, p.s);
    } catch (const PreconditionError&) {
        throw;
    } catch (const Error& e) {
        throw PreconditionError(std::string("embedding_ratio: Sobolev conjugate unavailable: ") + e.what());
    }
    const FracKernel k(family[0].domain, p, Extent::Domain);
    std::vector<Member> m(family.size());
    parallel_members(static_cast<int>(family.size()), [&](int i) {
        const auto& u = family[i];
        if (u.sup_norm() == 0.0) {
            m[i] = {true, "zero function", 0.0, 0.0};
            return;
        }
        m[i].num = luxemburg_norm(u, m_star);
        m[i].den = luxemburg_norm(u, p.M) + gagliardo_seminorm_detail(u, k).value;
    });
    auto r = assemble(m);
    r.quadrature = QuadratureRecord::of(family[0].domain, p);
    return r;
}

NormEquivalence norm_equivalence(const GridFunction& u, const FracParams& p) {
    p.validate();
    NormEquivalence r;
    if (u.is_constant()) {
        r.skipped = true;
        r.note = "constant function, seminorm vanishes";
        return r;
    }
    r.r1 = orlicz_gagliardo_seminorm(u, p) / gagliardo_seminorm(u, p);
    r.r2 = amemiya_orlicz_norm(u, p.M) / luxemburg_norm(u, p.M);
    return r;
}

Ws1Report ws1_embedding_report(const GridFunction& u, const FracParams& p) {
    p.validate();
    const Domain& d = u.domain;
    const int N = d.dim();
    const auto yt = p.M.young_truncation();
    const NFunction& M1 = yt.function;
    FracParams p1 = p;
    p1.M = M1;

    Ws1Report r;
    r.quadrature = QuadratureRecord::of(d, p);
    r.alpha = yt.alpha;
    r.slope = yt.slope;
    // M_1^{-1}(y) / y is non-increasing, so the sup over r > alpha sits at r -> alpha.
    if (d.diameter() > yt.alpha) {
        const double y = std::pow(yt.alpha, N);
        r.C_prime = M1.inverse(y) / y;
    }
    r.one_norm = luxemburg_norm(GridFunction::constant(d, 1.0), M1.conjugate());
    r.C = (2.0 + 2.0 * r.C_prime) * r.one_norm;

    if (u.sup_norm() == 0.0) return r;
    r.norm_s_m1 = luxemburg_norm(u, M1) + gagliardo_seminorm(u, p1);
    const double exponent = p.s + N;
    const auto& v = u.values;
    const auto L = kernels::PairLayout::build(d, Extent::Domain, p.effective_rule());
    const auto sums = kernels::pair_total(L, [&](int i, int j, int o) {
        return std::abs(v[i] - v[L.lattice_to_omega[j]]) / std::pow(L.offset_r[o], exponent);
    });
    r.ws1_norm = integrate(abs_of(u), p.rule.single) + kernels::summarize_ladder(L, sums).value;
    r.gap = r.C * r.norm_s_m1 - r.ws1_norm;
    return r;
}

double ws1_embedding(const GridFunction& u, const FracParams& p) { return ws1_embedding_report(u, p).gap; }

LipschitzPair lipschitz_composition(const GridFunction& u, double cutoff, const FracParams& p) {
    if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) throw ValidationError("cutoff", "must be finite and >= 0");
    const auto a = abs_of(u);
    auto c = a;
    for (double& x : c.values) x = std::min(x, cutoff);
    LipschitzPair r;
    r.before = a.is_constant() ? 0.0 : frac_modular_ladder(a, p, 1.0).value;
    r.after = c.is_constant() ? 0.0 : frac_modular_ladder(c, p, 1.0).value;
    return r;
}

MollifierTable mollifier_convergence(const GridFunction& u, const FracParams& p, const std::vector<double>& eps_ladder) {
    p.validate();
    MollifierTable t;
    t.quadrature = QuadratureRecord::of(u.domain, p);
    const double two_h = 2.0 * u.domain.h();
    const bool flat = u.is_constant();
    for (double eps : eps_ladder) {
        if (!(eps > 0.0)) throw ValidationError("eps_ladder", "entries must be positive");
        if (eps < two_h * (1.0 - 1e-12)) {
            t.skipped.push_back("eps=" + std::to_string(eps) + " below 2h=" + std::to_string(two_h));
            continue;
        }
        if (flat) {
            // Unit-mass smoothing fixes constants; skip the round-off of the renormalised taps.
            t.rows.push_back({eps, 0.0, 0.0});
            continue;
        }
        const auto diff = mollify(u, eps) - u;
        t.rows.push_back({eps, luxemburg_norm(diff, p.M), gagliardo_seminorm(diff, p)});
    }
    return t;
}

CompactnessReport compact_embedding_evidence(const std::vector<GridFunction>& family, const FracParams& p,
                                             const NFunction& B, const std::vector<double>& eps_ladder) {
    p.validate();
    check_family(family);
    CompactnessReport r;
    if (family.empty()) return r;
    const Domain& d = family[0].domain;
    r.quadrature = QuadratureRecord::of(d, p);
    const NFunction m_star = p.M.sobolev_conjugate(d.dim(), p.s);
    r.dominated = strictly_dominated(m_star, B, r.precondition_note);

    const int n = static_cast<int>(family.size());
    const FracKernel k(d, p, Extent::Domain);
    r.family_norms.resize(n);
    parallel_members(n, [&](int i) {
        r.family_norms[i] = luxemburg_norm(family[i], p.M) + gagliardo_seminorm_detail(family[i], k).value;
    });
    for (double v : r.family_norms) r.bound = std::max(r.bound, v);
    if (!std::isfinite(r.bound)) {
        r.skipped.push_back("family is not bounded in the W^s L_M norm");
        return r;
    }

    for (double eps : eps_ladder) {
        if (eps < 2.0 * d.h() * (1.0 - 1e-12)) {
            r.skipped.push_back("eps=" + std::to_string(eps) + " below 2h");
            continue;
        }
        std::vector<GridFunction> sm(n, family[0]);
        std::vector<double> approx(n);
        parallel_members(n, [&](int i) {
            sm[i] = mollify(family[i], eps);
            approx[i] = luxemburg_norm(sm[i] - family[i], B);
        });
        std::vector<double> diam(n, 0.0);
        parallel_members(n, [&](int i) {
            for (int j = i + 1; j < n; ++j) diam[i] = std::max(diam[i], luxemburg_norm(sm[i] - sm[j], B));
        });
        r.rows.push_back({eps, *std::max_element(diam.begin(), diam.end()),
                          *std::max_element(approx.begin(), approx.end())});
    }
    return r;
}

}  // namespace fos
