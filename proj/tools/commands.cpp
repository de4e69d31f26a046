#include "commands.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>

#include "fos/errors.hpp"
#include "fos/operator.hpp"
#include "fos/solver.hpp"
#include "fos/verify.hpp"

#ifndef FOS_VERSION
#define FOS_VERSION "0.0.0"
#endif

namespace fos::cli {

namespace {

constexpr std::uint64_t kFamilySeedOffset = 100;

json record_json(const QuadratureRecord& q) {
    return {{"s", q.s},         {"M", q.M},         {"single", to_string(q.single)},
            {"diagonal", to_string(q.diagonal)},    {"band", q.band},
            {"depth", q.depth}, {"dim", q.dim},     {"nodes", q.nodes},
            {"halo", q.halo}};
}

std::vector<std::string> coord_header(const Domain& d) {
    return d.dim() == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
}

std::vector<std::string> coord_cells(const Domain& d, int i) {
    const auto c = d.coord(i);
    if (d.dim() == 1) return {num(c[0])};
    return {num(c[0]), num(c[1])};
}

std::vector<GridFunction> family_of(const Config& c, const Domain& d) {
    std::vector<GridFunction> f;
    for (int k = 0; k < c.verify.family_size; ++k)
        f.push_back(make_test_function(TestFunctionKind::Bump, d, c.seed + kFamilySeedOffset + k));
    return f;
}

RunOutput run_nfun(const Config& c) {
    RunOutput out;
    const auto p = c.params();
    const NFunction& M = p.M;
    const NFunction conj = M.conjugate();
    Table t{"nfun", {"t", "M", "m", "M_inverse_of_M", "conjugate_of_m", "young_gap_at_equality"}, {}};
    for (int k = 0; k < c.nfun.points; ++k) {
        const double x = c.nfun.t_min * std::pow(c.nfun.t_max / c.nfun.t_min, static_cast<double>(k) / (c.nfun.points - 1));
        const double Mx = M.eval(x), mx = M.density(x);
        t.rows.push_back({num(x), num(Mx), num(mx), num(M.inverse(Mx)), num(conj.eval(mx)), num(M.young_gap(mx, x))});
    }
    out.tables.push_back(std::move(t));

    out.results["nfunction"] = M.describe();
    out.results["delta2_constant"] = M.delta2_constant(c.nfun.delta2_range[0], c.nfun.delta2_range[1]);
    const int N = c.nfun.N;
    const auto rep = M.check_integrability(N, c.s);
    out.results["integrability"] = {{"N", N},
                                    {"s", c.s},
                                    {"near_zero", rep.near_zero},
                                    {"near_zero_finite", rep.near_zero_finite},
                                    {"levels", rep.levels},
                                    {"tail", rep.tail},
                                    {"tau_max", rep.tau_max},
                                    {"tail_growing", rep.tail_growing}};

    Table st{"sobolev_conjugate", {"t", "M_star", "M_star_inverse"}, {}};
    json sob{{"N", N}, {"s", c.s}};
    if (M.family() == Family::Power) {
        const double pp = M.parameter();
        sob["expected_exponent"] = N > c.s * pp ? json(N * pp / (N - c.s * pp)) : json(nullptr);
    }
    try {
        const NFunction star = M.sobolev_conjugate(N, c.s);
        const double a = c.nfun.slope_range[0], b = c.nfun.slope_range[1];
        sob["available"] = true;
        sob["fitted_exponent"] = loglog_slope(star, a, b);
        sob["slope_range"] = c.nfun.slope_range;
        for (int k = 0; k < c.nfun.points; ++k) {
            const double x = a * std::pow(b / a, static_cast<double>(k) / (c.nfun.points - 1));
            const double v = star.eval(x);
            st.rows.push_back({num(x), num(v), num(star.inverse(v))});
        }
    } catch (const PreconditionError& e) {
        sob["available"] = false;
        sob["reason"] = e.what();
    }
    out.results["sobolev_conjugate"] = sob;
    out.tables.push_back(std::move(st));
    return out;
}

RunOutput run_norm(const Config& c) {
    RunOutput out;
    const auto d = c.domain.build();
    const auto p = c.params();
    const auto u = c.u.build(d, c.seed);
    out.seeds["u"] = c.seed;
    const std::vector<std::pair<std::string, std::function<double()>>> q{
        {"modular", [&] { return modular(u, p.M); }},
        {"luxemburg", [&] { return luxemburg_norm(u, p.M); }},
        {"amemiya", [&] { return amemiya_orlicz_norm(u, p.M); }},
        {"gagliardo_seminorm", [&] { return gagliardo_seminorm(u, p); }},
        {"orlicz_gagliardo_seminorm", [&] { return orlicz_gagliardo_seminorm(u, p); }},
        {"frac_norm", [&] { return frac_norm(u, p); }},
    };
    Table t{"norm", {"quantity", "value"}, {}};
    for (const auto& [name, f] : q) {
        const double v = f();
        t.rows.push_back({name, num(v)});
        out.results[name] = v;
    }
    out.tables.push_back(std::move(t));
    return out;
}

RunOutput run_apply(const Config& c) {
    RunOutput out;
    const auto d = c.domain.build();
    const auto p = c.params();
    const auto u = c.u.build(d, c.seed);
    out.seeds["u"] = c.seed;
    const auto A = apply_pv_all(u, p);
    auto header = coord_header(d);
    header.insert(header.end(), {"u", "Au"});
    Table t{"apply", header, {}};
    double sup = 0.0;
    for (int i = 0; i < d.size(); ++i) {
        auto row = coord_cells(d, i);
        row.push_back(num(u.values[i]));
        row.push_back(num(A[i]));
        t.rows.push_back(std::move(row));
        sup = std::max(sup, std::abs(A[i]));
    }
    out.tables.push_back(std::move(t));
    out.results["sup_abs_Au"] = sup;
    return out;
}

RunOutput run_solve(const Config& c) {
    RunOutput out;
    const auto d = c.domain.build();
    const auto f = c.f.build(d, c.seed + 1);
    out.seeds["f"] = c.seed + 1;
    const DirichletProblem prob{d, f, c.params()};
    const auto r = solve(prob, c.solver);
    auto header = coord_header(d);
    header.push_back("u");
    Table sol{"solution", header, {}};
    for (int i = 0; i < d.size(); ++i) {
        auto row = coord_cells(d, i);
        row.push_back(num(r.u.values[i]));
        sol.rows.push_back(std::move(row));
    }
    Table tr{"trace", {"iteration", "energy", "residual", "step"}, {}};
    for (size_t k = 0; k < r.trace.energy.size(); ++k)
        tr.rows.push_back({std::to_string(k), num(r.trace.energy[k]), num(r.trace.residual[k]), num(r.trace.step[k])});
    out.tables.push_back(std::move(sol));
    out.tables.push_back(std::move(tr));
    bool monotone = true;
    for (size_t k = 1; k < r.trace.energy.size(); ++k)
        if (r.trace.energy[k] > r.trace.energy[k - 1]) monotone = false;
    out.results = {{"converged", r.converged},
                   {"iterations", r.iterations},
                   {"residual", r.residual},
                   {"energy", r.trace.energy.back()},
                   {"energy_non_increasing", monotone},
                   {"delta2_constant", r.delta2}};
    out.converged = r.converged;
    return out;
}

Table ratio_table(const std::string& name, const RatioReport& r, const std::string& num_name, const std::string& den_name) {
    Table t{name, {"index", num_name, den_name, "ratio"}, {}};
    for (const auto& row : r.rows)
        t.rows.push_back({std::to_string(row.index), num(row.numerator), num(row.denominator), num(row.ratio)});
    return t;
}

json ratio_json(const RatioReport& r) {
    return {{"max_ratio", r.max_ratio}, {"evaluated", r.rows.size()}, {"skipped", r.skipped},
            {"quadrature", record_json(r.quadrature)}};
}

RunOutput run_verify(const Config& c) {
    RunOutput out;
    const auto d = c.domain.build();
    const auto p = c.params();
    const auto fam = family_of(c, d);
    out.seeds["family_first"] = c.seed + kFamilySeedOffset;
    out.seeds["family_size"] = c.verify.family_size;
    out.seeds["u"] = c.seed;

    using Suite = std::function<void(Table&, json&)>;
    const std::map<std::string, std::pair<std::vector<std::string>, Suite>> suites{
        {"poincare",
         {{"index", "luxemburg", "seminorm", "ratio"},
          [&](Table& t, json& res) {
              const auto r = poincare_ratio(fam, p);
              t = ratio_table("poincare", r, "luxemburg", "seminorm");
              res = ratio_json(r);
          }}},
        {"embedding",
         {{"index", "sobolev_conjugate_norm", "frac_norm", "ratio"},
          [&](Table& t, json& res) {
              const auto r = embedding_ratio(fam, p, d.dim());
              t = ratio_table("embedding", r, "sobolev_conjugate_norm", "frac_norm");
              res = ratio_json(r);
          }}},
        {"norm_equivalence",
         {{"index", "r1", "r2"},
          [&](Table& t, json& res) {
              double lo1 = INFINITY, hi1 = 0, lo2 = INFINITY, hi2 = 0;
              for (size_t i = 0; i < fam.size(); ++i) {
                  const auto r = norm_equivalence(fam[i], p);
                  if (r.skipped) continue;
                  t.rows.push_back({std::to_string(i), num(r.r1), num(r.r2)});
                  lo1 = std::min(lo1, r.r1), hi1 = std::max(hi1, r.r1);
                  lo2 = std::min(lo2, r.r2), hi2 = std::max(hi2, r.r2);
              }
              res = {{"r1_min", lo1}, {"r1_max", hi1}, {"r2_min", lo2}, {"r2_max", hi2},
                     {"quadrature", record_json(QuadratureRecord::of(d, p))}};
          }}},
        {"ws1",
         {{"index", "norm_s_m1", "ws1_norm", "gap"},
          [&](Table& t, json& res) {
              double worst = INFINITY;
              Ws1Report last;
              for (size_t i = 0; i < fam.size(); ++i) {
                  last = ws1_embedding_report(fam[i], p);
                  t.rows.push_back({std::to_string(i), num(last.norm_s_m1), num(last.ws1_norm), num(last.gap)});
                  worst = std::min(worst, last.gap);
              }
              res = {{"min_gap", worst},       {"C", last.C},         {"C_prime", last.C_prime},
                     {"one_norm", last.one_norm}, {"alpha", last.alpha}, {"slope", last.slope},
                     {"quadrature", record_json(last.quadrature)}};
          }}},
        {"lipschitz",
         {{"index", "cutoff", "before", "after"},
          [&](Table& t, json& res) {
              bool ok = true;
              for (size_t i = 0; i < fam.size(); ++i) {
                  const double cut = c.verify.cutoff_fraction * fam[i].sup_norm();
                  const auto r = lipschitz_composition(fam[i], cut, p);
                  t.rows.push_back({std::to_string(i), num(cut), num(r.before), num(r.after)});
                  if (r.after > r.before) ok = false;
              }
              res = {{"after_le_before", ok}, {"quadrature", record_json(QuadratureRecord::of(d, p))}};
          }}},
        {"mollifier",
         {{"eps", "norm", "seminorm"},
          [&](Table& t, json& res) {
              const auto u = c.u.build(d, c.seed);
              const auto m = mollifier_convergence(u, p, c.verify.eps);
              for (const auto& row : m.rows) t.rows.push_back({num(row.eps), num(row.norm), num(row.seminorm)});
              res = {{"skipped", m.skipped}, {"quadrature", record_json(m.quadrature)}};
          }}},
        {"compactness",
         {{"eps", "diameter", "approximation"},
          [&](Table& t, json& res) {
              const auto r = compact_embedding_evidence(fam, p, c.verify.B.build(), c.verify.eps);
              for (const auto& row : r.rows) t.rows.push_back({num(row.eps), num(row.diameter), num(row.approximation)});
              res = {{"dominated", r.dominated}, {"precondition_note", r.precondition_note}, {"bound", r.bound},
                     {"skipped", r.skipped}, {"quadrature", record_json(r.quadrature)}};
          }}},
    };

    for (const auto& name : c.verify.suites) {
        const auto& [header, fn] = suites.at(name);
        Table t{name, header, {}};
        json res;
        try {
            fn(t, res);
        } catch (const PreconditionError& e) {
            t.rows.clear();
            res = {{"status", "precondition_failed"}, {"reason", e.what()}};
        }
        t.name = name;
        t.header = header;
        out.results[name] = res;
        out.tables.push_back(std::move(t));
    }
    return out;
}

// Classical W^{s,p} seminorm by a plain double loop, pairs closer than the finest band dropped.
double direct_wsp(const GridFunction& u, double s, double p, const QuadratureRule& rule) {
    const Domain& d = u.domain;
    const auto w = node_weights(d, rule.single);
    const int N = d.dim();
    const double cut = rule.band * d.h() * (1.0 - 1e-9);
    double sum = 0.0;
    for (int i = 0; i < d.size(); ++i)
        for (int j = 0; j < d.size(); ++j) {
            const auto x = d.coord(i), y = d.coord(j);
            const double r = std::hypot(x[0] - y[0], x[1] - y[1]);
            if (i == j || r < cut) continue;
            sum += w[i] * w[j] * std::pow(std::abs(u.values[i] - u.values[j]), p) / std::pow(r, s * p + N);
        }
    return std::pow(sum, 1.0 / p);
}

RunOutput run_reduce_p(const Config& c) {
    RunOutput out;
    const auto d = c.domain.build();
    Table t{"reduce_p", {"p", "s", "function", "seminorm", "direct", "rel_diff"}, {}};
    double worst = 0.0;
    for (double pp : c.reduce_p.p)
        for (double s : c.reduce_p.s) {
            FracParams P;
            P.s = s;
            P.M = NFunction::power(pp);
            P.rule = c.quadrature;
            for (int k = 0; k < c.reduce_p.functions; ++k) {
                const auto u = make_test_function(TestFunctionKind::Bump, d, c.seed + 1 + k);
                const double a = gagliardo_seminorm(u, P), b = direct_wsp(u, s, pp, c.quadrature);
                const double rel = std::abs(a - b) / b;
                worst = std::max(worst, rel);
                t.rows.push_back({num(pp), num(s), std::to_string(k), num(a), num(b), num(rel)});
            }
        }
    out.seeds["functions_first"] = c.seed + 1;
    out.results = {{"max_rel_diff", worst}, {"cases", t.rows.size()}};
    out.tables.push_back(std::move(t));
    return out;
}

json base_manifest(const std::string& sub, const Config& c, const SeedSource& seed) {
    const json cfg = to_json(c);
    const auto p = c.params();
    json m;
    m["tool"] = "fos_cli";
    m["version"] = FOS_VERSION;
    m["subcommand"] = sub;
    m["config_hash"] = hex64(fnv1a(cfg.dump()));
    m["hash_algorithm"] = "fnv1a64 of the canonical config JSON";
    m["seed"] = {{"base", c.seed}, {"origin", seed.origin}};
    m["quadrature"] = record_json(QuadratureRecord::of(c.domain.build(), p));
    m["config"] = cfg;
    return m;
}

}  // namespace

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string Table::csv() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t k = 0; k < cells.size(); ++k) {
            if (k) s += ',';
            s += cells[k];
        }
        s += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"nfun", "norm", "apply", "solve", "verify", "reduce-p"};
    return names;
}

RunOutput run(const std::string& sub, const Config& c) {
    if (sub == "nfun") return run_nfun(c);
    if (sub == "norm") return run_norm(c);
    if (sub == "apply") return run_apply(c);
    if (sub == "solve") return run_solve(c);
    if (sub == "verify") return run_verify(c);
    if (sub == "reduce-p") return run_reduce_p(c);
    throw ValidationError("subcommand", "unknown subcommand '" + sub + "'");
}

int execute(const std::string& sub, const Config& c, const SeedSource& seed, const std::filesystem::path& out_dir,
            std::ostream& err) {
    namespace fs = std::filesystem;
    json manifest = base_manifest(sub, c, seed);
    int code = kOk;
    RunOutput out;
    try {
        out = run(sub, c);
        if (!out.converged) code = kNonConvergence;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        manifest["error"] = {{"type", "validation"}, {"path", e.path()}, {"message", e.what()}};
        code = kValidation;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << "\n";
        manifest["error"] = {{"type", "precondition"}, {"message", e.what()}};
        code = kValidation;
    } catch (const DivergenceError& e) {
        err << "numerical divergence: " << e.what() << "\n";
        manifest["error"] = {{"type", "divergence"}, {"message", e.what()}};
        code = kDivergence;
    } catch (const RangeError& e) {
        err << "numerical divergence (range): " << e.what() << "\n";
        manifest["error"] = {{"type", "range"}, {"message", e.what()}};
        code = kDivergence;
    } catch (const ConvergenceError& e) {
        err << "non-convergence: " << e.what() << "\n";
        manifest["error"] = {{"type", "convergence"}, {"message", e.what()}};
        code = kNonConvergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        manifest["error"] = {{"type", "degenerate"}, {"message", e.what()}};
        code = kValidation;
    }

    static const char* status[] = {"ok", "failure", "validation_error", "divergence", "nonconvergence"};
    manifest["status"] = status[code];
    manifest["exit_code"] = code;
    manifest["results"] = out.results;
    json seeds = out.seeds;
    seeds["base"] = c.seed;
    manifest["seeds"] = seeds;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        err << "cannot create " << out_dir.string() << ": " << ec.message() << "\n";
        return kFailure;
    }
    json artifacts = json::array();
    for (const auto& t : out.tables) {
        const auto path = out_dir / (t.name + ".csv");
        std::ofstream f(path, std::ios::binary);
        f << t.csv();
        if (!f) {
            err << "cannot write " << path.string() << ": " << std::strerror(errno) << "\n";
            return kFailure;
        }
        artifacts.push_back(t.name + ".csv");
    }
    manifest["artifacts"] = artifacts;
    const auto mpath = out_dir / "manifest.json";
    std::ofstream mf(mpath, std::ios::binary);
    mf << manifest.dump(2) << "\n";
    if (!mf) {
        err << "cannot write " << mpath.string() << ": " << std::strerror(errno) << "\n";
        return kFailure;
    }
    return code;
}

}  // namespace fos::cli
