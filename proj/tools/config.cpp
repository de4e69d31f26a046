#include "config.hpp"

#include <cstdio>
#include <set>

#include "fos/errors.hpp"

namespace fos::cli {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string type_name(const json& j) { return j.type_name(); }

// Reads the keys of one JSON object; finish() rejects whatever was not read.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object, got " + type_name(j));
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    std::string at(const std::string& key) const { return join(path_, key); }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) out = as_number(*v, at(key));
    }
    void integer(const std::string& key, int& out) {
        if (const json* v = find(key)) out = as_int(*v, at(key));
    }
    void seed(const std::string& key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (v->is_number_unsigned()) out = v->get<std::uint64_t>();
            else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) out = v->get<std::uint64_t>();
            else throw ValidationError(at(key), "expected a non-negative integer");
        }
    }
    void string(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ValidationError(at(key), "expected a string, got " + type_name(*v));
            out = v->get<std::string>();
        }
    }
    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            const auto p = at(key);
            if (!v->is_array()) throw ValidationError(p, "expected an array, got " + type_name(*v));
            out.clear();
            for (size_t i = 0; i < v->size(); ++i) out.push_back(as_number((*v)[i], p + "[" + std::to_string(i) + "]"));
        }
    }
    void integers(const std::string& key, std::vector<int>& out) {
        if (const json* v = find(key)) {
            const auto p = at(key);
            if (!v->is_array()) throw ValidationError(p, "expected an array, got " + type_name(*v));
            out.clear();
            for (size_t i = 0; i < v->size(); ++i) out.push_back(as_int((*v)[i], p + "[" + std::to_string(i) + "]"));
        }
    }
    void strings(const std::string& key, std::vector<std::string>& out) {
        if (const json* v = find(key)) {
            const auto p = at(key);
            if (!v->is_array()) throw ValidationError(p, "expected an array, got " + type_name(*v));
            out.clear();
            for (size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_string()) throw ValidationError(p + "[" + std::to_string(i) + "]", "expected a string");
                out.push_back((*v)[i].get<std::string>());
            }
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError(at(it.key()), "unknown key");
    }

private:
    static double as_number(const json& v, const std::string& p) {
        if (!v.is_number()) throw ValidationError(p, "expected a number, got " + type_name(v));
        return v.get<double>();
    }
    static int as_int(const json& v, const std::string& p) {
        if (!v.is_number_integer()) throw ValidationError(p, "expected an integer, got " + type_name(v));
        return v.get<int>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

const std::set<std::string> kSuites{"poincare", "embedding", "norm_equivalence", "ws1",
                                    "lipschitz", "mollifier", "compactness"};

void read_nfunction(const json& j, const std::string& path, NFunctionSpec& out) {
    Reader r(j, path);
    r.string("family", out.family);
    const auto& fam = out.family;
    if (fam == "power") {
        r.number("p", out.p);
        r.number("scale", out.scale);
    } else if (fam == "power_log") {
        r.number("p", out.p);
    } else if (fam == "tabulated_density") {
        r.numbers("t", out.t);
        r.numbers("m", out.m);
    } else if (fam != "exp_quad") {
        throw ValidationError(join(path, "family"),
                              "unknown family '" + fam + "' (power, power_log, exp_quad, tabulated_density)");
    }
    r.finish();
    try {
        (void)out.build();
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(path, e.what());
    }
}

void read_function(const json& j, const std::string& path, FunctionSpec& out) {
    Reader r(j, path);
    r.string("kind", out.kind);
    if (out.kind == "constant") {
        r.number("value", out.value);
    } else {
        try {
            (void)parse_test_function_kind(out.kind);
        } catch (const ValidationError& e) {
            throw ValidationError(join(path, "kind"), "unknown kind '" + out.kind + "' (constant, bump, hat, linear, random)");
        }
        r.number("amplitude", out.amplitude);
    }
    r.finish();
}

json nfunction_json(const NFunctionSpec& n) {
    json j{{"family", n.family}};
    if (n.family == "power") {
        j["p"] = n.p;
        j["scale"] = n.scale;
    } else if (n.family == "power_log") {
        j["p"] = n.p;
    } else if (n.family == "tabulated_density") {
        j["t"] = n.t;
        j["m"] = n.m;
    }
    return j;
}

json function_json(const FunctionSpec& f) {
    if (f.kind == "constant") return {{"kind", f.kind}, {"value", f.value}};
    return {{"kind", f.kind}, {"amplitude", f.amplitude}};
}

SingleRule parse_single(const std::string& s, const std::string& path) {
    if (s == "trapezoid") return SingleRule::Trapezoid;
    if (s == "simpson") return SingleRule::Simpson;
    throw ValidationError(path, "unknown rule '" + s + "' (trapezoid, simpson)");
}

DiagonalPolicy parse_diagonal(const std::string& s, const std::string& path) {
    if (s == "exclude_band") return DiagonalPolicy::ExcludeBand;
    if (s == "symmetric_pv") return DiagonalPolicy::SymmetricPV;
    throw ValidationError(path, "unknown policy '" + s + "' (exclude_band, symmetric_pv)");
}

}  // namespace

const char* to_string(SingleRule r) { return r == SingleRule::Trapezoid ? "trapezoid" : "simpson"; }
const char* to_string(DiagonalPolicy d) { return d == DiagonalPolicy::ExcludeBand ? "exclude_band" : "symmetric_pv"; }

Domain DomainSpec::build() const {
    if (dim == 1) return Domain::interval(lo[0], hi[0], nodes[0], halo);
    return Domain::box({lo[0], lo[1]}, {hi[0], hi[1]}, {nodes[0], nodes[1]}, halo);
}

NFunction NFunctionSpec::build() const {
    if (family == "power") return NFunction::power(p, scale);
    if (family == "power_log") return NFunction::power_log(p);
    if (family == "exp_quad") return NFunction::exp_quad();
    return NFunction::tabulated_density(t, m);
}

GridFunction FunctionSpec::build(const Domain& d, std::uint64_t seed) const {
    if (kind == "constant") return GridFunction::constant(d, value);
    return make_test_function(parse_test_function_kind(kind), d, seed) * amplitude;
}

FracParams Config::params() const {
    FracParams p;
    p.s = s;
    p.M = nfunction.build();
    p.rule = quadrature;
    return p;
}

Config parse_config(const json& j) {
    Config c;
    Reader r(j, "");
    r.seed("seed", c.seed);
    r.integer("threads", c.threads);
    if (c.threads < 0) throw ValidationError("threads", "must be >= 0");
    r.number("s", c.s);

    if (const json* d = r.find("domain")) {
        Reader rd(*d, "domain");
        rd.integer("dim", c.domain.dim);
        if (c.domain.dim != 1 && c.domain.dim != 2) throw ValidationError("domain.dim", "must be 1 or 2");
        const size_t n = c.domain.dim;
        c.domain.lo.assign(n, 0.0);
        c.domain.hi.assign(n, 1.0);
        c.domain.nodes.assign(n, 65);
        rd.numbers("lo", c.domain.lo);
        rd.numbers("hi", c.domain.hi);
        rd.integers("nodes", c.domain.nodes);
        rd.number("halo", c.domain.halo);
        rd.finish();
        if (c.domain.lo.size() != n) throw ValidationError("domain.lo", "needs one entry per dimension");
        if (c.domain.hi.size() != n) throw ValidationError("domain.hi", "needs one entry per dimension");
        if (c.domain.nodes.size() != n) throw ValidationError("domain.nodes", "needs one entry per dimension");
    }
    try {
        (void)c.domain.build();
    } catch (const ValidationError& e) {
        throw ValidationError("domain." + e.path(), e.what());
    } catch (const Error& e) {
        throw ValidationError("domain", e.what());
    }

    if (const json* v = r.find("nfunction")) read_nfunction(*v, "nfunction", c.nfunction);
    if (const json* q = r.find("quadrature")) {
        Reader rq(*q, "quadrature");
        std::string single = to_string(c.quadrature.single), diag = to_string(c.quadrature.diagonal);
        rq.string("single", single);
        rq.string("diagonal", diag);
        c.quadrature.single = parse_single(single, "quadrature.single");
        c.quadrature.diagonal = parse_diagonal(diag, "quadrature.diagonal");
        rq.integer("band", c.quadrature.band);
        rq.integer("depth", c.quadrature.depth);
        rq.finish();
    }
    c.params().validate();

    if (const json* v = r.find("u")) read_function(*v, "u", c.u);
    if (const json* v = r.find("f")) read_function(*v, "f", c.f);

    if (const json* v = r.find("solver")) {
        Reader rs(*v, "solver");
        rs.number("grad_tol", c.solver.grad_tol);
        rs.integer("max_iter", c.solver.max_iter);
        rs.number("contraction", c.solver.contraction);
        rs.number("sufficient_decrease", c.solver.sufficient_decrease);
        rs.number("p0_probe", c.solver.p0_probe);
        rs.finish();
    }
    c.solver.validate();

    if (const json* v = r.find("nfun")) {
        Reader rn(*v, "nfun");
        rn.number("t_min", c.nfun.t_min);
        rn.number("t_max", c.nfun.t_max);
        rn.integer("points", c.nfun.points);
        rn.integer("N", c.nfun.N);
        rn.numbers("slope_range", c.nfun.slope_range);
        rn.numbers("delta2_range", c.nfun.delta2_range);
        rn.finish();
    }
    if (!(c.nfun.t_min > 0.0 && c.nfun.t_max > c.nfun.t_min)) throw ValidationError("nfun.t_max", "need 0 < t_min < t_max");
    if (c.nfun.points < 2) throw ValidationError("nfun.points", "must be >= 2");
    if (c.nfun.N < 1) throw ValidationError("nfun.N", "must be >= 1");
    for (const auto* key : {"slope_range", "delta2_range"}) {
        const auto& v = std::string(key) == "slope_range" ? c.nfun.slope_range : c.nfun.delta2_range;
        if (v.size() != 2 || !(v[0] > 0.0 && v[1] > v[0]))
            throw ValidationError(std::string("nfun.") + key, "expected [a, b] with 0 < a < b");
    }

    if (const json* v = r.find("verify")) {
        Reader rv(*v, "verify");
        rv.strings("suites", c.verify.suites);
        rv.integer("family_size", c.verify.family_size);
        rv.numbers("eps", c.verify.eps);
        rv.number("cutoff_fraction", c.verify.cutoff_fraction);
        if (const json* b = rv.find("B")) read_nfunction(*b, "verify.B", c.verify.B);
        rv.finish();
    }
    for (size_t i = 0; i < c.verify.suites.size(); ++i)
        if (!kSuites.count(c.verify.suites[i]))
            throw ValidationError("verify.suites[" + std::to_string(i) + "]", "unknown suite '" + c.verify.suites[i] + "'");
    if (c.verify.family_size < 1) throw ValidationError("verify.family_size", "must be >= 1");
    for (size_t i = 0; i < c.verify.eps.size(); ++i)
        if (!(c.verify.eps[i] > 0.0)) throw ValidationError("verify.eps[" + std::to_string(i) + "]", "must be > 0");
    if (!(c.verify.cutoff_fraction >= 0.0)) throw ValidationError("verify.cutoff_fraction", "must be >= 0");

    if (const json* v = r.find("reduce_p")) {
        Reader rp(*v, "reduce_p");
        rp.numbers("p", c.reduce_p.p);
        rp.numbers("s", c.reduce_p.s);
        rp.integer("functions", c.reduce_p.functions);
        rp.finish();
    }
    for (size_t i = 0; i < c.reduce_p.p.size(); ++i)
        if (!(c.reduce_p.p[i] > 1.0)) throw ValidationError("reduce_p.p[" + std::to_string(i) + "]", "must be > 1");
    for (size_t i = 0; i < c.reduce_p.s.size(); ++i)
        if (!(c.reduce_p.s[i] > 0.0 && c.reduce_p.s[i] < 1.0))
            throw ValidationError("reduce_p.s[" + std::to_string(i) + "]", "must lie in (0, 1)");
    if (c.reduce_p.functions < 1) throw ValidationError("reduce_p.functions", "must be >= 1");

    r.finish();
    return c;
}

json to_json(const Config& c) {
    json j;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["s"] = c.s;
    j["domain"] = {{"dim", c.domain.dim},
                   {"lo", c.domain.lo},
                   {"hi", c.domain.hi},
                   {"nodes", c.domain.nodes},
                   {"halo", c.domain.halo}};
    j["nfunction"] = nfunction_json(c.nfunction);
    j["quadrature"] = {{"single", to_string(c.quadrature.single)},
                       {"diagonal", to_string(c.quadrature.diagonal)},
                       {"band", c.quadrature.band},
                       {"depth", c.quadrature.depth}};
    j["u"] = function_json(c.u);
    j["f"] = function_json(c.f);
    j["solver"] = {{"grad_tol", c.solver.grad_tol},
                   {"max_iter", c.solver.max_iter},
                   {"contraction", c.solver.contraction},
                   {"sufficient_decrease", c.solver.sufficient_decrease},
                   {"p0_probe", c.solver.p0_probe}};
    j["nfun"] = {{"t_min", c.nfun.t_min},
                 {"t_max", c.nfun.t_max},
                 {"points", c.nfun.points},
                 {"N", c.nfun.N},
                 {"slope_range", c.nfun.slope_range},
                 {"delta2_range", c.nfun.delta2_range}};
    j["verify"] = {{"suites", c.verify.suites},
                   {"family_size", c.verify.family_size},
                   {"eps", c.verify.eps},
                   {"cutoff_fraction", c.verify.cutoff_fraction},
                   {"B", nfunction_json(c.verify.B)}};
    j["reduce_p"] = {{"p", c.reduce_p.p}, {"s", c.reduce_p.s}, {"functions", c.reduce_p.functions}};
    return j;
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set", "expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &j;
    size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("--set", "empty path component in '" + key + "'");
        if (!node->is_object()) {
            if (!node->is_null()) throw ValidationError(key.substr(0, start ? start - 1 : 0), "not an object");
            *node = json::object();
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace fos::cli
