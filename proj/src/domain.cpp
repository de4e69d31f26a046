#include "fos/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fos/errors.hpp"

namespace fos {

namespace {

bool finite_all(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<double> weights_1d(int n, double h, SingleRule rule) {
    std::vector<double> w(n, h);
    if (rule == SingleRule::Trapezoid || n < 4) {
        w.front() = w.back() = 0.5 * h;
        return w;
    }
    // Composite Simpson; an odd interval count closes with the 3/8 rule on the last three.
    std::fill(w.begin(), w.end(), 0.0);
    const int intervals = n - 1;
    const int simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
    for (int k = 0; k < simpson_end; k += 2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if (simpson_end < intervals) {
        const int k = simpson_end;
        w[k] += 3.0 * h / 8.0;
        w[k + 1] += 9.0 * h / 8.0;
        w[k + 2] += 9.0 * h / 8.0;
        w[k + 3] += 3.0 * h / 8.0;
    }
    return w;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double bump_profile(double rho) { return rho < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - rho * rho)) : 0.0; }

struct Placement {
    std::array<double, 2> center{};
    std::array<double, 2> radius{};
    double amplitude = 1.0;
};

// Seed 0 is the canonical centred shape; other seeds draw center, radius, and amplitude
// with the support kept at least one node away from the boundary.
Placement place(const Domain& d, std::uint64_t seed, double canonical_fraction) {
    Placement p;
    double lmin = d.hi(0) - d.lo(0);
    if (d.dim() == 2) lmin = std::min(lmin, d.hi(1) - d.lo(1));
    for (int a = 0; a < 2; ++a) p.center[a] = 0.5 * (d.lo(a) + d.hi(a));
    if (seed == 0) {
        for (int a = 0; a < d.dim(); ++a) p.radius[a] = canonical_fraction * (d.hi(a) - d.lo(a));
        return p;
    }
    std::mt19937_64 rng(seed);
    const double r = (0.15 + 0.30 * uniform01(rng)) * lmin;
    for (int a = 0; a < d.dim(); ++a) {
        p.radius[a] = r;
        const double lo = d.lo(a) + r + d.spacing(a), hi = d.hi(a) - r - d.spacing(a);
        const double t = uniform01(rng);
        if (hi > lo) p.center[a] = lo + t * (hi - lo);
    }
    p.amplitude = 0.5 + 1.5 * uniform01(rng);
    return p;
}

void zero_boundary(GridFunction& g) {
    for (int i = 0; i < g.domain.size(); ++i)
        if (g.domain.on_boundary(i)) g.values[i] = 0.0;
}

}  // namespace

Domain Domain::interval(double a, double b, int nodes, double halo) {
    Domain d;
    d.dim_ = 1;
    d.lo_ = {a, 0.0};
    d.hi_ = {b, 1.0};
    d.n_ = {nodes, 1};
    d.halo_ = halo < 0.0 ? std::abs(b - a) : halo;
    d.validate();
    return d;
}

Domain Domain::box(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> nodes,
                   double halo) {
    Domain d;
    d.dim_ = 2;
    d.lo_ = lo;
    d.hi_ = hi;
    d.n_ = nodes;
    d.halo_ = halo < 0.0 ? std::hypot(hi[0] - lo[0], hi[1] - lo[1]) : halo;
    d.validate();
    return d;
}

void Domain::validate() const {
    for (int a = 0; a < dim_; ++a) {
        if (!std::isfinite(lo_[a]) || !std::isfinite(hi_[a]) || !(hi_[a] > lo_[a]))
            throw ValidationError("domain.bounds", "bounds must be finite with lo < hi");
        if (n_[a] < 8) throw ValidationError("domain.nodes", "need at least 8 nodes per axis");
    }
    if (!std::isfinite(halo_) || halo_ < 0.0) throw ValidationError("domain.halo", "halo must be finite and >= 0");
}

double Domain::h() const { return dim_ == 2 ? std::min(spacing(0), spacing(1)) : spacing(0); }

double Domain::measure() const {
    double m = hi_[0] - lo_[0];
    if (dim_ == 2) m *= hi_[1] - lo_[1];
    return m;
}

double Domain::diameter() const {
    return dim_ == 2 ? std::hypot(hi_[0] - lo_[0], hi_[1] - lo_[1]) : hi_[0] - lo_[0];
}

int Domain::halo_layers(int axis) const {
    if (axis >= dim_) return 0;
    return static_cast<int>(std::ceil(halo_ / spacing(axis) - 1e-9));
}

Domain Domain::with_halo(double halo) const {
    Domain d = *this;
    d.halo_ = halo;
    d.validate();
    return d;
}

std::array<double, 2> Domain::coord(int index) const {
    const auto l = lattice(index);
    std::array<double, 2> c{lo_[0] + l[0] * spacing(0), 0.0};
    if (dim_ == 2) c[1] = lo_[1] + l[1] * spacing(1);
    return c;
}

bool Domain::on_boundary(int index) const {
    const auto l = lattice(index);
    if (l[0] == 0 || l[0] == n_[0] - 1) return true;
    return dim_ == 2 && (l[1] == 0 || l[1] == n_[1] - 1);
}

bool Domain::operator==(const Domain& o) const {
    if (dim_ != o.dim_ || halo_ != o.halo_) return false;
    for (int a = 0; a < dim_; ++a)
        if (lo_[a] != o.lo_[a] || hi_[a] != o.hi_[a] || n_[a] != o.n_[a]) return false;
    return true;
}

GridFunction GridFunction::constant(const Domain& d, double c) {
    return {d, std::vector<double>(d.size(), c), Extension::Undefined};
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::boundary_sup() const {
    double m = 0.0;
    for (int i = 0; i < domain.size(); ++i)
        if (domain.on_boundary(i)) m = std::max(m, std::abs(values[i]));
    return m;
}

bool GridFunction::is_constant(double tol) const {
    if (values.empty()) return true;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo <= tol;
}

void GridFunction::validate() const {
    if (static_cast<int>(values.size()) != domain.size())
        throw ValidationError("values", "expected " + std::to_string(domain.size()) + " values, got " +
                                            std::to_string(values.size()));
    if (!finite_all(values)) throw ValidationError("values", "values must be finite");
    if (extension == Extension::ZeroOutside && boundary_sup() != 0.0)
        throw ValidationError("values", "ZeroOutside function must vanish on the boundary band");
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
    if (!(domain == o.domain)) throw ValidationError("domain", "grid functions live on different domains");
    GridFunction r = *this;
    for (size_t i = 0; i < values.size(); ++i) r.values[i] += o.values[i];
    if (o.extension == Extension::Undefined) r.extension = Extension::Undefined;
    return r;
}

GridFunction GridFunction::operator-(const GridFunction& o) const { return *this + o * -1.0; }

GridFunction GridFunction::operator*(double c) const {
    GridFunction r = *this;
    for (double& v : r.values) v *= c;
    return r;
}

void QuadratureRule::validate() const {
    if (band < 1) throw ValidationError("quadrature.band", "band must be a positive multiple of h");
    if (depth < 2 || depth > kMaxLadderDepth)
        throw ValidationError("quadrature.depth",
                              "depth must lie in [2, " + std::to_string(kMaxLadderDepth) + "]");
}

std::vector<double> node_weights(const Domain& d, SingleRule rule) {
    const auto wx = weights_1d(d.nodes(0), d.spacing(0), rule);
    if (d.dim() == 1) return wx;
    const auto wy = weights_1d(d.nodes(1), d.spacing(1), rule);
    std::vector<double> w(d.size());
    for (int j = 0; j < d.nodes(1); ++j)
        for (int i = 0; i < d.nodes(0); ++i) w[i + d.nodes(0) * j] = wx[i] * wy[j];
    return w;
}

double integrate(const Domain& d, std::span<const double> values, SingleRule rule) {
    if (static_cast<int>(values.size()) != d.size())
        throw ValidationError("values", "size does not match the domain grid");
    const auto w = node_weights(d, rule);
    std::vector<double> terms(values.size());
    for (size_t i = 0; i < values.size(); ++i) terms[i] = w[i] * values[i];
    // Pairwise reduction keeps the result independent of how callers split the work.
    while (terms.size() > 1) {
        std::vector<double> next((terms.size() + 1) / 2);
        for (size_t i = 0; i < next.size(); ++i)
            next[i] = terms[2 * i] + (2 * i + 1 < terms.size() ? terms[2 * i + 1] : 0.0);
        terms.swap(next);
    }
    return terms.empty() ? 0.0 : terms[0];
}

double integrate(const GridFunction& g, SingleRule rule) { return integrate(g.domain, g.values, rule); }

TestFunctionKind parse_test_function_kind(const std::string& name) {
    if (name == "bump") return TestFunctionKind::Bump;
    if (name == "hat") return TestFunctionKind::Hat;
    if (name == "linear") return TestFunctionKind::Linear;
    if (name == "random") return TestFunctionKind::Random;
    throw ValidationError("kind", "unknown test function '" + name + "' (bump, hat, linear, random)");
}

GridFunction make_test_function(TestFunctionKind kind, const Domain& d, std::uint64_t seed) {
    switch (kind) {
        case TestFunctionKind::Bump: {
            const auto p = place(d, seed, 0.45);
            auto g = GridFunction::sample(
                d,
                [&](double x, double y) {
                    double rho2 = (x - p.center[0]) * (x - p.center[0]) / (p.radius[0] * p.radius[0]);
                    if (d.dim() == 2) rho2 += (y - p.center[1]) * (y - p.center[1]) / (p.radius[1] * p.radius[1]);
                    return p.amplitude * bump_profile(std::sqrt(rho2));
                },
                Extension::ZeroOutside);
            zero_boundary(g);
            return g;
        }
        case TestFunctionKind::Hat: {
            const auto p = place(d, seed, 0.4);
            auto g = GridFunction::sample(
                d,
                [&](double x, double y) {
                    double r = std::abs(x - p.center[0]) / p.radius[0];
                    if (d.dim() == 2) r = std::max(r, std::abs(y - p.center[1]) / p.radius[1]);
                    return p.amplitude * std::max(0.0, 1.0 - r);
                },
                Extension::ZeroOutside);
            zero_boundary(g);
            return g;
        }
        case TestFunctionKind::Linear:
            return GridFunction::sample(
                d, [&](double x, double y) { return (x - d.lo(0)) + (d.dim() == 2 ? y - d.lo(1) : 0.0); },
                Extension::Undefined);
        case TestFunctionKind::Random: {
            std::mt19937_64 rng(seed);
            GridFunction g = GridFunction::zero(d);
            for (double& v : g.values) v = 2.0 * uniform01(rng) - 1.0;
            const int nx = d.nodes(0), ny = d.nodes(1);
            std::vector<double> tmp(g.values.size());
            for (int pass = 0; pass < 4; ++pass) {
                for (int axis = 0; axis < d.dim(); ++axis) {
                    const int n = axis == 0 ? nx : ny, stride = axis == 0 ? 1 : nx;
                    for (int i = 0; i < d.size(); ++i) {
                        const int k = axis == 0 ? i % nx : i / nx;
                        const double left = k > 0 ? g.values[i - stride] : 0.0;
                        const double right = k < n - 1 ? g.values[i + stride] : 0.0;
                        tmp[i] = 0.25 * left + 0.5 * g.values[i] + 0.25 * right;
                    }
                    g.values.swap(tmp);
                }
            }
            // Smooth taper to zero at the boundary, then an exact zero band.
            for (int i = 0; i < d.size(); ++i) {
                const auto c = d.coord(i);
                double taper = std::sin(std::numbers::pi * (c[0] - d.lo(0)) / (d.hi(0) - d.lo(0)));
                if (d.dim() == 2) taper *= std::sin(std::numbers::pi * (c[1] - d.lo(1)) / (d.hi(1) - d.lo(1)));
                g.values[i] *= taper * taper;
            }
            zero_boundary(g);
            return g;
        }
    }
    throw ValidationError("kind", "unknown test function kind");
}

GridFunction mollify(const GridFunction& u, double eps) {
    const Domain& d = u.domain;
    if (!(eps >= 2.0 * d.h() * (1.0 - 1e-12)))
        throw ResolutionError("mollify: eps = " + std::to_string(eps) + " is below 2h = " +
                              std::to_string(2.0 * d.h()));
    const int rx = static_cast<int>(std::floor(eps / d.spacing(0)));
    const int ry = d.dim() == 2 ? static_cast<int>(std::floor(eps / d.spacing(1))) : 0;
    struct Tap {
        int dx, dy;
        double w;
    };
    std::vector<Tap> taps;
    double mass = 0.0;
    for (int dy = -ry; dy <= ry; ++dy)
        for (int dx = -rx; dx <= rx; ++dx) {
            const double zx = dx * d.spacing(0) / eps;
            const double zy = d.dim() == 2 ? dy * d.spacing(1) / eps : 0.0;
            const double w = bump_profile(std::hypot(zx, zy));
            if (w > 0.0) {
                taps.push_back({dx, dy, w});
                mass += w;
            }
        }
    for (auto& t : taps) t.w /= mass;

    GridFunction out = u;
    const int nx = d.nodes(0), ny = d.nodes(1);
    const bool renormalize = u.extension == Extension::Undefined;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < d.size(); ++i) {
        const int x = i % nx, y = i / nx;
        double acc = 0.0, covered = 0.0;
        for (const auto& t : taps) {
            const int xx = x + t.dx, yy = y + t.dy;
            if (xx < 0 || xx >= nx || yy < 0 || yy >= ny) continue;
            acc += t.w * u.values[xx + nx * yy];
            covered += t.w;
        }
        out.values[i] = renormalize ? acc / covered : acc;
    }
    // Support can spill onto the boundary band when eps exceeds its distance to the boundary.
    if (out.extension == Extension::ZeroOutside && out.boundary_sup() != 0.0) out.extension = Extension::Undefined;
    return out;
}

}  // namespace fos
