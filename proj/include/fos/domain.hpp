#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fos {

/// A box in R^N (N = 1 or 2) carrying a uniform grid and a halo for zero extension.
///
/// Nodes are stored x-fastest. The halo is the band around the box, of width `halo`
/// (length units), that stands in for R^N \ Omega in exterior integrals.
class Domain {
public:
    /// The unit interval with 8 nodes and no halo.
    Domain() = default;
    static Domain interval(double a, double b, int nodes, double halo = -1.0);
    static Domain box(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> nodes,
                      double halo = -1.0);

    int dim() const { return dim_; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    int nodes(int axis) const { return axis < dim_ ? n_[axis] : 1; }
    double spacing(int axis) const { return (hi_[axis] - lo_[axis]) / (n_[axis] - 1); }
    /// Smallest grid spacing; the unit for diagonal bands.
    double h() const;
    int size() const { return n_[0] * (dim_ == 2 ? n_[1] : 1); }
    double measure() const;
    double diameter() const;
    double halo() const { return halo_; }
    /// Number of halo node layers per side along an axis.
    int halo_layers(int axis) const;
    Domain with_halo(double halo) const;

    std::array<double, 2> coord(int index) const;
    std::array<int, 2> lattice(int index) const { return {index % n_[0], index / n_[0]}; }
    bool on_boundary(int index) const;

    bool operator==(const Domain& o) const;

private:
    void validate() const;

    int dim_ = 1;
    std::array<double, 2> lo_{0.0, 0.0}, hi_{1.0, 1.0};
    std::array<int, 2> n_{8, 1};
    double halo_ = 0.0;
};

enum class Extension { ZeroOutside, Undefined };

/// Samples on the nodes of a Domain: the concrete stand-in for u in W^s L_M(Omega).
struct GridFunction {
    Domain domain;
    std::vector<double> values;
    Extension extension = Extension::Undefined;

    static GridFunction constant(const Domain& d, double c);
    static GridFunction zero(const Domain& d) { return {d, std::vector<double>(d.size(), 0.0), Extension::ZeroOutside}; }
    /// Values sampled from f(x, y) (y ignored in 1D).
    template <class F>
    static GridFunction sample(const Domain& d, F&& f, Extension ext = Extension::Undefined) {
        GridFunction g{d, std::vector<double>(d.size()), ext};
        for (int i = 0; i < d.size(); ++i) {
            const auto c = d.coord(i);
            g.values[i] = f(c[0], c[1]);
        }
        return g;
    }

    double sup_norm() const;
    /// Largest |value| on the boundary band.
    double boundary_sup() const;
    bool is_constant(double tol = 0.0) const;
    /// Throws if values are not finite or a ZeroOutside function is nonzero on the boundary.
    void validate() const;

    GridFunction operator+(const GridFunction& o) const;
    GridFunction operator-(const GridFunction& o) const;
    GridFunction operator*(double c) const;
};

enum class SingleRule { Trapezoid, Simpson };
enum class DiagonalPolicy { ExcludeBand, SymmetricPV };

/// Quadrature policy for single and double integrals on the grid.
struct QuadratureRule {
    SingleRule single = SingleRule::Trapezoid;
    DiagonalPolicy diagonal = DiagonalPolicy::ExcludeBand;
    int band = 1;   ///< finest excluded band width, in units of h
    int depth = 3;  ///< ladder rungs: bands band*h, 2 band*h, ..., 2^{depth-1} band*h

    void validate() const;
};

inline constexpr int kMaxLadderDepth = 6;

/// Estimates of a double integral at decreasing diagonal band widths.
struct LadderResult {
    std::vector<double> ladder;  ///< coarse band first, finest band last
    std::vector<double> bands;   ///< band width of each rung (length units)
    double value = 0.0;          ///< finest rung; the value downstream functionals use
    double extrapolated = 0.0;   ///< Aitken extrapolation of the last three rungs
    double rate = 0.0;           ///< log2 ratio of the last two rung differences
    bool converged = true;
};

/// Per-node quadrature weights of the single-integral rule on the domain grid.
std::vector<double> node_weights(const Domain& d, SingleRule rule);

/// Composite-rule approximation of int_Omega g.
double integrate(const GridFunction& g, SingleRule rule = SingleRule::Trapezoid);
double integrate(const Domain& d, std::span<const double> values, SingleRule rule = SingleRule::Trapezoid);

/// Smooth bump, hat, linear ramp, or smoothed noise; deterministic in (kind, domain, seed).
enum class TestFunctionKind { Bump, Hat, Linear, Random };
GridFunction make_test_function(TestFunctionKind kind, const Domain& d, std::uint64_t seed = 0);
TestFunctionKind parse_test_function_kind(const std::string& name);

/// Convolution with the standard bump mollifier J_eps; needs eps >= 2h.
GridFunction mollify(const GridFunction& u, double eps);

}  // namespace fos
