#pragma once

// Pair loops over a uniform lattice, shared by every double integral in the toolkit.
//
// `accumulate_rows` is the OpenMP kernel. `reference_total` and `reference_rows` are naive
// serial loops over ordered node pairs that recompute distances from coordinates; they are
// kept so tests and the benchmark can check the fast path against them.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "fos/domain.hpp"

namespace fos::kernels {

/// Which node set the inner variable y ranges over.
enum class Extent {
    Domain,        ///< y in Omega
    WithExterior,  ///< y in Omega plus the halo, where u = 0
};

/// Lattice geometry, weights, and per-offset distance classes for one (domain, extent, rule).
///
/// The lattice is the domain grid, or the grid extended by the halo layers. Offsets are
/// indexed by |di| + nx |dj|. Class c >= 0 means the pair survives bands up to
/// 2^c band h; class -1 means it lies inside the finest band.
struct PairLayout {
    int dim = 1;
    int nx = 0, ny = 1;   ///< lattice nodes per axis
    int ox = 0, oy = 0;   ///< lattice position of domain node (0, 0)
    int mx = 0, my = 1;   ///< domain nodes per axis
    double hx = 0.0, hy = 0.0;
    int depth = 2;
    bool symmetric_pv = false;
    std::vector<double> band_widths;     ///< finest first
    std::vector<int> lattice_to_omega;   ///< -1 for halo nodes
    std::vector<int> omega_to_lattice;
    std::vector<double> weight;          ///< per lattice node
    std::vector<double> offset_r;
    std::vector<signed char> offset_class;
    std::vector<std::array<int, 2>> half_offsets;  ///< one of each +/- pair, nearest first

    static PairLayout build(const Domain& d, Extent extent, const QuadratureRule& rule);

    int omega_size() const { return mx * my; }
    int lattice_size() const { return nx * ny; }
    int offset_id(int di, int dj) const { return std::abs(di) + nx * std::abs(dj); }
    std::array<double, 2> lattice_coord(int j, const Domain& d) const {
        return {d.lo(0) + (j % nx - ox) * hx, d.lo(1) + (j / nx - oy) * hy};
    }
    /// Class of a distance r against the band widths (same thresholds as the offset table).
    int classify(double r) const;
};

/// Inner sums for one domain node x_i, split by distance class and by where y lies.
struct RowAccum {
    std::array<double, kMaxLadderDepth> inner{};  ///< y in Omega
    std::array<double, kMaxLadderDepth> outer{};  ///< y in the halo
};

/// Per-class totals of the double sum; by_class[c] holds pairs of class exactly c.
struct LadderSums {
    std::array<double, kMaxLadderDepth> by_class{};
    int depth = 2;
};

double pairwise_sum(std::span<const double> v);

/// Sum over partners j of domain node i: weight(j) * f(i, j, offset_id), split by class.
/// f(i, j, o): i a domain index, j a lattice index, o the offset id of the pair.
/// Partners at offsets d and -d are visited together, nearest offsets first.
template <class F>
RowAccum accumulate_row(const PairLayout& L, int i, const F& f) {
    RowAccum acc;
    const int li = L.omega_to_lattice[i];
    const int xi = li % L.nx, yi = li / L.nx;
    for (const auto& d : L.half_offsets) {
        const int o = L.offset_id(d[0], d[1]);
        const int c = L.offset_class[o];
        if (c < 0) continue;
        // Symmetric partners are combined before accumulation (the PV pairing).
        double in = 0.0, out = 0.0;
        for (int sgn = 1; sgn >= -1; sgn -= 2) {
            const int x = xi + sgn * d[0], y = yi + sgn * d[1];
            if (x < 0 || x >= L.nx || y < 0 || y >= L.ny) continue;
            const int j = x + L.nx * y;
            const double v = L.weight[j] * f(i, j, o);
            if (L.lattice_to_omega[j] >= 0)
                in += v;
            else
                out += v;
        }
        acc.inner[c] += in;
        acc.outer[c] += out;
    }
    return acc;
}

/// accumulate_row for every domain node, in parallel.
template <class F>
void accumulate_rows(const PairLayout& L, const F& f, std::span<RowAccum> rows) {
    const int n = L.omega_size();
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) rows[i] = accumulate_row(L, i, f);
}

/// Totals of a symmetric integrand over (Omega x lattice) union (halo x Omega):
/// sum_i w_i (inner_i + 2 outer_i), reduced in a fixed pairwise order.
LadderSums total_from_rows(const PairLayout& L, std::span<const RowAccum> rows);

template <class F>
LadderSums pair_total(const PairLayout& L, const F& f) {
    std::vector<RowAccum> rows(L.omega_size());
    accumulate_rows(L, f, rows);
    return total_from_rows(L, rows);
}

/// Serial reference: every ordered pair (p, q) of lattice nodes with at least one in Omega,
/// distance from coordinates, f called with the domain node first.
template <class F>
LadderSums reference_total(const PairLayout& L, const Domain& d, const F& f) {
    LadderSums out;
    out.depth = L.depth;
    const int n = L.lattice_size();
    for (int p = 0; p < n; ++p) {
        const auto xp = L.lattice_coord(p, d);
        for (int q = 0; q < n; ++q) {
            if (p == q) continue;
            const int ip = L.lattice_to_omega[p], iq = L.lattice_to_omega[q];
            if (ip < 0 && iq < 0) continue;
            const auto xq = L.lattice_coord(q, d);
            const double r = std::hypot(xp[0] - xq[0], xp[1] - xq[1]);
            const int c = L.classify(r);
            if (c < 0) continue;
            const int dx = p % L.nx - q % L.nx, dy = p / L.nx - q / L.nx;
            const int o = L.offset_id(dx, dy);
            const double v = ip >= 0 ? f(ip, q, o) : f(iq, p, o);
            out.by_class[c] += L.weight[p] * L.weight[q] * v;
        }
    }
    return out;
}

/// Serial reference for the row sums, plain loop over all lattice partners.
template <class F>
std::vector<RowAccum> reference_rows(const PairLayout& L, const Domain& d, const F& f) {
    std::vector<RowAccum> rows(L.omega_size());
    for (int i = 0; i < L.omega_size(); ++i) {
        const int p = L.omega_to_lattice[i];
        const auto xp = L.lattice_coord(p, d);
        for (int q = 0; q < L.lattice_size(); ++q) {
            if (q == p) continue;
            const auto xq = L.lattice_coord(q, d);
            const int c = L.classify(std::hypot(xp[0] - xq[0], xp[1] - xq[1]));
            if (c < 0) continue;
            const int o = L.offset_id(p % L.nx - q % L.nx, p / L.nx - q / L.nx);
            const double v = L.weight[q] * f(i, q, o);
            if (L.lattice_to_omega[q] >= 0)
                rows[i].inner[c] += v;
            else
                rows[i].outer[c] += v;
        }
    }
    return rows;
}

/// Ladder estimates from per-class totals: rung k keeps every class >= k.
LadderResult summarize_ladder(const PairLayout& L, const LadderSums& sums);

/// Sets the OpenMP thread count (<= 0 leaves the runtime default).
void set_threads(int n);
int max_threads();

}  // namespace fos::kernels
