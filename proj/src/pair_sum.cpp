#include "fos/kernels/pair_sum.hpp"

#include <algorithm>

#include <omp.h>

#include "fos/errors.hpp"

namespace fos::kernels {

namespace {

constexpr double kClassSlack = 1e-9;

// Same 1D weights as the single-integral rule, on the lattice rather than the domain grid.
std::vector<double> lattice_weights(const PairLayout& L, const Domain& d, SingleRule rule) {
    Domain lat = d.dim() == 2 ? Domain::box({0.0, 0.0}, {(L.nx - 1) * L.hx, (L.ny - 1) * L.hy}, {L.nx, L.ny}, 0.0)
                              : Domain::interval(0.0, (L.nx - 1) * L.hx, L.nx, 0.0);
    return node_weights(lat, rule);
}

}  // namespace

PairLayout PairLayout::build(const Domain& d, Extent extent, const QuadratureRule& rule) {
    rule.validate();
    PairLayout L;
    L.dim = d.dim();
    L.mx = d.nodes(0);
    L.my = d.nodes(1);
    L.hx = d.spacing(0);
    L.hy = d.dim() == 2 ? d.spacing(1) : 0.0;
    if (extent == Extent::WithExterior) {
        L.ox = d.halo_layers(0);
        L.oy = d.halo_layers(1);
    }
    L.nx = L.mx + 2 * L.ox;
    L.ny = L.my + 2 * L.oy;
    L.depth = rule.depth;
    L.symmetric_pv = rule.diagonal == DiagonalPolicy::SymmetricPV;
    for (int k = 0; k < rule.depth; ++k) L.band_widths.push_back(rule.band * d.h() * std::ldexp(1.0, k));

    L.lattice_to_omega.assign(L.lattice_size(), -1);
    L.omega_to_lattice.resize(L.omega_size());
    for (int j = 0; j < L.my; ++j)
        for (int i = 0; i < L.mx; ++i) {
            const int w = (i + L.ox) + L.nx * (j + L.oy);
            L.lattice_to_omega[w] = i + L.mx * j;
            L.omega_to_lattice[i + L.mx * j] = w;
        }
    L.weight = extent == Extent::WithExterior && (L.ox > 0 || L.oy > 0) ? lattice_weights(L, d, rule.single)
                                                                          : node_weights(d, rule.single);

    L.offset_r.resize(L.lattice_size());
    L.offset_class.resize(L.lattice_size());
    for (int dj = 0; dj < L.ny; ++dj)
        for (int di = 0; di < L.nx; ++di) {
            const int o = di + L.nx * dj;
            L.offset_r[o] = std::hypot(di * L.hx, dj * L.hy);
            L.offset_class[o] = static_cast<signed char>(L.classify(L.offset_r[o]));
        }
    for (int dj = 0; dj < L.ny; ++dj)
        for (int di = -(L.nx - 1); di < L.nx; ++di)
            if (dj > 0 || di > 0) L.half_offsets.push_back({di, dj});
    std::stable_sort(L.half_offsets.begin(), L.half_offsets.end(), [&](const auto& a, const auto& b) {
        return L.offset_r[L.offset_id(a[0], a[1])] < L.offset_r[L.offset_id(b[0], b[1])];
    });
    return L;
}

int PairLayout::classify(double r) const {
    int c = -1;
    for (int k = 0; k < depth; ++k)
        if (r >= band_widths[k] * (1.0 - kClassSlack)) c = k;
    return c;
}

double pairwise_sum(std::span<const double> v) {
    if (v.empty()) return 0.0;
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

LadderSums total_from_rows(const PairLayout& L, std::span<const RowAccum> rows) {
    LadderSums out;
    out.depth = L.depth;
    std::vector<double> terms(rows.size());
    for (int c = 0; c < L.depth; ++c) {
        for (size_t i = 0; i < rows.size(); ++i)
            terms[i] = L.weight[L.omega_to_lattice[i]] * (rows[i].inner[c] + 2.0 * rows[i].outer[c]);
        out.by_class[c] = pairwise_sum(terms);
    }
    return out;
}

LadderResult summarize_ladder(const PairLayout& L, const LadderSums& sums) {
    LadderResult r;
    const int D = L.depth;
    std::vector<double> fine_first(D);
    double acc = 0.0;
    for (int k = D - 1; k >= 0; --k) {
        acc += sums.by_class[k];
        fine_first[k] = acc;
    }
    for (int k = D - 1; k >= 0; --k) {
        r.ladder.push_back(fine_first[k]);
        r.bands.push_back(L.band_widths[k]);
    }
    r.value = fine_first[0];
    r.extrapolated = r.value;
    if (D < 3) return r;
    const double d_prev = fine_first[1] - fine_first[2];
    const double d_last = fine_first[0] - fine_first[1];
    const double scale = std::max(std::abs(r.value), 1e-300);
    if (std::abs(d_last) <= 1e-13 * scale) return r;
    if (d_prev != 0.0) {
        const double q = d_last / d_prev;
        if (q > 0.0 && q < 1.0) {
            r.extrapolated = r.value + d_last * q / (1.0 - q);
            r.rate = -std::log2(q);
        }
    }
    // A finest shell heavier than the previous one by this factor signals a non-integrable
    // diagonal; milder growth is within the discrete shell noise of integrable kernels.
    r.converged = std::abs(d_last) <= 1.25 * std::abs(d_prev);
    return r;
}

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace fos::kernels
