#include "fos/operator.hpp"

#include <cmath>
#include <string>

#include "fos/errors.hpp"

namespace fos {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

LadderResult row_ladder(const kernels::PairLayout& L, const kernels::RowAccum& row, double factor) {
    kernels::LadderSums sums;
    sums.depth = L.depth;
    for (int c = 0; c < L.depth; ++c) sums.by_class[c] = factor * (row.inner[c] + row.outer[c]);
    return kernels::summarize_ladder(L, sums);
}

double row_value(const kernels::PairLayout& L, const kernels::RowAccum& row) {
    double v = 0.0;
    for (int c = L.depth - 1; c >= 0; --c) v += row.inner[c] + row.outer[c];
    return 2.0 * v;
}

void require_zero_outside(const GridFunction& u, const char* name) {
    if (u.extension != Extension::ZeroOutside)
        throw ValidationError(std::string(name) + ".extension", "operator inputs must be ZeroOutside");
}

void require_interior(const Domain& d, int node) {
    if (node < 0 || node >= d.size()) throw RangeError("node index " + std::to_string(node) + " outside the grid");
    if (d.on_boundary(node)) throw PreconditionError("node " + std::to_string(node) + " lies on the boundary band");
}

}  // namespace

FracOperator::FracOperator(const Domain& d, const FracParams& p) : kernel_(d, p, Extent::WithExterior) {}

std::vector<double> FracOperator::apply(const std::vector<double>& u) const {
    const auto& L = kernel_.layout();
    const NFunction& M = kernel_.params().M;
    std::vector<kernels::RowAccum> rows(L.omega_size());
    kernels::accumulate_rows(
        L,
        [&](int i, int j, int o) {
            const double du = u[i] - kernel_.value_at(u, j);
            const double k = kernel_.kernel(o);
            return M.density(std::abs(du) / k) * sign(du) / k;
        },
        rows);
    std::vector<double> out(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) out[i] = row_value(L, rows[i]);
    return out;
}

LadderResult FracOperator::apply_ladder(const std::vector<double>& u, int node) const {
    const auto& L = kernel_.layout();
    const NFunction& M = kernel_.params().M;
    const auto row = kernels::accumulate_row(L, node, [&](int i, int j, int o) {
        const double du = u[i] - kernel_.value_at(u, j);
        const double k = kernel_.kernel(o);
        return M.density(std::abs(du) / k) * sign(du) / k;
    });
    return row_ladder(L, row, 2.0);
}

double FracOperator::pairing(const std::vector<double>& u, const std::vector<double>& v) const {
    const auto& L = kernel_.layout();
    const NFunction& M = kernel_.params().M;
    const auto sums = kernels::pair_total(L, [&](int i, int j, int o) {
        const double du = u[i] - kernel_.value_at(u, j);
        const double dv = v[i] - kernel_.value_at(v, j);
        const double k = kernel_.kernel(o);
        return M.density(std::abs(du) / k) * sign(du) * dv / k;
    });
    return kernels::summarize_ladder(L, sums).value;
}

double FracOperator::energy_modular(const std::vector<double>& u) const { return kernel_.modular_ladder(u, 1.0).value; }

LadderResult apply_pv_ladder(const GridFunction& u, int node, const FracParams& p) {
    require_zero_outside(u, "u");
    require_interior(u.domain, node);
    return FracOperator(u.domain, p).apply_ladder(u.values, node);
}

double apply_pv(const GridFunction& u, int node, const FracParams& p) {
    const auto r = apply_pv_ladder(u, node, p);
    if (!r.converged)
        throw DivergenceError("apply_pv: refinement ladder does not settle at node " + std::to_string(node));
    return r.value;
}

std::vector<double> apply_pv_all(const GridFunction& u, const FracParams& p) {
    require_zero_outside(u, "u");
    return FracOperator(u.domain, p).apply(u.values);
}

double weak_pairing(const GridFunction& u, const GridFunction& v, const FracParams& p) {
    require_zero_outside(u, "u");
    require_zero_outside(v, "v");
    if (!(u.domain == v.domain)) throw ValidationError("v", "u and v must live on the same domain");
    return FracOperator(u.domain, p).pairing(u.values, v.values);
}

double p_laplacian_reference(const GridFunction& u, int node, double s, double p, const QuadratureRule& rule) {
    require_zero_outside(u, "u");
    require_interior(u.domain, node);
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("s", "fractional order must lie in (0, 1)");
    if (!(p >= 1.0)) throw ValidationError("p", "exponent must be >= 1");
    QuadratureRule r = rule;
    if (s >= 0.7 && r.depth < kMaxLadderDepth) ++r.depth;
    const auto L = kernels::PairLayout::build(u.domain, Extent::WithExterior, r);
    const double expo = u.domain.dim() + s * p;
    const auto row = kernels::accumulate_row(L, node, [&](int i, int j, int o) {
        const int jo = L.lattice_to_omega[j];
        const double du = u.values[i] - (jo >= 0 ? u.values[jo] : 0.0);
        if (du == 0.0) return 0.0;
        return std::pow(std::abs(du), p - 1.0) * sign(du) / std::pow(L.offset_r[o], expo);
    });
    return row_ladder(L, row, 2.0).value;
}

HaloStudy halo_convergence(const GridFunction& u, const FracParams& p, double rel_tol, int max_doublings) {
    require_zero_outside(u, "u");
    HaloStudy st;
    double halo = u.domain.halo() > 0.0 ? u.domain.halo() : u.domain.diameter();
    for (int k = 0; k <= max_doublings; ++k, halo *= 2.0) {
        const auto d = u.domain.with_halo(halo);
        GridFunction uh{d, u.values, Extension::ZeroOutside};
        st.halos.push_back(halo);
        st.modulars.push_back(FracOperator(d, p).energy_modular(uh.values));
        const size_t n = st.modulars.size();
        if (n >= 2 && std::abs(st.modulars[n - 1] - st.modulars[n - 2]) <= rel_tol * std::abs(st.modulars[n - 1])) {
            st.converged = true;
            break;
        }
    }
    return st;
}

}  // namespace fos
