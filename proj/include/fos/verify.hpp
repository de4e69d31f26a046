#pragma once

#include <string>
#include <vector>

#include "fos/fracspace.hpp"
#include "fos/orlicz.hpp"

namespace fos {

/// Quadrature and model settings a verify report was computed with.
struct QuadratureRecord {
    double s = 0.0;
    std::string M;
    SingleRule single = SingleRule::Trapezoid;
    DiagonalPolicy diagonal = DiagonalPolicy::ExcludeBand;
    int band = 1;
    int depth = 0;  ///< effective depth (after the s >= 0.7 bump)
    int dim = 1;
    std::vector<int> nodes;
    double halo = 0.0;

    static QuadratureRecord of(const Domain& d, const FracParams& p);
};

struct RatioRow {
    int index = 0;  ///< position in the input family
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
};

struct RatioReport {
    std::vector<RatioRow> rows;
    std::vector<std::string> skipped;
    double max_ratio = 0.0;
    QuadratureRecord quadrature;
};

/// max over the family of ||u||_M / [u]_{s,M}. Constant members are skipped with a note.
RatioReport poincare_ratio(const std::vector<GridFunction>& family, const FracParams& p);

/// max over the family of ||u||_{M_*} / ||u||_{s,M}, M_* the Sobolev conjugate in dimension N.
/// PreconditionError when M_* cannot be built.
RatioReport embedding_ratio(const std::vector<GridFunction>& family, const FracParams& p, int N);

struct NormEquivalence {
    double r1 = 0.0;  ///< [u]_{(s,M)} / [u]_{s,M}
    double r2 = 0.0;  ///< ||u||_{(M)} / ||u||_M
    bool skipped = false;
    std::string note;
};
NormEquivalence norm_equivalence(const GridFunction& u, const FracParams& p);

/// Pieces of C ||u||_{s,M_1} - ||u||_{W^{s,1}} with C = (2 + 2C') ||1||_{M_1 bar}.
struct Ws1Report {
    double gap = 0.0;
    double C = 0.0;
    double C_prime = 0.0;     ///< sup over r > alpha of M_1^{-1}(r^N) / r^N; 0 when no pair is that far
    double one_norm = 0.0;    ///< ||1||_{M_1 bar} on Omega
    double alpha = 0.0;
    /// M(alpha) / alpha. The bound's near-diagonal step uses M_1^{-1}(r^N) = r^N, which needs
    /// slope 1; with slope < 1 the gap can go negative.
    double slope = 0.0;
    double norm_s_m1 = 0.0;   ///< ||u||_{M_1} + [u]_{s,M_1}
    double ws1_norm = 0.0;    ///< int |u| + int int |u(x) - u(y)| / |x - y|^{s+N}
    QuadratureRecord quadrature;
};
Ws1Report ws1_embedding_report(const GridFunction& u, const FracParams& p);
double ws1_embedding(const GridFunction& u, const FracParams& p);

struct LipschitzPair {
    double before = 0.0;  ///< Phi_{s,M}(|u|)
    double after = 0.0;   ///< Phi_{s,M}(min(|u|, cutoff))
};
LipschitzPair lipschitz_composition(const GridFunction& u, double cutoff, const FracParams& p);

struct MollifierRow {
    double eps = 0.0;
    double norm = 0.0;      ///< ||u_eps - u||_M
    double seminorm = 0.0;  ///< [u_eps - u]_{s,M}
};
struct MollifierTable {
    std::vector<MollifierRow> rows;
    std::vector<std::string> skipped;
    QuadratureRecord quadrature;
};
/// Rungs with eps < 2h are skipped with a note.
MollifierTable mollifier_convergence(const GridFunction& u, const FracParams& p, const std::vector<double>& eps_ladder);

struct CompactnessRow {
    double eps = 0.0;
    double diameter = 0.0;       ///< max pairwise ||u_eps^i - u_eps^j||_B
    double approximation = 0.0;  ///< max ||u_eps^i - u^i||_B
};
struct CompactnessReport {
    std::vector<CompactnessRow> rows;
    std::vector<std::string> skipped;
    std::vector<double> family_norms;  ///< ||u||_{s,M} per member
    double bound = 0.0;                ///< max of family_norms
    bool dominated = false;            ///< B grows strictly slower than M_* on the probe range
    std::string precondition_note;
    QuadratureRecord quadrature;
};
CompactnessReport compact_embedding_evidence(const std::vector<GridFunction>& family, const FracParams& p,
                                             const NFunction& B,
                                             const std::vector<double>& eps_ladder = {0.2, 0.1, 0.05});

}  // namespace fos
