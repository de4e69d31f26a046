#pragma once

#include "fos/domain.hpp"
#include "fos/gauge.hpp"
#include "fos/nfunction.hpp"

namespace fos {

/// int_Omega M(|u|). Raises RangeError if some |u(x)| exceeds M's trusted range.
double modular(const GridFunction& u, const NFunction& M, SingleRule rule = SingleRule::Trapezoid);

/// The same integral with M saturating to +inf beyond its trusted range.
double modular_saturating(const GridFunction& u, const NFunction& M, SingleRule rule = SingleRule::Trapezoid);

/// Luxemburg norm inf{lambda > 0 : modular(u / lambda) <= 1}; 0 for u == 0.
double luxemburg_norm(const GridFunction& u, const NFunction& M);
GaugeResult luxemburg_norm_detail(const GridFunction& u, const NFunction& M);

/// Orlicz norm in Amemiya form inf_{k>0} (1 + modular(k u)) / k.
double amemiya_orlicz_norm(const GridFunction& u, const NFunction& M);
GaugeResult amemiya_orlicz_norm_detail(const GridFunction& u, const NFunction& M);

/// 2 ||u||_M ||v||_{M_bar} - int |u v|; non-negative by Hoelder's inequality.
double holder_gap(const GridFunction& u, const GridFunction& v, const NFunction& M);
/// Same, with the conjugate supplied (avoids rebuilding it in sweeps).
double holder_gap(const GridFunction& u, const GridFunction& v, const NFunction& M, const NFunction& M_bar);

/// Constants relating ||.||_M and ||.||_{M_1} for the Young truncation M_1 of M:
/// ||u||_M <= beta ||u||_{M_1} and ||u||_{M_1} <= gamma ||u||_M.
struct TruncationConstants {
    double alpha = 0.0;
    double beta = 0.0;   ///< max{1, alpha / M(alpha)}
    double gamma = 0.0;  ///< M(alpha) |Omega| + 1
};
TruncationConstants truncation_constants(const NFunction& M, const Domain& d);

}  // namespace fos
