#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fos/fracspace.hpp"
#include "fos/solver.hpp"

namespace fos::cli {

using nlohmann::json;

struct DomainSpec {
    int dim = 1;
    std::vector<double> lo{0.0};
    std::vector<double> hi{1.0};
    std::vector<int> nodes{65};
    double halo = -1.0;  ///< negative: the domain diameter

    Domain build() const;
};

struct NFunctionSpec {
    std::string family = "power";  ///< power, power_log, exp_quad, tabulated_density
    double p = 2.0;
    double scale = 1.0;
    std::vector<double> t, m;  ///< knots and densities for tabulated_density

    NFunction build() const;
};

/// A grid function: "constant" uses value, the test-function kinds use the run seed and amplitude.
struct FunctionSpec {
    std::string kind = "bump";
    double value = 0.0;
    double amplitude = 1.0;

    GridFunction build(const Domain& d, std::uint64_t seed) const;
};

struct NfunSpec {
    double t_min = 1e-2;
    double t_max = 1e2;
    int points = 33;
    int N = 1;
    std::vector<double> slope_range{0.1, 100.0};
    std::vector<double> delta2_range{1e-3, 1e3};
};

struct VerifySpec {
    std::vector<std::string> suites{"poincare", "embedding", "norm_equivalence", "ws1",
                                    "lipschitz", "mollifier", "compactness"};
    int family_size = 20;
    std::vector<double> eps{0.2, 0.1, 0.05};
    double cutoff_fraction = 0.5;
    NFunctionSpec B{};
};

struct ReduceSpec {
    std::vector<double> p{1.5, 2.0, 3.0};
    std::vector<double> s{0.3, 0.5};
    int functions = 5;
};

struct Config {
    std::uint64_t seed = 0;
    int threads = 0;  ///< 0: OpenMP default
    double s = 0.4;
    DomainSpec domain{};
    NFunctionSpec nfunction{};
    QuadratureRule quadrature{};
    FunctionSpec u{};
    FunctionSpec f{"constant", 1.0, 1.0};
    SolverConfig solver{};
    NfunSpec nfun{};
    VerifySpec verify{};
    ReduceSpec reduce_p{};

    FracParams params() const;
};

/// Parses and validates; unknown keys and bad values raise ValidationError naming the field path.
Config parse_config(const json& j);
/// Canonical form: every field present, keys sorted. parse_config(to_json(c)) == c field-wise.
json to_json(const Config& c);

/// Applies "a.b.c=value" to a JSON object. The value is read as JSON when it parses, else as a string.
void apply_override(json& j, const std::string& assignment);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

const char* to_string(SingleRule r);
const char* to_string(DiagonalPolicy d);

}  // namespace fos::cli
