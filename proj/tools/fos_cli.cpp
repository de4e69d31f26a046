#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fos/errors.hpp"
#include "fos/kernels/pair_sum.hpp"

using namespace fos;
using namespace fos::cli;

namespace {

json read_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ValidationError("--config", std::string("not valid JSON: ") + e.what());
    }
}

std::uint64_t parse_seed(const char* text) {
    const std::string s(text);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError("FRAC_ORLICZ_SEED", "expected a non-negative integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ValidationError("FRAC_ORLICZ_SEED", "out of range: '" + s + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional Orlicz-Sobolev experiment driver"};
    std::string config_path, out_dir = "out";
    std::vector<std::string> sets;
    int threads = -1;
    bool print_config = false;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory for CSV tables and manifest.json");
    app.add_option("--threads", threads, "cap on worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_option("--set", sets, "override a config field, e.g. --set nfunction.p=3")->take_all();
    app.add_flag("--print-config", print_config, "print the validated canonical config and exit");
    app.require_subcommand(1);
    const std::map<std::string, std::string> help{
        {"nfun", "N-function tables: values, conjugate, Sobolev conjugate, Delta2"},
        {"norm", "Luxemburg, Amemiya and Gagliardo norms of the declared u"},
        {"apply", "fractional M-Laplacian of u over the grid"},
        {"solve", "Dirichlet problem: solution and descent trace"},
        {"verify", "inequality and embedding check suites"},
        {"reduce-p", "power N-functions against the classical W^{s,p} seminorm"},
    };
    for (const auto& name : subcommands()) app.add_subcommand(name, help.at(name))->fallthrough();
    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    Config cfg;
    SeedSource seed;
    try {
        json j = config_path.empty() ? json::object() : read_config(config_path);
        for (const auto& s : sets) apply_override(j, s);
        if (const char* env = std::getenv("FRAC_ORLICZ_SEED")) {
            j["seed"] = parse_seed(env);
            seed.origin = "FRAC_ORLICZ_SEED";
        }
        if (threads >= 0) j["threads"] = threads;
        cfg = parse_config(j);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const Error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    }
    if (print_config) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return kOk;
    }
    if (cfg.threads > 0) kernels::set_threads(cfg.threads);
    return execute(sub, cfg, seed, out_dir, std::cerr);
}
