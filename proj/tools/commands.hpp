#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace fos::cli {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kDivergence = 3, kNonConvergence = 4 };

/// One CSV file: a header and rows of already formatted cells.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const;
};

/// %.17g
std::string num(double v);

struct RunOutput {
    std::vector<Table> tables;
    json results = json::object();
    json seeds = json::object();
    bool converged = true;  ///< false only for a solve that hit max_iter
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand in memory. Library errors propagate.
RunOutput run(const std::string& subcommand, const Config& c);

/// Where the seed came from, recorded in the manifest.
struct SeedSource {
    std::string origin = "config";  ///< "config" or "FRAC_ORLICZ_SEED"
};

/// Runs, writes the CSV tables and manifest.json into out_dir, and maps errors to exit codes.
/// Diagnostics go to err.
int execute(const std::string& subcommand, const Config& c, const SeedSource& seed, const std::filesystem::path& out_dir,
            std::ostream& err);

}  // namespace fos::cli
