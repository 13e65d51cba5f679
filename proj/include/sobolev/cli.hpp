#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sobolev/core.hpp"

namespace sobolev::cli {

inline constexpr const char* kVersion = "sobolev-lab 0.1.0";

// Fully resolved run configuration. Keys of the config file are the long flag names.
struct RunConfig {
    int n = 0;
    double p = 0.0;
    int grid_N = 2048;
    int grid_M = 32;
    std::uint64_t seed = 1;
    std::string out = "out";
    // subcommand parameters
    std::string field = "bubble";  // deficit: bubble | perturbed | anisotropic
    double a = 1.0, b = 1.0, x0 = 0.0;
    double eps = 0.05;
    double i = 16.0;
    double kappa = 0.1;
    double eps0 = 0.1;
    std::size_t samples = 100000;
    int sectors = 4;
    int k = 3;
    std::string family = "anisotropic";  // sharpness: anisotropic | bump
    std::vector<double> eps_list = {1e-4, 3.1622776601683794e-4, 1e-3, 3.1622776601683794e-3, 1e-2,
                                    3.1622776601683794e-2, 1e-1};
    std::vector<double> i_list = {8, 16, 32, 64, 128, 256};
    double x_far = 0.0;  // 0 picks the smallest power of ten meeting the separation condition
    std::size_t count = 200;
    int restarts = 5;

    [[nodiscard]] bool has_dim() const { return n != 0 && p != 0.0; }
};

// Every key accepted by set_key, in report order.
const std::vector<std::string>& config_keys();

// Parses and stores one value; throws INVALID_CONFIG for unknown keys or malformed values.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

// key=value lines; '#' starts a comment; blank lines are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Lossless CSV number format (17 significant digits, scientific).
std::string format_double(double x);

// Writes header + rows with format_double; throws IO_ERROR.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Entry point of the sobolev-lab executable. Exit 0 on success, 1 on usage or validation errors,
// 2 on numerical failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sobolev::cli
