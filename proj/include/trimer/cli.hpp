// cli.hpp — command-line front end of the `trimer` tool: grid parsing, CSV and
// JSON serialisation, sweeps, and the cross-validation report.
//
// Exit codes: 0 ok, 1 verification breach, 2 invalid flags, 3 solver failure,
// 4 no steady state, 5 spectrum is not a doublet.

#pragma once

#include "trimer/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace trimer::cli {

enum ExitCode : int {
    kOk = 0,
    kBreach = 1,
    kBadFlags = 2,
    kSolverFailure = 3,
    kNoSteadyState = 4,
    kNotDoublet = 5,
};

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;

    std::vector<double> values() const;
};

// "min:max:points" with points >= 2 and max > min. Throws std::invalid_argument.
GridSpec parse_grid(std::string_view text);
// "min:max". Throws std::invalid_argument.
std::pair<double, double> parse_range(std::string_view text);
// "n_a,n_b,n_c". Throws std::invalid_argument.
std::array<int, 3> parse_cutoffs(std::string_view text);

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

// Writes to a sibling temporary and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct SpectrumSamples {
    std::vector<double> omega;
    std::vector<double> value;
};

// Reads the `omega,s_value` schema. Throws std::invalid_argument on a bad header
// or malformed row.
SpectrumSamples read_spectrum_csv(const std::filesystem::path& path);
std::string spectrum_csv(const std::vector<double>& omega, const std::vector<double>& value);

// Largest distance in the optimal one-to-one matching of two 6-element multisets.
double multiset_distance(const std::array<Complex, 6>& a, const std::array<Complex, 6>& b);

struct VerifyOptions {
    ChainParams params{0.0, 2.0, 0.0, 0.25, 1.0, 1.0};
    std::uint64_t seed = 20240613;
    int random_sets = 50;
    bool fock_oracle = false;
    std::array<int, 3> cutoffs{6, 8, 6};
    bool flip_omega_sign = false;  // test mode: corrupt the numeric dynamical matrix
};

struct CheckResult {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opts);

int run(int argc, char** argv);

}  // namespace trimer::cli
