#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadingsched/scheduler.hpp"

namespace fadingsched::cli {

enum class Subcommand { Solve, Schedule, Scaling, ValidateLemmas, GenData };
enum class OutputFormat { Csv, Json };
enum class SolverKind { Exhaustive, WeightBounded, Greedy };

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,          ///< malformed command line or help requested without a subcommand
    kInvalidConfig = 2,  ///< a value outside its domain
    kGuardRefused = 3,   ///< exhaustive guard or dense-size limit
    kNumerical = 4,      ///< overflow or non-convergence inside a computation
    kIo = 5,             ///< reading the instance or writing results failed
};

struct RunConfig {
    Subcommand subcommand = Subcommand::Schedule;
    std::string dist_spec = "gamma:m=1,omega=1";
    std::vector<std::size_t> n_list{64};
    std::size_t trials = 100;
    double beta = 1.0;
    double noise = 0.1;
    std::uint64_t master_seed = 42;

    SolverKind solver = SolverKind::Exhaustive;
    /// Empty means ceil(log2 n).
    std::optional<std::size_t> w_max;
    std::size_t n_guard = 24;
    std::string instance_path;

    scheduler::HeuristicConfig heuristic{0.1, 0.05, scheduler::Mode::AdaptivePrefix, 1};

    /// Replications for the order-statistic and large-deviation checks.
    std::size_t os_reps = 2000;
    std::size_t ldp_reps = 1000000;

    std::string output_path;
    OutputFormat output_format = OutputFormat::Json;
    /// Optional JSON fit written next to a scaling table.
    std::string fit_path;
};

/// Thrown for --help and for command lines that do not parse; carries the
/// text to show and the exit code to use.
class UsageError : public std::runtime_error {
public:
    UsageError(std::string text, int code) : std::runtime_error(std::move(text)), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

/// Lists every field that failed validation.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Parses argv (without the program name).
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes the configured subcommand. Results go to cfg.output_path
/// (atomically) or to `out` when no path is set; a one-line summary goes to
/// `log`. Returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// parse_config + run with errors mapped to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_atomically(const std::string& path, const std::string& contents);

}  // namespace fadingsched::cli
