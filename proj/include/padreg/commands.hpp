#pragma once

// Command implementations behind the `padreg` executable. Each returns a
// process exit code and reports diagnostics on the given error stream.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace padreg {

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 2,
    kExitSolver = 3,
    kExitDimension = 4,
};

struct PhantomOptions {
    std::filesystem::path config;  // dataset config JSON; empty for defaults
    std::filesystem::path out_dir;
    int n_pairs = 1;
    std::uint64_t seed = 0;
};

struct RegisterOptions {
    std::filesystem::path moving;
    std::filesystem::path target;
    double f_moving = 0.0;
    double f_target = 0.0;
    std::optional<std::string> mode;        // overrides the config's model kind
    std::optional<std::string> df_variant;  // overrides the config's variant
    std::filesystem::path solver_config;    // empty for defaults
    std::filesystem::path out_field;
    std::filesystem::path out_stiffness;
    std::filesystem::path out_warped;
    std::filesystem::path moving_mask;      // optional
    std::filesystem::path out_warped_mask;  // written when moving_mask is given
};

struct EvaluateOptions {
    std::filesystem::path field;
    std::filesystem::path truth;  // optional
    std::filesystem::path warped;
    std::filesystem::path target;
    std::filesystem::path mask_warped;  // optional
    std::filesystem::path mask_target;  // optional
    double df = 0.0;
    std::filesystem::path out_json;
};

struct VizOptions {
    std::filesystem::path field;
    std::filesystem::path out_ppm;
    std::optional<double> max_mag;
};

struct BenchOptions {
    std::filesystem::path dataset;
    std::vector<std::string> modes{"physics", "direct"};
    std::vector<std::string> df_variants{"normalized"};
    std::filesystem::path solver_config;  // empty for defaults
    std::filesystem::path out_csv;
    int workers = 1;
};

int cmd_phantom(const PhantomOptions& opt, std::ostream& out, std::ostream& err);
int cmd_register(const RegisterOptions& opt, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_viz(const VizOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);

/// Worker count after applying the PADREG_THREADS cap (at least 1).
int effective_workers(int requested);

/// Column order of the bench CSV.
const std::vector<std::string>& bench_columns();

}  // namespace padreg
