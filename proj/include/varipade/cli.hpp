#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "varipade/optimizer.hpp"

namespace varipade {

/// Either a builtin problem name or a custom integrand with its boundary data.
struct ProblemSource {
    std::string builtin;  // empty for a custom problem
    std::string integrand;
    BoundaryCondition bc;
    std::optional<double> j_exact;
};

/// Contents of a run config file:
///
///   {
///     "problem": {"builtin": "shortest-path"}
///              | {"integrand": "dy^2", "x_a": 0, "x_b": 1, "y_a": 0, "y_b": 0, "j_exact": 0},
///     "structure": "Pade-[5/5]",
///     "train": {"algorithm": "adam", "learning_rate": 0.01, "steps": 20000, "grid_n": 1000,
///               "grid_mode": "midpoint", "seed": 42, "record_every": 10, ...},
///     "output_dir": "out"
///   }
///
/// Every "train" field is optional and defaults to TrainConfig{}.
struct RunConfig {
    ProblemSource problem;
    std::string structure = "Pade-[5/5]";
    TrainConfig train;
    std::string output_dir = ".";
};

/// Throws PreconditionError on schema violations (including both or neither
/// problem form being present).
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

/// Builds the Problem for a source; throws PreconditionError for unknown
/// builtin names (listing the valid ones).
Problem resolve_problem(const ProblemSource& source);

/// Seed default: $VARIPADE_SEED when set and numeric, else 42.
std::uint64_t default_seed();

/// Entry point of the `varipade` tool. Exit codes: 0 success, 1 usage or
/// config error, 2 a training run failed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace varipade
