#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varipade/optimizer.hpp"

namespace varipade {

struct BenchmarkCase {
    int id = 0;  // 1-based, matching the order of builtin_cases()
    Problem problem;
    double j_exact_analytic = 0.0;
    std::optional<double> j_reported;  // only when it disagrees with j_exact_analytic
    std::vector<FamilySpec> default_structures;
};

/// The five fixed-endpoint problems:
///   1 shortest-path        sqrt(1 + y'^2)       on [-1, 1],      y(-1) = 0, y(1) = 2
///   2 minimum-drag         y y'^3               on [0, 1],       y(0) = 0,  y(1) = 1
///   3 linear-drift         y'^2 + x y'         on [0, 1],       y(0) = 0,  y(1) = 1/4
///   4 cosine-load          y'^2 - 2y cos(x+pi/2) on [-pi/2, pi/2], zero ends
///   5 harmonic-load        y'^2 - y^2 - 2xy     on [0, 1],       zero ends
std::vector<BenchmarkCase> builtin_cases();

/// Case by name (as above) or by id ("1".."5"); nullopt when unknown.
std::optional<BenchmarkCase> find_case(const std::string& name_or_id);

/// Comma-separated list of the builtin names, for error messages.
std::string builtin_case_names();

/// (j_exact - j_net) / j_exact. Throws DegenerateReference for |j_exact| < 1e-300.
double relative_error(double j_exact, double j_net);

struct MatrixOptions {
    TrainConfig config;
    int seeds = 1;     // seeds config.seed, config.seed + 1, ...
    int parallel = 1;  // concurrent pairs
};

struct MatrixRow {
    int case_id = 0;
    std::string structure;
    std::size_t n_params = 0;
    double j_final = 0.0;  // median over successful seeds, NaN if none succeeded
    double j_min = 0.0;
    double j_exact = 0.0;
    double relative_error = 0.0;
    TrainStatus status = TrainStatus::max_steps;
    std::string failure_reason;
    double wall_time_ms = 0.0;  // summed over seeds
    std::vector<double> seed_j_finals;
    TrainReport curve;  // report of the seed whose j_final is the median
};

struct MatrixReport {
    std::vector<MatrixRow> rows;  // sorted by case, then structure order as given
    bool all_succeeded() const;
    std::vector<const MatrixRow*> rows_for(int case_id) const;
};

/// Trains every (case, structure) pair. Throws PreconditionError for an empty
/// case or structure list; individual training failures are recorded in the rows.
MatrixReport run_matrix(const std::vector<BenchmarkCase>& cases, const std::vector<FamilySpec>& structures,
                        const MatrixOptions& options);

/// Like run_matrix, each case with its own default_structures.
MatrixReport run_default_matrix(const std::vector<BenchmarkCase>& cases, const MatrixOptions& options);

}  // namespace varipade
