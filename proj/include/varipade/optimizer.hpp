#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "varipade/loss.hpp"

namespace varipade {

enum class Algorithm { sgd, adam };

struct TrainConfig {
    Algorithm algorithm = Algorithm::adam;
    double learning_rate = 0.01;
    int steps = 20000;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int grid_n = 1000;
    GridMode grid_mode = GridMode::midpoint;
    std::uint64_t seed = 42;
    int record_every = 10;
    // Train the boundary-factor exponents; false pins m_a = m_b = 1.
    bool train_exponents = false;
    // Stop once the loss moved less than early_stop_tol over early_stop_window steps.
    bool early_stop = false;
    double early_stop_tol = 1e-12;
    int early_stop_window = 100;
};

/// Throws PreconditionError for out-of-range settings.
void validate(const TrainConfig& config);

enum class TrainStatus { converged, max_steps, failed };

const char* to_string(TrainStatus status);

struct TrainReport {
    std::vector<std::pair<int, double>> loss_history;  // (step, loss), steps increasing
    ParamVector final_params;                          // family parameters
    BoundaryExponents final_exponents;
    double final_loss = 0.0;
    double j_final = 0.0;  // NaN when the run failed
    double wall_time_ms = 0.0;
    TrainStatus status = TrainStatus::max_steps;
    std::string failure_reason;
};

/// params -= lr * grad
void sgd_step(std::span<double> params, std::span<const double> grad, double learning_rate);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long long t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, const TrainConfig& config);

/// Minimizes the discretized functional starting from init_params(spec, seed)
/// and rho_a = rho_b = 0. Model failures end the run with status `failed`
/// and the history gathered so far.
TrainReport train(const Problem& problem, const FamilySpec& spec, const TrainConfig& config);

}  // namespace varipade
