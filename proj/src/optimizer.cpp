#include "varipade/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

#include "varipade/error.hpp"

namespace varipade {

void validate(const TrainConfig& c) {
    if (!(c.learning_rate > 0.0)) throw PreconditionError("learning rate must be positive");
    if (c.steps < 0) throw PreconditionError("step count must be non-negative");
    if (!(c.adam_beta1 > 0.0 && c.adam_beta1 < 1.0)) throw PreconditionError("adam beta1 must lie in (0, 1)");
    if (!(c.adam_beta2 > 0.0 && c.adam_beta2 < 1.0)) throw PreconditionError("adam beta2 must lie in (0, 1)");
    if (!(c.adam_eps > 0.0)) throw PreconditionError("adam eps must be positive");
    if (c.grid_n < 1) throw PreconditionError("grid size must be positive");
    if (c.record_every < 1) throw PreconditionError("record_every must be positive");
    if (c.early_stop && c.early_stop_window < 1) throw PreconditionError("early stop window must be positive");
}

const char* to_string(TrainStatus status) {
    switch (status) {
        case TrainStatus::converged: return "converged";
        case TrainStatus::max_steps: return "max_steps";
        case TrainStatus::failed: return "failed";
    }
    return "unknown";
}

void sgd_step(std::span<double> params, std::span<const double> grad, double learning_rate) {
    if (params.size() != grad.size()) throw PreconditionError("sgd_step: parameter and gradient sizes differ");
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= learning_rate * grad[k];
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, const TrainConfig& config) {
    if (params.size() != grad.size() || state.m.size() != params.size())
        throw PreconditionError("adam_step: state, parameter and gradient sizes differ");
    ++state.t;
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        state.m[k] = b1 * state.m[k] + (1.0 - b1) * grad[k];
        state.v[k] = b2 * state.v[k] + (1.0 - b2) * grad[k] * grad[k];
        const double m_hat = state.m[k] / c1;
        const double v_hat = state.v[k] / c2;
        params[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_eps);
    }
}

TrainReport train(const Problem& problem, const FamilySpec& spec, const TrainConfig& config) {
    validate(config);
    validate(problem.bc);
    const auto started = std::chrono::steady_clock::now();

    const std::size_t n_family = param_count(spec);
    std::vector<double> params = init_params(spec, config.seed, problem.bc.domain());
    params.push_back(0.0);  // rho_a
    params.push_back(0.0);  // rho_b

    AdamState adam(params.size());
    const SampleGrid fixed_grid = sample_grid(problem.bc, config.grid_n, GridMode::midpoint);
    SampleGrid random_grid;
    auto grid_for = [&](int step) -> const SampleGrid& {
        if (config.grid_mode == GridMode::midpoint) return fixed_grid;
        random_grid = sample_grid(problem.bc, config.grid_n, GridMode::random,
                                  config.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(step));
        return random_grid;
    };

    TrainReport report;
    std::deque<double> window;
    double last_loss = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> good_params = params;
    report.status = TrainStatus::max_steps;

    int step = 0;
    try {
        for (;; ++step) {
            const bool last = step == config.steps;
            const SampleGrid& grid = grid_for(step);
            LossGrad lg = loss_and_grad(problem, spec, params, grid);
            if (!std::isfinite(lg.loss)) throw OverflowError("loss is not finite at step " + std::to_string(step));
            last_loss = lg.loss;
            good_params = params;

            bool stop = last;
            if (config.early_stop) {
                window.push_back(lg.loss);
                if (static_cast<int>(window.size()) > config.early_stop_window) {
                    if (std::abs(window.back() - window.front()) < config.early_stop_tol) {
                        report.status = TrainStatus::converged;
                        stop = true;
                    }
                    window.pop_front();
                }
            }
            if (step % config.record_every == 0 || stop) report.loss_history.emplace_back(step, lg.loss);
            if (stop) break;

            if (!config.train_exponents) lg.grad[n_family] = lg.grad[n_family + 1] = 0.0;
            if (config.algorithm == Algorithm::adam) adam_step(adam, params, lg.grad, config);
            else sgd_step(params, lg.grad, config.learning_rate);
        }
        report.final_loss = last_loss;
        report.j_final = config.grid_mode == GridMode::midpoint ? last_loss
                                                                : loss_value(problem, spec, params, fixed_grid);
    } catch (const Error& e) {
        report.status = TrainStatus::failed;
        report.failure_reason = "step " + std::to_string(step) + ": " + e.what();
        report.final_loss = last_loss;
        report.j_final = std::numeric_limits<double>::quiet_NaN();
        if (report.loss_history.empty() && std::isfinite(last_loss)) report.loss_history.emplace_back(step, last_loss);
    }

    report.final_params.assign(good_params.begin(), good_params.begin() + static_cast<std::ptrdiff_t>(n_family));
    report.final_exponents = {good_params[n_family], good_params[n_family + 1]};
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace varipade
