#include "varipade/loss.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "varipade/error.hpp"

namespace varipade {

namespace {

std::string at_point(double x, const std::exception& e) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "at sample x=" << x << ": " << e.what();
    return msg.str();
}

// Runs `body(x)` for every sample point, re-raising library errors with the
// failing point attached.
template <typename Body>
void for_each_point(const SampleGrid& grid, Body&& body) {
    for (const double x : grid.points) {
        try {
            body(x);
        } catch (const PoleError&) {
            throw;  // already names x
        } catch (const OverflowError& e) {
            throw OverflowError(at_point(x, e));
        } catch (const DomainError& e) {
            throw DomainError(at_point(x, e));
        }
    }
}

BoundaryExponents split_exponents(const FamilySpec& spec, std::span<const double> params) {
    const std::size_t n = param_count(spec);
    if (params.size() != n + 2)
        throw PreconditionError("expected " + std::to_string(n + 2) + " parameters (family + 2 exponents), got " +
                                std::to_string(params.size()));
    return {params[n], params[n + 1]};
}

}  // namespace

SampleGrid sample_grid(const BoundaryCondition& bc, int n, GridMode mode, std::uint64_t seed) {
    validate(bc);
    if (n < 1) throw PreconditionError("sample grid needs at least one point");
    SampleGrid grid;
    grid.weight = bc.width() / n;
    grid.points.resize(static_cast<std::size_t>(n));
    if (mode == GridMode::midpoint) {
        for (int i = 0; i < n; ++i) grid.points[static_cast<std::size_t>(i)] = bc.x_a + (i + 0.5) * grid.weight;
        return grid;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(bc.x_a, bc.x_b);
    for (double& x : grid.points) {
        do {
            x = uniform(rng);
        } while (!(x > bc.x_a && x < bc.x_b));
    }
    std::sort(grid.points.begin(), grid.points.end());
    return grid;
}

LossGrad loss_and_grad(const Problem& problem, const FamilySpec& spec, std::span<const double> params,
                       const SampleGrid& grid) {
    const BoundaryExponents exps = split_exponents(spec, params);
    const auto family_params = params.first(param_count(spec));

    LossGrad out;
    out.grad.assign(params.size(), 0.0);
    Jet jet, scratch;
    for_each_point(grid, [&](double x) {
        compose_final(spec, family_params, exps, problem.bc, x, jet, scratch);
        const IntegrandEval f = eval_integrand(problem.integrand, x, jet.y, jet.dy_dx);
        out.loss += f.value;
        for (std::size_t k = 0; k < out.grad.size(); ++k)
            out.grad[k] += f.dF_dy * jet.grad_y[k] + f.dF_ddy * jet.grad_dy_dx[k];
    });
    out.loss *= grid.weight;
    for (double& g : out.grad) g *= grid.weight;
    return out;
}

double loss_value(const Problem& problem, const FamilySpec& spec, std::span<const double> params,
                  const SampleGrid& grid) {
    return loss_and_grad(problem, spec, params, grid).loss;
}

double functional_value(const Problem& problem, const Trajectory& y, int n) {
    const SampleGrid grid = sample_grid(problem.bc, n, GridMode::midpoint);
    double sum = 0.0;
    for_each_point(grid, [&](double x) {
        const auto [value, slope] = y(x);
        sum += eval_integrand(problem.integrand, x, value, slope).value;
    });
    return sum * grid.weight;
}

}  // namespace varipade
