#pragma once

// Discretized functional
//
//   loss = (x_b - x_a)/N * sum_i F(x_i, y(x_i), y'(x_i))
//
// over sample points strictly inside (x_a, x_b), with its exact gradient
//
//   d loss / d theta_k = w * sum_i [ F_y * dy/dtheta_k + F_dy * dy'/dtheta_k ].

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "varipade/boundary.hpp"
#include "varipade/expr.hpp"

namespace varipade {

/// x -> (y(x), y'(x))
using Trajectory = std::function<std::pair<double, double>(double)>;

struct Problem {
    std::string name;
    IntegrandExpr integrand;
    BoundaryCondition bc;
    Trajectory exact;               // empty when unknown
    std::optional<double> j_exact;  // analytic J(exact) when known
};

enum class GridMode { midpoint, random };

struct SampleGrid {
    std::vector<double> points;
    double weight = 0.0;
};

/// Midpoint: x_i = x_a + (i - 1/2)(x_b - x_a)/n. Random: n sorted uniform
/// draws from the open interval, determined by `seed`.
SampleGrid sample_grid(const BoundaryCondition& bc, int n, GridMode mode = GridMode::midpoint,
                       std::uint64_t seed = 0);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/// `params` is the concatenation of the family parameters and (rho_a, rho_b).
/// Errors from the model or the integrand are rethrown with the sample point
/// prepended to the message, keeping their type.
LossGrad loss_and_grad(const Problem& problem, const FamilySpec& spec, std::span<const double> params,
                       const SampleGrid& grid);

/// Same quantity without the gradient.
double loss_value(const Problem& problem, const FamilySpec& spec, std::span<const double> params,
                  const SampleGrid& grid);

/// Midpoint-rule quadrature of F along an arbitrary trajectory, with the
/// same weight convention as the loss.
double functional_value(const Problem& problem, const Trajectory& y, int n);

}  // namespace varipade
