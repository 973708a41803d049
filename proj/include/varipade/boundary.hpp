#pragma once

// Fixed-endpoint composition
//
//   y_final(x) = y_net(x) * bound(x) + g(x)
//   bound(x)   = (x - x_a)^m_a * (x_b - x)^m_b,   m_a = exp(rho_a), m_b = exp(rho_b)
//   g(x)       = linear interpolant through (x_a, y_a) and (x_b, y_b)
//
// so that y_final(x_a) = y_a and y_final(x_b) = y_b for any family parameters.
// Jets of y_final carry the family gradients first, then d/drho_a, d/drho_b.

#include <span>
#include <utility>

#include "varipade/approximators.hpp"

namespace varipade {

struct BoundaryCondition {
    double x_a = 0.0;
    double x_b = 1.0;
    double y_a = 0.0;
    double y_b = 0.0;

    double width() const { return x_b - x_a; }
    Interval domain() const { return {x_a, x_b}; }
};

/// Throws PreconditionError unless x_a < x_b and all entries are finite.
void validate(const BoundaryCondition& bc);

struct BoundaryExponents {
    double rho_a = 0.0;
    double rho_b = 0.0;
};

/// bound(x) with gradients in (rho_a, rho_b). Requires x_a < x < x_b.
Jet boundary_factor_jet(const BoundaryCondition& bc, const BoundaryExponents& exps, double x);

/// (g(x), g'(x)).
std::pair<double, double> linear_interpolant(const BoundaryCondition& bc, double x);

/// Jet of y_final; gradient length param_count(spec) + 2.
Jet compose_final(const FamilySpec& spec, std::span<const double> params, const BoundaryExponents& exps,
                  const BoundaryCondition& bc, double x);

/// Allocation-free variant for inner loops; `family` is scratch storage.
void compose_final(const FamilySpec& spec, std::span<const double> params, const BoundaryExponents& exps,
                   const BoundaryCondition& bc, double x, Jet& out, Jet& family);

}  // namespace varipade
