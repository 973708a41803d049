#include "varipade/boundary.hpp"

#include <cmath>
#include <sstream>

#include "varipade/error.hpp"

namespace varipade {

namespace {

struct FactorJet {
    double value, slope;
    double d_rho_a, d_rho_b;              // d bound / d rho
    double slope_d_rho_a, slope_d_rho_b;  // d bound' / d rho
};

FactorJet factor(const BoundaryCondition& bc, const BoundaryExponents& exps, double x) {
    if (!(x > bc.x_a && x < bc.x_b)) {
        std::ostringstream msg;
        msg << "boundary factor needs x in the open interval (" << bc.x_a << ", " << bc.x_b << "), got " << x;
        throw DomainError(msg.str());
    }
    const double ma = std::exp(exps.rho_a);
    const double mb = std::exp(exps.rho_b);
    const double a = x - bc.x_a;
    const double b = bc.x_b - x;
    const double log_a = std::log(a);
    const double log_b = std::log(b);
    const double value = std::pow(a, ma) * std::pow(b, mb);
    const double ratio = ma / a - mb / b;  // bound' / bound
    FactorJet f{};
    f.value = value;
    f.slope = value * ratio;
    f.d_rho_a = value * ma * log_a;
    f.d_rho_b = value * mb * log_b;
    f.slope_d_rho_a = f.d_rho_a * ratio + value * ma / a;
    f.slope_d_rho_b = f.d_rho_b * ratio - value * mb / b;
    return f;
}

}  // namespace

void validate(const BoundaryCondition& bc) {
    if (!std::isfinite(bc.x_a) || !std::isfinite(bc.x_b) || !std::isfinite(bc.y_a) || !std::isfinite(bc.y_b))
        throw PreconditionError("boundary condition entries must be finite");
    if (!(bc.x_b - bc.x_a > 0.0)) throw PreconditionError("boundary condition needs x_a < x_b");
}

Jet boundary_factor_jet(const BoundaryCondition& bc, const BoundaryExponents& exps, double x) {
    const FactorJet f = factor(bc, exps, x);
    Jet j;
    j.y = f.value;
    j.dy_dx = f.slope;
    j.grad_y = {f.d_rho_a, f.d_rho_b};
    j.grad_dy_dx = {f.slope_d_rho_a, f.slope_d_rho_b};
    return j;
}

std::pair<double, double> linear_interpolant(const BoundaryCondition& bc, double x) {
    const double w = bc.x_b - bc.x_a;
    const double slope = (bc.y_b - bc.y_a) / w;
    return {x * slope + (bc.x_b * bc.y_a - bc.y_b * bc.x_a) / w, slope};
}

void compose_final(const FamilySpec& spec, std::span<const double> params, const BoundaryExponents& exps,
                   const BoundaryCondition& bc, double x, Jet& out, Jet& family) {
    const FactorJet f = factor(bc, exps, x);
    if (spec.kind == FamilyKind::legendre) {
        // Legendre basis lives on the interval mapped onto [-1, 1].
        const double scale = 2.0 / bc.width();
        eval_jet(spec, params, (2.0 * x - bc.x_a - bc.x_b) / bc.width(), family);
        family.dy_dx *= scale;
        for (double& g : family.grad_dy_dx) g *= scale;
    } else {
        eval_jet(spec, params, x, family);
    }
    const auto [g, dg] = linear_interpolant(bc, x);

    const std::size_t n = family.grad_y.size();
    if (out.grad_y.size() != n + 2 || out.grad_dy_dx.size() != n + 2) out.resize(n + 2);

    out.y = family.y * f.value + g;
    out.dy_dx = family.dy_dx * f.value + family.y * f.slope + dg;
    for (std::size_t k = 0; k < n; ++k) {
        out.grad_y[k] = family.grad_y[k] * f.value;
        out.grad_dy_dx[k] = family.grad_dy_dx[k] * f.value + family.grad_y[k] * f.slope;
    }
    out.grad_y[n] = family.y * f.d_rho_a;
    out.grad_y[n + 1] = family.y * f.d_rho_b;
    out.grad_dy_dx[n] = family.dy_dx * f.d_rho_a + family.y * f.slope_d_rho_a;
    out.grad_dy_dx[n + 1] = family.dy_dx * f.d_rho_b + family.y * f.slope_d_rho_b;

    if (!std::isfinite(out.y) || !std::isfinite(out.dy_dx)) {
        std::ostringstream msg;
        msg << "composed model is not finite at x=" << x;
        throw OverflowError(msg.str());
    }
}

Jet compose_final(const FamilySpec& spec, std::span<const double> params, const BoundaryExponents& exps,
                  const BoundaryCondition& bc, double x) {
    Jet out, family;
    compose_final(spec, params, exps, bc, x, out, family);
    return out;
}

}  // namespace varipade
