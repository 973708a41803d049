#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "varipade/boundary.hpp"
#include "varipade/error.hpp"

using namespace varipade;

TEST_CASE("boundary factor examples") {
    const BoundaryCondition sym{-1.0, 1.0, 0.0, 0.0};
    const Jet a = boundary_factor_jet(sym, {}, 0.0);
    CHECK(a.y == 1.0);
    CHECK(a.dy_dx == 0.0);

    const BoundaryCondition unit{0.0, 1.0, 0.0, 0.0};
    CHECK(boundary_factor_jet(unit, {}, 1e-12).y == doctest::Approx(1e-12).epsilon(1e-9));

    const Jet c = boundary_factor_jet(unit, {std::log(0.75), 0.0}, 0.5);
    CHECK(c.y == doctest::Approx(std::pow(0.5, 0.75) * 0.5).epsilon(1e-14));
    CHECK(c.y == doctest::Approx(0.297301).epsilon(1e-6));

    CHECK_THROWS_AS(boundary_factor_jet(unit, {}, 0.0), DomainError);
    CHECK_THROWS_AS(boundary_factor_jet(unit, {}, 1.0), DomainError);
    CHECK_THROWS_AS(boundary_factor_jet(unit, {}, 1.5), DomainError);
}

TEST_CASE("boundary factor is symmetric for equal exponents") {
    const BoundaryCondition sym{-1.0, 1.0, 3.0, -2.0};
    for (double rho : {-0.5, 0.0, 0.4})
        for (double x : {0.1, 0.5, 0.99}) {
            const Jet l = boundary_factor_jet(sym, {rho, rho}, -x);
            const Jet r = boundary_factor_jet(sym, {rho, rho}, x);
            CHECK(l.y == doctest::Approx(r.y).epsilon(1e-15));
            CHECK(l.dy_dx == doctest::Approx(-r.dy_dx).epsilon(1e-14));
        }
}

TEST_CASE("linear interpolant") {
    const auto [g0, s0] = linear_interpolant({-1.0, 1.0, 0.0, 2.0}, 0.0);
    CHECK(g0 == 1.0);
    CHECK(s0 == 1.0);
    const auto [g1, s1] = linear_interpolant({0.0, 1.0, 0.0, 0.25}, 0.5);
    CHECK(g1 == 0.125);
    CHECK(s1 == 0.25);
    const BoundaryCondition bc{-2.5, 4.0, 1.5, -3.0};
    CHECK(linear_interpolant(bc, bc.x_a).first == doctest::Approx(bc.y_a).epsilon(1e-15));
    CHECK(linear_interpolant(bc, bc.x_b).first == doctest::Approx(bc.y_b).epsilon(1e-15));
}

TEST_CASE("compose_final examples") {
    // Poly-1 with w_1 = 0, b = 1 on [0, 1] from 0 to 1: y = x(1 - x) + x.
    const auto poly1 = parse_structure("Poly-1");
    const BoundaryCondition bc{0.0, 1.0, 0.0, 1.0};
    const Jet j = compose_final(poly1, std::vector<double>{0.0, 1.0}, {}, bc, 0.5);
    CHECK(j.y == doctest::Approx(0.75));
    CHECK(j.dy_dx == doctest::Approx(1.0));

    // A zero family reduces to the interpolant.
    const BoundaryCondition line{-1.0, 1.0, 0.0, 2.0};
    const Jet z = compose_final(poly1, std::vector<double>{0.0, 0.0}, {}, line, 0.0);
    CHECK(z.y == 1.0);
    CHECK(z.dy_dx == 1.0);

    CHECK(z.grad_y.size() == 4);
    CHECK_THROWS_AS(compose_final(poly1, std::vector<double>{0.0, 0.0}, {}, line, -1.0), DomainError);
}

TEST_CASE("composed jets match finite differences, exponents included") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rho(-0.3, 0.3), xa(-2.0, 0.0), w(0.5, 3.0), ya(-2.0, 2.0), t(0.02, 0.98);
    for (const auto& spec : oracle::small_structures()) {
        double worst = 0.0;
        for (int draw = 0; draw < 50; ++draw) {
            BoundaryCondition bc{xa(rng), 0.0, ya(rng), ya(rng)};
            bc.x_b = bc.x_a + w(rng);
            auto params = oracle::random_params(spec, rng, std::max(std::abs(bc.x_a), std::abs(bc.x_b)));
            params.push_back(rho(rng));
            params.push_back(rho(rng));
            const double x = bc.x_a + t(rng) * bc.width();
            const std::size_t n = param_count(spec);
            auto eval = [&](std::span<const double> p) {
                return compose_final(spec, p.first(n), {p[n], p[n + 1]}, bc, x);
            };
            const Jet jet = eval(params);
            const auto fd_y = oracle::gradient([&](std::span<const double> p) { return eval(p).y; }, params);
            const auto fd_d = oracle::gradient([&](std::span<const double> p) { return eval(p).dy_dx; }, params);
            const BoundaryExponents ex{params[n], params[n + 1]};
            const auto family = std::span<const double>(params).first(n);
            const double fd_x = oracle::central([&](double v) { return compose_final(spec, family, ex, bc, v).y; }, x);
            worst = std::max({worst, oracle::max_rel_err(jet.grad_y, fd_y, oracle::grad_floor),
                              oracle::max_rel_err(jet.grad_dy_dx, fd_d, oracle::grad_floor),
                              oracle::rel_err(jet.dy_dx, fd_x, oracle::grad_floor)});
        }
        CHECK_MESSAGE(worst <= 1e-5, to_string(spec) << " worst relative error " << worst);
    }
}

TEST_CASE("endpoint values are exact for any parameters") {
    // The deviation at distance eps is |y_net| eps^m_a width^m_b, so the
    // draws keep m >= 1 and |y_net| = O(1).
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> rho(0.0, 0.5), xa(-3.0, 1.0), w(0.1, 3.0), ya(-5.0, 5.0);
    const auto specs = oracle::small_structures();
    for (int draw = 0; draw < 300; ++draw) {
        const auto& spec = specs[static_cast<std::size_t>(draw) % specs.size()];
        BoundaryCondition bc{xa(rng), 0.0, ya(rng), ya(rng)};
        bc.x_b = bc.x_a + w(rng);
        const auto params = oracle::random_params(spec, rng, std::max(std::abs(bc.x_a), std::abs(bc.x_b)));
        const BoundaryExponents ex{rho(rng), rho(rng)};
        const double eps = 1e-12 * bc.width();
        CHECK(std::abs(compose_final(spec, params, ex, bc, bc.x_a + eps).y - bc.y_a) <= 1e-9);
        CHECK(std::abs(compose_final(spec, params, ex, bc, bc.x_b - eps).y - bc.y_b) <= 1e-9);
    }
}

TEST_CASE("validate rejects degenerate intervals") {
    CHECK_THROWS_AS(validate(BoundaryCondition{1.0, 1.0, 0.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(validate(BoundaryCondition{1.0, 0.0, 0.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(validate(BoundaryCondition{0.0, 1.0, NAN, 0.0}), PreconditionError);
    CHECK_NOTHROW(validate(BoundaryCondition{0.0, 1.0, 0.0, 0.0}));
}
