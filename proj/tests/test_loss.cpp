#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "varipade/benchmarks.hpp"
#include "varipade/error.hpp"
#include "varipade/loss.hpp"

using namespace varipade;

namespace {

Problem builtin(const char* name) { return find_case(name).value().problem; }

Problem custom(const char* integrand, BoundaryCondition bc) {
    return Problem{"custom", parse_integrand(integrand), bc, {}, std::nullopt};
}

}  // namespace

TEST_CASE("midpoint grids") {
    const auto g = sample_grid({0.0, 1.0, 0.0, 0.0}, 2);
    CHECK(g.points == std::vector<double>{0.25, 0.75});
    CHECK(g.weight == 0.5);
    const auto h = sample_grid({-1.0, 1.0, 0.0, 0.0}, 4);
    CHECK(h.points == std::vector<double>{-0.75, -0.25, 0.25, 0.75});
    CHECK_THROWS_AS(sample_grid({0.0, 1.0, 0.0, 0.0}, 0), PreconditionError);
}

TEST_CASE("random grids are seeded, sorted and interior") {
    const BoundaryCondition bc{-2.0, 3.0, 0.0, 0.0};
    const auto a = sample_grid(bc, 500, GridMode::random, 9);
    CHECK(a.points == sample_grid(bc, 500, GridMode::random, 9).points);
    CHECK(a.points != sample_grid(bc, 500, GridMode::random, 10).points);
    CHECK(std::is_sorted(a.points.begin(), a.points.end()));
    for (double x : a.points) CHECK((x > bc.x_a && x < bc.x_b));
    CHECK(a.weight == 0.01);
}

TEST_CASE("zero integrand gives zero loss and gradient") {
    const auto spec = parse_structure("Pade-[3/2]");
    auto p = init_params(spec, 1);
    p.insert(p.end(), {0.1, -0.2});
    const auto r = loss_and_grad(custom("0", {0.0, 1.0, 0.0, 0.0}), spec, p, sample_grid({0.0, 1.0, 0.0, 0.0}, 64));
    CHECK(r.loss == 0.0);
    for (double g : r.grad) CHECK(g == 0.0);
}

TEST_CASE("straight line through the composition gives the arc length") {
    // A zero family leaves y_final = g, the straight segment from (-1, 0) to (1, 2).
    const auto spec = parse_structure("Poly-3");
    std::vector<double> p(param_count(spec) + 2, 0.0);
    const Problem prob = builtin("shortest-path");
    const double loss = loss_value(prob, spec, p, sample_grid(prob.bc, 1000));
    CHECK(loss == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-14));
    CHECK(std::abs(loss - 2.8284) <= 3e-3);
}

TEST_CASE("functional_value on exact solutions") {
    CHECK(std::abs(functional_value(builtin("shortest-path"), builtin("shortest-path").exact, 10000) - 2.8284) <= 1e-3);
    CHECK(std::abs(functional_value(builtin("minimum-drag"), builtin("minimum-drag").exact, 10000) - 0.4219) <= 5e-3);
    CHECK(std::abs(functional_value(builtin("cosine-load"), builtin("cosine-load").exact, 10000) - (-0.2976)) <= 1e-3);
    CHECK(std::abs(functional_value(builtin("harmonic-load"), builtin("harmonic-load").exact, 10000) - (-0.0246)) <=
          1e-4);

    // Symbolic oracle for the linear-drift case: y' = (1 - x)/2 and
    // F = y'^2 + x y', integrated exactly as a polynomial.
    const oracle::Poly dy{0.5, -0.5};
    const double j3 = oracle::integrate(oracle::add(oracle::multiply(dy, dy), oracle::multiply({0.0, 1.0}, dy)), 0, 1);
    CHECK(j3 == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    const Problem p3 = builtin("linear-drift");
    CHECK(std::abs(functional_value(p3, p3.exact, 10000) - j3) / j3 <= 1e-4);
}

TEST_CASE("loss gradients match finite differences on every builtin problem") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> rho(-0.3, 0.3);
    for (const auto& c : builtin_cases()) {
        const Problem& prob = c.problem;
        const auto grid = sample_grid(prob.bc, 40);
        const double x_max = std::max(std::abs(prob.bc.x_a), std::abs(prob.bc.x_b));
        for (const auto& spec : oracle::small_structures()) {
            double worst = 0.0;
            for (int draw = 0; draw < 10; ++draw) {
                auto p = oracle::random_params(spec, rng, x_max);
                p.push_back(rho(rng));
                p.push_back(rho(rng));
                const auto r = loss_and_grad(prob, spec, p, grid);
                CHECK(r.loss == doctest::Approx(loss_value(prob, spec, p, grid)).epsilon(1e-14));
                const auto fd =
                    oracle::gradient([&](std::span<const double> q) { return loss_value(prob, spec, q, grid); }, p);
                worst = std::max(worst, oracle::max_rel_err(r.grad, fd, oracle::grad_floor));
            }
            CHECK_MESSAGE(worst <= 1e-5, prob.name << " " << to_string(spec) << " worst " << worst);
        }
    }
}

TEST_CASE("midpoint rule converges at second order") {
    std::mt19937_64 rng(2);
    for (const char* name : {"shortest-path", "linear-drift", "cosine-load", "harmonic-load"}) {
        const Problem prob = builtin(name);
        const auto spec = parse_structure("Poly-4");
        auto p = oracle::random_params(spec, rng, 1.0);
        p.insert(p.end(), {0.0, 0.0});
        const double l1 = loss_value(prob, spec, p, sample_grid(prob.bc, 25));
        const double l2 = loss_value(prob, spec, p, sample_grid(prob.bc, 50));
        const double l4 = loss_value(prob, spec, p, sample_grid(prob.bc, 100));
        CHECK_MESSAGE(std::abs(l2 - l1) / std::abs(l4 - l2) >= 3.5, name);
    }
}

TEST_CASE("loss does not depend on sample order") {
    const Problem prob = builtin("cosine-load");
    const auto spec = parse_structure("RBF-[4]");
    std::mt19937_64 rng(8);
    auto p = oracle::random_params(spec, rng, 1.6);
    p.insert(p.end(), {0.1, 0.2});
    auto grid = sample_grid(prob.bc, 200, GridMode::random, 4);
    const auto a = loss_and_grad(prob, spec, p, grid);
    std::shuffle(grid.points.begin(), grid.points.end(), rng);
    const auto b = loss_and_grad(prob, spec, p, grid);
    CHECK(oracle::rel_err(a.loss, b.loss, 1e-300) <= 1e-13);
    CHECK(oracle::max_rel_err(a.grad, b.grad, 1e-12) <= 1e-12);
}

TEST_CASE("model and integrand errors keep their type and name the sample") {
    const BoundaryCondition bc{0.0, 2.0, 0.0, 0.0};
    // Denominator 1 - x vanishes at the midpoint sample x = 1 of a 2-point grid.
    const auto pade = parse_structure("Pade-[1/1]");
    const std::vector<double> p{0.0, 1.0, -1.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(loss_value(custom("dy^2", bc), pade, p, SampleGrid{{1.0}, 2.0}), PoleError);

    const auto poly = parse_structure("Poly-1");
    const std::vector<double> q{0.0, 1.0, 0.0, 0.0};  // y = x(2 - x) >= 0
    try {
        loss_and_grad(custom("sqrt(-y - 0.5)", bc), poly, q, sample_grid(bc, 4));
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("x=") != std::string::npos);
    }
}
