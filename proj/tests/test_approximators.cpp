#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "varipade/approximators.hpp"
#include "varipade/error.hpp"

using namespace varipade;

TEST_CASE("parse_structure examples") {
    const auto p = parse_structure("Pade-[5/5]");
    CHECK(p.kind == FamilyKind::pade);
    CHECK(p.pade_m == 5);
    CHECK(p.pade_n == 5);

    const auto m = parse_structure("MLP-[[32,sigmoid],[32,sigmoid]]");
    CHECK(m.kind == FamilyKind::mlp);
    REQUIRE(m.layers.size() == 2);
    CHECK(m.layers[0].width == 32);
    CHECK(m.layers[1].activation == Activation::sigmoid);

    CHECK_THROWS_AS(parse_structure("RBF-[0]"), InvalidStructure);
    CHECK_THROWS_AS(parse_structure("MLP-[[0,tanh]]"), InvalidStructure);
    CHECK_THROWS_AS(parse_structure("MLP-[[4,relu]]"), InvalidStructure);
    CHECK_THROWS_AS(parse_structure("Leg-0"), InvalidStructure);
    CHECK_THROWS_AS(parse_structure("Pade-[5/"), SyntaxError);
    CHECK_THROWS_AS(parse_structure("Spline-3"), SyntaxError);
    CHECK_THROWS_AS(parse_structure("Poly-3x"), SyntaxError);
}

TEST_CASE("alternate spellings from the result tables") {
    CHECK(parse_structure("Pade:4/5") == parse_structure("Pade-[4/5]"));
    CHECK(parse_structure("RBF:[16]") == parse_structure("RBF-[16]"));
    CHECK(parse_structure("Leg:15") == parse_structure("Leg-15"));
    CHECK(parse_structure("MPL-[[16,sigmoid]]") == parse_structure("MLP-[[16,sigmoid]]"));
}

TEST_CASE("structure strings round-trip") {
    for (const char* s : {"Pade-[5/5]", "Pade-[0/3]", "MLP-[[8,sigmoid]]", "MLP-[[3,tanh],[5,sigmoid]]", "RBF-[16]",
                          "Leg-15", "Poly-1"}) {
        CHECK(to_string(parse_structure(s)) == s);
        CHECK(parse_structure(to_string(parse_structure(s))) == parse_structure(s));
    }
}

TEST_CASE("parameter counts of the benchmark structures") {
    const std::pair<const char*, std::size_t> table[] = {
        {"Pade-[5/5]", 12},  {"RBF-[8]", 25},   {"MLP-[[8,sigmoid]]", 18}, {"Leg-10", 11},  {"Poly-10", 11},
        {"Pade-[8/10]", 20}, {"MLP-[[16,sigmoid]]", 34}, {"Leg-15", 16},   {"RBF-[16]", 49}, {"Pade-[4/5]", 11},
    };
    for (const auto& [s, n] : table) CHECK_MESSAGE(param_count(parse_structure(s)) == n, s);
    // Two hidden layers: (1*3 + 1) + (3*3 + 1) + 3 + 1.
    CHECK(param_count(parse_structure("MLP-[[3,tanh],[3,tanh]]")) == 18);
}

TEST_CASE("init_params") {
    for (const char* s : {"Pade-[5/5]", "MLP-[[8,sigmoid]]", "RBF-[8]", "Leg-4", "Poly-4"}) {
        const auto spec = parse_structure(s);
        const auto a = init_params(spec, 42);
        CHECK(a.size() == param_count(spec));
        CHECK(a == init_params(spec, 42));
        CHECK(a != init_params(spec, 43));
    }
    for (std::uint64_t seed : {0u, 1u, 99u}) CHECK(init_params(parse_structure("Pade-[5/5]"), seed)[11] == 1.0);

    const auto rbf = init_params(parse_structure("RBF-[8]"), 3, {-1.0, 1.0});
    for (int i = 1; i <= 8; ++i) {
        CHECK(rbf[static_cast<std::size_t>(7 + i)] == doctest::Approx(-1.0 + (i - 0.5) * 0.25).epsilon(1e-15));
        CHECK(std::exp(rbf[static_cast<std::size_t>(15 + i)]) == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("eval_jet examples") {
    const auto pade = parse_structure("Pade-[2/2]");
    const auto j1 = eval_jet(pade, std::vector<double>{0, 0, 1, 0, 0, 2}, 0.7);
    CHECK(j1.y == 0.5);
    CHECK(j1.dy_dx == 0.0);

    const auto mlp = parse_structure("MLP-[[1,sigmoid]]");
    std::vector<double> p(param_count(mlp), 0.0);
    CHECK(eval_jet(mlp, p, 3.0).y == 0.0);
    p.back() = 0.25;
    CHECK(eval_jet(mlp, p, 3.0).y == 0.25);

    CHECK(eval_jet(parse_structure("Leg-2"), std::vector<double>{0, 1, 0}, 0.0).y == -0.5);

    try {
        eval_jet(parse_structure("Pade-[3/1]"), std::vector<double>{0.1, 0.2, 0.3, 0.4, -1, 1}, 1.0);
        FAIL("expected PoleError");
    } catch (const PoleError& e) {
        CHECK(e.x() == 1.0);
    }
}

TEST_CASE("eval_jet rejects bad inputs") {
    const auto poly = parse_structure("Poly-2");
    CHECK_THROWS_AS(eval_jet(poly, std::vector<double>{1, 2}, 0.0), PreconditionError);
    CHECK_THROWS_AS(eval_jet(poly, std::vector<double>{1e308, 1e308, 0}, 1e10), OverflowError);
    CHECK_THROWS_AS(eval_jet(poly, std::vector<double>{1, 1, 0}, std::numeric_limits<double>::infinity()),
                    OverflowError);
}

TEST_CASE("jets match finite differences") {
    std::vector<FamilySpec> specs = oracle::small_structures();
    for (const char* s : {"Pade-[5/5]", "MLP-[[8,sigmoid]]", "MLP-[[2,sigmoid],[3,tanh],[2,sigmoid]]", "RBF-[8]",
                          "Leg-10", "Poly-10"})
        specs.push_back(parse_structure(s));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    for (const auto& spec : specs) {
        double worst = 0.0;
        for (int draw = 0; draw < 200; ++draw) {
            const auto params = oracle::random_params(spec, rng, 1.0);
            const double x = ux(rng);
            const Jet jet = eval_jet(spec, params, x);

            const auto fd_y = oracle::gradient([&](std::span<const double> p) { return eval_jet(spec, p, x).y; }, params);
            const auto fd_d = oracle::gradient([&](std::span<const double> p) { return eval_jet(spec, p, x).dy_dx; },
                                               params);
            const double fd_x = oracle::central([&](double v) { return eval_jet(spec, params, v).y; }, x);
            worst = std::max({worst, oracle::max_rel_err(jet.grad_y, fd_y, oracle::grad_floor),
                              oracle::max_rel_err(jet.grad_dy_dx, fd_d, oracle::grad_floor),
                              oracle::rel_err(jet.dy_dx, fd_x, oracle::grad_floor)});
        }
        CHECK_MESSAGE(worst <= 1e-5, to_string(spec) << " worst relative error " << worst);
    }
}

TEST_CASE("Pade with a unit denominator equals the polynomial") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int m = 1; m <= 6; ++m) {
        const auto pade = parse_structure("Pade-[" + std::to_string(m) + "/3]");
        const auto poly = parse_structure("Poly-" + std::to_string(m));
        std::vector<double> num(static_cast<std::size_t>(m) + 1);
        for (double& v : num) v = u(rng);
        std::vector<double> p = num;
        p.insert(p.end(), {0.0, 0.0, 0.0, 1.0});
        for (int k = 0; k < 50; ++k) {
            const double x = 3.0 * u(rng);
            const Jet a = eval_jet(pade, p, x);
            const Jet b = eval_jet(poly, num, x);
            CHECK(oracle::rel_err(a.y, b.y, 1e-300) <= 1e-14);
            CHECK(oracle::rel_err(a.dy_dx, b.dy_dx, 1e-300) <= 1e-14);
            for (std::size_t i = 0; i < num.size(); ++i) {
                CHECK(oracle::rel_err(a.grad_y[i], b.grad_y[i], 1e-300) <= 1e-14);
                CHECK(oracle::rel_err(a.grad_dy_dx[i], b.grad_dy_dx[i], 1e-300) <= 1e-14);
            }
        }
    }
}

TEST_CASE("Legendre recurrence matches the explicit polynomials") {
    const auto leg = parse_structure("Leg-5");
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = -1.0 + 2.0 * i / 99.0;
        for (int n = 0; n <= 5; ++n) {
            std::vector<double> p(6, 0.0);
            if (n == 0)
                p[5] = 1.0;  // the bias multiplies P_0
            else
                p[static_cast<std::size_t>(n - 1)] = 1.0;
            // |P_n| <= 1 on [-1, 1]; errors are measured against that scale.
            worst = std::max(worst, oracle::rel_err(eval_jet(leg, p, x).y, oracle::legendre_explicit(n, x), 1.0));
        }
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("Legendre basis gradients are the basis values") {
    const auto leg = parse_structure("Leg-5");
    const std::vector<double> p{0.3, -0.2, 0.5, 0.1, -0.4, 0.7};
    const Jet j = eval_jet(leg, p, 0.37);
    for (int n = 1; n <= 5; ++n)
        CHECK(j.grad_y[static_cast<std::size_t>(n - 1)] == doctest::Approx(oracle::legendre_explicit(n, 0.37)).epsilon(1e-14));
    CHECK(j.grad_y[5] == 1.0);
}
