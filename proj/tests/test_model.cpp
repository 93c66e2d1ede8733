#include <catch2/catch_amalgamated.hpp>

#include "parlab/capacity.hpp"
#include "parlab/model.hpp"
#include "parlab/quadrature.hpp"

using namespace parlab;

TEST_CASE("adaptive quadrature hits closed forms") {
    CHECK(integrate([](Real t) { return t * t; }, 0.0, 1.0) == Catch::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(integrate([](Real t) { return std::sin(t); }, 0.0, kPi) == Catch::Approx(2.0).epsilon(1e-9));
    const auto tail = integrate_to_infinity([](Real t) { return 1.0 / (t * t); }, 1.0);
    CHECK_FALSE(tail.divergent);
    CHECK(tail.value == Catch::Approx(1.0).epsilon(1e-6));
    CHECK(integrate_to_infinity([](Real t) { return 1.0 / t; }, 1.0).divergent);
}

TEST_CASE("model construction and invariants") {
    CHECK_THROWS_AS(build_model("euclidean", {}, 1, 1.0), InvariantViolation);
    CHECK_THROWS_AS(build_model("euclidean", {}, 2, 0.0), InvalidFraction);
    CHECK_THROWS_AS(build_model("euclidean", {}, 2, 1.5), InvalidFraction);
    CHECK_THROWS_AS(build_model("power", {-1.0}, 2, 1.0), InvalidWarp);
    CHECK_THROWS_AS(build_model("nope", {}, 2, 1.0), InvalidWarp);
    // sampled table with non-monotone radii
    CHECK_THROWS_AS(ModelManifold({{0.0, 0.0}, {1.0, 1.0}, {0.5, 2.0}}, 2, 1.0), InvalidWarp);
    // non-positive sampled warp
    CHECK_THROWS_AS(ModelManifold({{0.0, 0.0}, {1.0, -1.0}}, 2, 1.0), InvalidWarp);
}

TEST_CASE("radius preconditions") {
    const auto m = build_model("euclidean", {}, 2, 1.0);
    CHECK_THROWS_AS(ball_volume(m, -0.5), RadiusOutOfRange);
    CHECK_THROWS_AS(sphere_area(m, 0.0), RadiusOutOfRange);
    CHECK_THROWS_AS(radial_resistance(m, 2.0, 1.0), RadiusOutOfRange);
    CHECK(ball_volume(m, 0.0) == 0.0);
}

TEST_CASE("ball volumes and sphere areas") {
    const auto half_plane = build_model("euclidean", {}, 2, 0.5);
    CHECK(ball_volume(half_plane, 1.0) == Catch::Approx(kPi / 2).epsilon(1e-12));

    const auto r3 = build_model("euclidean", {}, 3, 1.0);
    CHECK(sphere_area(r3, 1.0) == Catch::Approx(4 * kPi).epsilon(1e-12));
    CHECK(sphere_area(r3, 2.0) == Catch::Approx(16 * kPi).epsilon(1e-12));
    CHECK(ball_volume(r3, 1.0) == Catch::Approx(4 * kPi / 3).epsilon(1e-12));

    const auto h2 = build_model("hyperbolic", {}, 2, 1.0);
    // closed form against the quadrature oracle
    const Real closed = 2 * kPi * (std::cosh(1.0) - 1);
    const Real quad = 2 * kPi * integrate([](Real t) { return std::sinh(t); }, 0.0, 1.0);
    CHECK(ball_volume(h2, 1.0) == Catch::Approx(closed).epsilon(1e-12));
    CHECK(quad == Catch::Approx(closed).epsilon(1e-10));
    CHECK(sphere_area(h2, 1.0) == Catch::Approx(2 * kPi * std::sinh(1.0)).epsilon(1e-12));

    const auto flat2 = build_model("euclidean", {}, 2, 1.0);
    CHECK(ball_volume(flat2, 2.0) == Catch::Approx(4 * kPi).epsilon(1e-12));
    CHECK(sphere_area(flat2, 3.0) == Catch::Approx(6 * kPi).epsilon(1e-12));
}

TEST_CASE("co-area: sphere area is the volume derivative") {
    const std::vector<ModelManifold> models = {
        build_model("euclidean", {}, 2, 1.0), build_model("hyperbolic", {}, 2, 1.0),
        build_model("cusp", {}, 2, 1.0), build_model("power", {1.5}, 2, 1.0),
        build_model("euclidean", {}, 3, 0.5)};
    for (const auto& model : models) {
        for (int k = 1; k <= 20; ++k) {
            const Real R = 0.25 * k;
            const Real dR = 1e-5;
            const Real fd = (ball_volume(model, R + dR) - ball_volume(model, R - dR)) / (2 * dR);
            CHECK(fd == Catch::Approx(sphere_area(model, R)).epsilon(1e-6));
        }
    }
    // volume is non-decreasing in R
    const auto cusp = build_model("cusp", {}, 2, 1.0);
    Real prev = 0;
    for (int k = 1; k <= 40; ++k) {
        const Real v = ball_volume(cusp, 0.5 * k);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("radial capacity oracle") {
    const auto flat2 = build_model("euclidean", {}, 2, 1.0);
    CHECK(radial_capacity_oracle(flat2, 1.0, 2.0) ==
          Catch::Approx(2 * kPi / std::log(2.0)).epsilon(1e-10));
    // divergent resistance => zero capacity => parabolic plane
    CHECK(radial_capacity_oracle(flat2, 1.0, std::numeric_limits<Real>::infinity()) == 0.0);

    const auto r3 = build_model("euclidean", {}, 3, 1.0);
    CHECK(radial_capacity_oracle(r3, 1.0, std::numeric_limits<Real>::infinity()) ==
          Catch::Approx(4 * kPi).epsilon(1e-8));
    CHECK(radial_capacity_oracle(r3, 1.0, 2.0) == Catch::Approx(8 * kPi).epsilon(1e-10));

    const auto h2_half = build_model("hyperbolic", {}, 2, 0.5);
    const Real expected = kPi / std::log(1.0 / std::tanh(0.5));
    CHECK(radial_capacity_oracle(h2_half, 1.0, std::numeric_limits<Real>::infinity()) ==
          Catch::Approx(expected).epsilon(1e-6));
}

TEST_CASE("sampled-table warp matches its closed-form original") {
    std::vector<std::pair<Real, Real>> rows;
    for (int i = 0; i <= 400; ++i) {
        const Real r = 4.0 * i / 400;
        rows.push_back({r, std::sinh(r)});
    }
    const ModelManifold table(rows, 2, 1.0);
    const auto h2 = build_model("hyperbolic", {}, 2, 1.0);
    CHECK(ball_volume(table, 2.0) == Catch::Approx(ball_volume(h2, 2.0)).epsilon(1e-4));
    CHECK(radial_capacity_oracle(table, 1.0, 3.0) ==
          Catch::Approx(radial_capacity_oracle(h2, 1.0, 3.0)).epsilon(1e-4));
}
