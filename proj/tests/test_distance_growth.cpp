#include <catch2/catch_amalgamated.hpp>

#include "parlab/clipping.hpp"
#include "parlab/distance.hpp"
#include "parlab/fem.hpp"
#include "parlab/meshgen.hpp"

using namespace parlab;

TEST_CASE("distance field modes on the flat disk") {
    const auto m = build_disk_mesh(1.0, 0.1);
    const Index o = 0; // center vertex
    const auto exact = distance_field(m, o, DistanceMode::Exact);
    CHECK(exact[o] == 0.0);
    for (Index v = 0; v < m.num_vertices(); ++v)
        CHECK(exact[v] == norm(m.vertices[std::size_t(v)]));

    const auto dij = distance_field(m, o, DistanceMode::Dijkstra);
    CHECK(dij[o] == 0.0);
    Real worst_rel = 0;
    for (Index v = 0; v < m.num_vertices(); ++v) {
        // monotone overestimate, within 8% at h = 0.1
        CHECK(dij[v] >= exact[v] - 1e-12);
        if (exact[v] > 0.2) worst_rel = std::max(worst_rel, (dij[v] - exact[v]) / exact[v]);
    }
    CHECK(worst_rel <= 0.08);
}

TEST_CASE("disconnected meshes are rejected") {
    MeshManifold m;
    m.vertices = {{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}, {5, 6}};
    m.triangles = {{0, 1, 2}, {3, 4, 5}};
    m.boundary_edges = {{0, 1, BoundaryLabel::D0, "a"}, {1, 2, BoundaryLabel::D0, "a"},
                        {2, 0, BoundaryLabel::D0, "a"}, {3, 4, BoundaryLabel::D0, "b"},
                        {4, 5, BoundaryLabel::D0, "b"}, {5, 3, BoundaryLabel::D0, "b"}};
    validate(m);
    CHECK_THROWS_AS(distance_field(m, 0, DistanceMode::Dijkstra), DisconnectedMesh);
}

TEST_CASE("ball growth by clipping on the flat disk") {
    const auto m = build_disk_mesh(1.0, 0.05);
    const auto dist = distance_field(m, 0, DistanceMode::Exact);

    std::vector<Real> radii;
    for (int k = 1; k <= 18; ++k) radii.push_back(0.05 * k);
    const auto table = ball_growth_samples(m, dist, 0, radii);

    // vol(B_0.5) ~ pi/4 by exact sub-triangle clipping
    const auto& row = table.rows[9];
    CHECK(row.radius == 0.5);
    CHECK(row.volume == Catch::Approx(kPi / 4).epsilon(0.02));
    // level length ~ circumference
    CHECK(row.area == Catch::Approx(2 * kPi * 0.5).epsilon(0.02));
    // co-area consistency within 3% at h = 0.05
    CHECK(table.coarea_defect() <= 0.03);

    // a radius below the shortest incident edge still clips a nonempty set
    const auto tiny = ball_growth_samples(m, dist, 0, {0.01});
    CHECK(tiny.rows[0].volume > 0.0);

    CHECK_THROWS_AS(ball_growth_samples(m, dist, 0, {0.5, 0.4}), RadiusOutOfRange);
    CHECK_THROWS_AS(ball_growth_samples(m, dist, 0, {5.0}), RadiusOutOfRange);
}

TEST_CASE("growth tables on model-metric meshes track the model") {
    // hyperbolic annulus [0.2, 2]: clipped shell volumes vs closed forms
    const auto h2 = build_model("hyperbolic", {}, 2, 1.0);
    auto mesh = build_annulus_mesh(0.2, 2.0, 0.04);
    apply_model_metric(mesh, h2);
    const auto rfield = interpolate(mesh, [](Real x, Real y) { return std::sqrt(x * x + y * y); });
    const Real vol_shell = sublevel_volume(mesh, rfield, 1.0);
    const Real expected = ball_volume(h2, 1.0) - ball_volume(h2, 0.2);
    CHECK(vol_shell == Catch::Approx(expected).epsilon(0.02));
    const Real circ = level_length(mesh, rfield, 1.0);
    CHECK(circ == Catch::Approx(sphere_area(h2, 1.0)).epsilon(0.02));
}
