#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "parlab/mesh.hpp"
#include "parlab/mesh_io.hpp"
#include "parlab/meshgen.hpp"
#include "parlab/fem.hpp"
#include "parlab/model.hpp"

using namespace parlab;

TEST_CASE("disk mesh: area, labels, validity") {
    const auto m = build_disk_mesh(1.0, 0.1);
    validate(m);
    CHECK(total_area(m) == Catch::Approx(kPi).margin(0.02 * kPi)); // polygonal deficit
    CHECK(euler_characteristic(m) == 1);
    for (const auto& be : m.boundary_edges) CHECK(be.label == BoundaryLabel::D1);
}

TEST_CASE("annulus mesh: two loops, euler characteristic zero") {
    const auto m = build_annulus_mesh(1.0, 2.0, 0.05);
    validate(m);
    CHECK(euler_characteristic(m) == 0);
    CHECK_FALSE(vertices_on_marker(m, "inner").empty());
    CHECK_FALSE(vertices_on_marker(m, "outer").empty());
    CHECK(total_area(m) == Catch::Approx(3 * kPi).margin(0.02 * 3 * kPi));
    // area shrinks under the polygonal approximation, never grows
    CHECK(total_area(m) < 3 * kPi);
}

TEST_CASE("half-disk mesh: wall length and labels") {
    const auto m = build_halfdisk_mesh(1.0, 0.1);
    validate(m);
    CHECK(total_boundary_length(m, BoundaryLabel::D1) == Catch::Approx(2.0).epsilon(0.02));
    CHECK_FALSE(vertices_on_marker(m, "arc").empty());
    CHECK_FALSE(vertices_on_marker(m, "wall").empty());
    CHECK(total_area(m) == Catch::Approx(kPi / 2).margin(0.02 * kPi));
}

TEST_CASE("half-annulus mesh carries d1 walls") {
    const auto m = build_half_annulus_mesh(1.0, 2.0, 0.1);
    validate(m);
    const Real wall = total_boundary_length(m, BoundaryLabel::D1);
    CHECK(wall == Catch::Approx(2.0).epsilon(1e-9)); // two straight radial walls
}

TEST_CASE("refine: 1->4 split preserves area, doubles boundary edges") {
    const auto m = build_annulus_mesh(1.0, 2.0, 0.2);
    const auto r = refine(m);
    validate(r);
    CHECK(r.num_triangles() == 4 * m.num_triangles());
    CHECK(r.boundary_edges.size() == 2 * m.boundary_edges.size());
    CHECK(total_area(r) == Catch::Approx(total_area(m)).epsilon(1e-13));
    // labels inherited
    for (const auto& be : r.boundary_edges)
        CHECK((be.marker == "inner" || be.marker == "outer"));

    // explicit metrics are copied to children
    const auto h2 = build_model("hyperbolic", {}, 2, 0.5);
    const auto wm = build_model_annulus_mesh(h2, 1.0, 3.0, 0.2);
    const auto wr = refine(wm);
    validate(wr);
    REQUIRE(wr.metric.size() == 4 * wm.metric.size());
    for (Index t = 0; t < wm.num_triangles(); ++t)
        for (int k = 0; k < 4; ++k)
            CHECK(wr.metric[std::size_t(4 * t + k)].c == wm.metric[std::size_t(t)].c);
}

namespace {
// most negative stiffness coupling relative to the diagonal scale
parlab::Real worst_coupling(const parlab::MeshManifold& m) {
    const auto S = parlab::assemble_stiffness(m);
    parlab::Real worst = 0;
    for (int col = 0; col < S.outerSize(); ++col)
        for (parlab::SparseMatrix::InnerIterator it(S, col); it; ++it)
            if (it.row() != it.col())
                worst = std::min(worst, -it.value() / S.coeff(it.row(), it.row()));
    return worst;
}
} // namespace

TEST_CASE("generated meshes keep non-negative stiffness couplings") {
    // the maximum principle and the vertex walk need couplings >= 0
    for (const auto& m : {build_annulus_mesh(1.0, 2.0, 0.1), build_disk_mesh(1.0, 0.1),
                          build_half_annulus_mesh(1.0, 4.0, 0.2, RadialGrading::LogPolar),
                          build_halfdisk_mesh(1.0, 0.1)}) {
        CHECK(worst_coupling(m) >= -1e-12);
        // obtuse triangles are permitted but stay rare
        CHECK(obtuse_triangle_count(m) <= m.num_triangles() / 10);
    }
}

TEST_CASE("mesh json round trip") {
    const auto m = build_half_annulus_mesh(1.0, 2.0, 0.25);
    const auto path = std::filesystem::temp_directory_path() / "parlab_mesh_roundtrip.json";
    save_mesh(m, path.string());
    const auto r = load_mesh(path.string());
    REQUIRE(r.num_vertices() == m.num_vertices());
    REQUIRE(r.num_triangles() == m.num_triangles());
    REQUIRE(r.boundary_edges.size() == m.boundary_edges.size());
    for (Index v = 0; v < m.num_vertices(); ++v) {
        CHECK(r.vertices[std::size_t(v)].x == m.vertices[std::size_t(v)].x);
        CHECK(r.vertices[std::size_t(v)].y == m.vertices[std::size_t(v)].y);
    }
    for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
        CHECK(r.boundary_edges[i].v0 == m.boundary_edges[i].v0);
        CHECK(r.boundary_edges[i].label == m.boundary_edges[i].label);
        CHECK(r.boundary_edges[i].marker == m.boundary_edges[i].marker);
    }
    std::filesystem::remove(path);
}

TEST_CASE("reader accepts any key order") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "parlab_reordered.json";
    {
        std::ofstream out(path);
        out << R"({"metric":null,"boundary_edges":[{"marker":"a","v":[0,1],"label":"d0"},)"
            << R"({"label":"d0","v":[1,2],"marker":"a"},{"v":[2,0],"label":"d1","marker":"b"}],)"
            << R"("triangles":[[0,1,2]],"vertices":[[0,0],[1,0],[0,1]],"dim":2})";
    }
    const auto m = load_mesh(path.string());
    CHECK(m.num_triangles() == 1);
    CHECK(m.boundary_edges[2].label == BoundaryLabel::D1);
    fs::remove(path);
}

TEST_CASE("metric meshes round trip through json") {
    const auto h2 = build_model("hyperbolic", {}, 2, 0.5);
    const auto m = build_model_annulus_mesh(h2, 1.0, 4.0, 0.2);
    REQUIRE(m.has_metric());
    const auto path = std::filesystem::temp_directory_path() / "parlab_metric_roundtrip.json";
    save_mesh(m, path.string());
    const auto r = load_mesh(path.string());
    REQUIRE(r.has_metric());
    REQUIRE(r.metric.size() == m.metric.size());
    for (std::size_t t = 0; t < m.metric.size(); ++t) {
        CHECK(r.metric[t].a == m.metric[t].a);
        CHECK(r.metric[t].b == m.metric[t].b);
        CHECK(r.metric[t].c == m.metric[t].c);
    }
    std::filesystem::remove(path);
}

TEST_CASE("load rejects invalid meshes") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "parlab_bad_mesh.json";

    // dangling triangle index
    {
        std::ofstream out(path);
        out << R"({"dim":2,"vertices":[[0,0],[1,0],[0,1]],"triangles":[[0,1,7]],)"
            << R"("boundary_edges":[],"metric":null})";
    }
    CHECK_THROWS_AS(load_mesh(path.string()), InvariantViolation);

    // unlabeled boundary edge: one triangle, only one of three edges labeled
    {
        std::ofstream out(path);
        out << R"({"dim":2,"vertices":[[0,0],[1,0],[0,1]],"triangles":[[0,1,2]],)"
            << R"("boundary_edges":[{"v":[0,1],"label":"d0","marker":"a"}],"metric":null})";
    }
    CHECK_THROWS_AS(load_mesh(path.string()), InvariantViolation);

    // malformed json
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_mesh(path.string()), ParseError);

    CHECK_THROWS_AS(load_mesh("/nonexistent/path/mesh.json"), IoError);
    fs::remove(path);
}

TEST_CASE("model metric meshes have positive definite metrics") {
    const auto h2 = build_model("hyperbolic", {}, 2, 0.5);
    const auto m = build_model_annulus_mesh(h2, 1.0, 4.0, 0.1);
    validate(m);
    REQUIRE(m.has_metric());
    for (const auto& g : m.metric) CHECK(g.det() > 0);
    // flat model metric reduces to the identity
    const auto flat = build_model("euclidean", {}, 2, 1.0);
    auto mf = build_annulus_mesh(1.0, 2.0, 0.2);
    apply_model_metric(mf, flat);
    for (const auto& g : mf.metric) {
        CHECK(g.a == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(g.c == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(g.b) < 1e-12);
    }
}

TEST_CASE("submesh truncation keeps labels and exposes a cut") {
    const auto master = build_annulus_mesh(1.0, 4.0, 0.15, RadialGrading::LogPolar);
    const auto sub = extract_submesh(
        master, [&](Index v) { return norm(master.vertices[std::size_t(v)]) <= 2.0 + 1e-9; },
        "cut");
    validate(sub.mesh);
    CHECK_FALSE(vertices_on_marker(sub.mesh, "inner").empty());
    CHECK_FALSE(vertices_on_marker(sub.mesh, "cut").empty());
    CHECK(vertices_on_marker(sub.mesh, "outer").empty());
}
