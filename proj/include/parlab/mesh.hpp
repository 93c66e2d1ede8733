#ifndef PARLAB_MESH_HPP
#define PARLAB_MESH_HPP

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "parlab/common.hpp"

namespace parlab {

enum class BoundaryLabel { D0, D1 };

inline std::string to_string(BoundaryLabel l) { return l == BoundaryLabel::D0 ? "d0" : "d1"; }

struct BoundaryEdge {
    Index v0 = 0, v1 = 0;
    BoundaryLabel label = BoundaryLabel::D0;
    std::string marker;
};

// Triangulated 2-manifold with boundary. Vertices live in a 2-D chart; an
// optional third coordinate is kept for embedded surfaces and, when present
// without an explicit metric, induces the first fundamental form. Boundary
// edges are labeled d0 (artificial/exhaustion boundary) or d1 (true manifold
// boundary) and carry a marker naming their component.
struct MeshManifold {
    std::vector<Vec2> vertices;
    std::vector<Real> heights; // optional z per vertex; empty for flat meshes
    std::vector<std::array<Index, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<SymMat2> metric; // optional, one entry per triangle

    Index num_vertices() const { return Index(vertices.size()); }
    Index num_triangles() const { return Index(triangles.size()); }
    bool has_metric() const { return !metric.empty(); }
    bool has_heights() const { return !heights.empty(); }

    SymMat2 triangle_metric(Index t) const {
        if (has_metric()) return metric[std::size_t(t)];
        if (has_heights()) {
            const auto& tri = triangles[std::size_t(t)];
            const Vec2 e1 = vertices[tri[1]] - vertices[tri[0]];
            const Vec2 e2 = vertices[tri[2]] - vertices[tri[0]];
            const Real det = cross(e1, e2);
            const Real dz1 = heights[tri[1]] - heights[tri[0]];
            const Real dz2 = heights[tri[2]] - heights[tri[0]];
            // chart gradient of z, then G = I + dz dz^T
            const Vec2 gz = (1.0 / det) * Vec2(dz1 * e2.y - dz2 * e1.y, dz2 * e1.x - dz1 * e2.x);
            return {1 + gz.x * gz.x, gz.x * gz.y, 1 + gz.y * gz.y};
        }
        return SymMat2::identity();
    }
};

// Per-vertex piecewise-linear field.
struct ScalarField {
    const MeshManifold* mesh = nullptr;
    std::vector<Real> values;

    ScalarField() = default;
    ScalarField(const MeshManifold& m, Real fill = 0)
        : mesh(&m), values(std::size_t(m.num_vertices()), fill) {}
    ScalarField(const MeshManifold& m, std::vector<Real> v) : mesh(&m), values(std::move(v)) {
        if (Index(values.size()) != m.num_vertices())
            throw InvariantViolation("scalar field size does not match vertex count");
    }

    Real& operator[](Index i) { return values[std::size_t(i)]; }
    Real operator[](Index i) const { return values[std::size_t(i)]; }
};

// Per-triangle constant vector field; components are contravariant in the
// mesh chart coordinates.
struct VectorField {
    const MeshManifold* mesh = nullptr;
    std::vector<Vec2> vectors;

    VectorField() = default;
    explicit VectorField(const MeshManifold& m)
        : mesh(&m), vectors(std::size_t(m.num_triangles())) {}

    Vec2& operator[](Index t) { return vectors[std::size_t(t)]; }
    const Vec2& operator[](Index t) const { return vectors[std::size_t(t)]; }
};

inline void require_same_mesh(const MeshManifold& m, const ScalarField& f) {
    if (f.mesh != &m || Index(f.values.size()) != m.num_vertices())
        throw MeshMismatch("scalar field not defined on this mesh");
}

inline void require_same_mesh(const MeshManifold& m, const VectorField& f) {
    if (f.mesh != &m || Index(f.vectors.size()) != m.num_triangles())
        throw MeshMismatch("vector field not defined on this mesh");
}

inline void require_finite(const ScalarField& f) {
    for (Real v : f.values)
        if (!finite(v)) throw PreconditionViolated("scalar field has non-finite values");
}

// ---------------------------------------------------------------------------
// Triangle-local geometry.
// ---------------------------------------------------------------------------

struct TriGeom {
    std::array<Index, 3> v;
    Vec2 p[3];
    Vec2 grad[3];    // chart gradients of the three hat functions
    SymMat2 g;       // metric
    SymMat2 ginv;
    Real chart_area; // Euclidean chart area
    Real area;       // Riemannian area = chart_area * sqrt(det g)
};

inline TriGeom tri_geom(const MeshManifold& m, Index t) {
    TriGeom tg;
    tg.v = m.triangles[std::size_t(t)];
    for (int k = 0; k < 3; ++k) tg.p[k] = m.vertices[std::size_t(tg.v[k])];
    const Vec2 e1 = tg.p[1] - tg.p[0];
    const Vec2 e2 = tg.p[2] - tg.p[0];
    const Real det = cross(e1, e2);
    if (!(det > 0)) throw InvariantViolation("triangle with non-positive chart area");
    tg.chart_area = 0.5 * det;
    tg.grad[1] = (-1.0 / det) * perp(e2);
    tg.grad[2] = (1.0 / det) * perp(e1);
    tg.grad[0] = Vec2{0, 0} - tg.grad[1] - tg.grad[2];
    tg.g = m.triangle_metric(t);
    const Real gd = tg.g.det();
    if (!(gd > 0)) throw InvariantViolation("metric determinant must be positive");
    tg.ginv = tg.g.inverse();
    tg.area = tg.chart_area * std::sqrt(gd);
    return tg;
}

// Chart gradient of a P1 field on triangle t (a covector; pair with ginv).
// Difference form: constant shifts drop out before any rounding.
inline Vec2 chart_gradient(const TriGeom& tg, const ScalarField& u) {
    return (u[tg.v[1]] - u[tg.v[0]]) * tg.grad[1] + (u[tg.v[2]] - u[tg.v[0]]) * tg.grad[2];
}

inline Real metric_edge_length(const SymMat2& g, const Vec2& chart_edge) {
    return std::sqrt(g.quad(chart_edge));
}

// Flux of the per-triangle field X through a chart segment (a -> b), outward
// for a triangle lying to the LEFT of the segment: sqrt(det g) * X . n with
// n the right-hand chart normal of (b - a).
inline Real metric_edge_flux(const SymMat2& g, const Vec2& X, const Vec2& a, const Vec2& b) {
    const Vec2 t = b - a;
    const Vec2 n{t.y, -t.x};
    return std::sqrt(g.det()) * dot(X, n);
}

// ---------------------------------------------------------------------------
// Topology checks and queries.
// ---------------------------------------------------------------------------

namespace detail {
inline std::pair<Index, Index> ekey(Index a, Index b) { return {std::min(a, b), std::max(a, b)}; }
} // namespace detail

// Undirected edge -> incident triangle count and orientation bookkeeping.
inline std::map<std::pair<Index, Index>, std::vector<Index>> edge_triangles(const MeshManifold& m) {
    std::map<std::pair<Index, Index>, std::vector<Index>> et;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[std::size_t(t)];
        for (int k = 0; k < 3; ++k)
            et[detail::ekey(tri[k], tri[(k + 1) % 3])].push_back(t);
    }
    return et;
}

// Full invariant scan: edge-manifoldness, label exhaustiveness, orientation
// consistency, metric positivity, index ranges.
inline void validate(const MeshManifold& m) {
    const Index nv = m.num_vertices();
    if (m.has_heights() && Index(m.heights.size()) != nv)
        throw InvariantViolation("height count does not match vertex count");
    if (m.has_metric() && Index(m.metric.size()) != m.num_triangles())
        throw InvariantViolation("metric count does not match triangle count");
    for (const auto& p : m.vertices)
        if (!finite(p.x) || !finite(p.y)) throw InvariantViolation("non-finite vertex position");

    std::map<std::pair<Index, Index>, int> count;
    std::map<std::pair<Index, Index>, int> directed;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[std::size_t(t)];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= nv) throw InvariantViolation("triangle index out of range");
            const Index a = tri[k], b = tri[(k + 1) % 3];
            if (a == b) throw InvariantViolation("degenerate triangle edge");
            ++count[detail::ekey(a, b)];
            ++directed[{a, b}];
        }
        (void)tri_geom(m, t); // orientation + metric positivity
    }
    for (const auto& [e, c] : count) {
        if (c > 2) throw InvariantViolation("edge shared by more than two triangles");
        if (c == 2 && directed[{e.first, e.second}] != 1)
            throw InvariantViolation("inconsistent orientation across an interior edge");
    }
    std::set<std::pair<Index, Index>> labeled;
    for (const auto& be : m.boundary_edges) {
        if (be.v0 < 0 || be.v0 >= nv || be.v1 < 0 || be.v1 >= nv)
            throw InvariantViolation("boundary edge index out of range");
        const auto key = detail::ekey(be.v0, be.v1);
        auto it = count.find(key);
        if (it == count.end() || it->second != 1)
            throw InvariantViolation("labeled edge is not a topological boundary edge");
        if (!labeled.insert(key).second) throw InvariantViolation("boundary edge labeled twice");
    }
    for (const auto& [e, c] : count)
        if (c == 1 && !labeled.count(e))
            throw InvariantViolation("unlabeled topological boundary edge");
}

inline Index euler_characteristic(const MeshManifold& m) {
    std::set<std::pair<Index, Index>> edges;
    for (const auto& tri : m.triangles)
        for (int k = 0; k < 3; ++k) edges.insert(detail::ekey(tri[k], tri[(k + 1) % 3]));
    return m.num_vertices() - Index(edges.size()) + m.num_triangles();
}

// Number of triangles with an obtuse metric angle. Strictly non-obtuse meshes
// make the stiffness couplings non-negative triangle by triangle.
inline Index obtuse_triangle_count(const MeshManifold& m, Real tol = 1e-14) {
    Index n = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        for (int k = 0; k < 3; ++k) {
            const Vec2 u = tg.p[(k + 1) % 3] - tg.p[k];
            const Vec2 w = tg.p[(k + 2) % 3] - tg.p[k];
            if (tg.g.quad(u, w) < -tol * std::sqrt(tg.g.quad(u) * tg.g.quad(w))) {
                ++n;
                break;
            }
        }
    }
    return n;
}

inline std::vector<Index> vertices_on_marker(const MeshManifold& m, const std::string& marker) {
    std::set<Index> s;
    for (const auto& be : m.boundary_edges)
        if (be.marker == marker) {
            s.insert(be.v0);
            s.insert(be.v1);
        }
    return {s.begin(), s.end()};
}

inline std::vector<Index> vertices_on_label(const MeshManifold& m, BoundaryLabel label) {
    std::set<Index> s;
    for (const auto& be : m.boundary_edges)
        if (be.label == label) {
            s.insert(be.v0);
            s.insert(be.v1);
        }
    return {s.begin(), s.end()};
}

inline Real total_boundary_length(const MeshManifold& m, BoundaryLabel label) {
    // boundary edges belong to exactly one triangle; measure with its metric
    auto et = edge_triangles(m);
    Real len = 0;
    for (const auto& be : m.boundary_edges) {
        if (be.label != label) continue;
        const auto& ts = et[detail::ekey(be.v0, be.v1)];
        const SymMat2 g = m.triangle_metric(ts.front());
        len += metric_edge_length(g, m.vertices[std::size_t(be.v1)] - m.vertices[std::size_t(be.v0)]);
    }
    return len;
}

inline Real total_area(const MeshManifold& m) {
    Real a = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) a += tri_geom(m, t).area;
    return a;
}

// ---------------------------------------------------------------------------
// Uniform 1 -> 4 refinement at edge midpoints. Boundary labels are inherited;
// explicit metrics are copied to the children (P0), embeddings re-induce.
// ---------------------------------------------------------------------------

inline MeshManifold refine(const MeshManifold& m) {
    MeshManifold out;
    out.vertices = m.vertices;
    out.heights = m.heights;
    std::map<std::pair<Index, Index>, Index> midpoint;
    auto mid = [&](Index a, Index b) {
        const auto key = detail::ekey(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const Index idx = Index(out.vertices.size());
        out.vertices.push_back(0.5 * (m.vertices[std::size_t(a)] + m.vertices[std::size_t(b)]));
        if (m.has_heights())
            out.heights.push_back(0.5 * (m.heights[std::size_t(a)] + m.heights[std::size_t(b)]));
        midpoint.emplace(key, idx);
        return idx;
    };
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[std::size_t(t)];
        const Index a = tri[0], b = tri[1], c = tri[2];
        const Index ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        out.triangles.push_back({a, ab, ca});
        out.triangles.push_back({ab, b, bc});
        out.triangles.push_back({ca, bc, c});
        out.triangles.push_back({ab, bc, ca});
        if (m.has_metric())
            for (int k = 0; k < 4; ++k) out.metric.push_back(m.metric[std::size_t(t)]);
    }
    for (const auto& be : m.boundary_edges) {
        const Index mm = mid(be.v0, be.v1);
        out.boundary_edges.push_back({be.v0, mm, be.label, be.marker});
        out.boundary_edges.push_back({mm, be.v1, be.label, be.marker});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Submesh extraction: keep the triangles whose vertices all satisfy `keep`.
// Surviving parent boundary edges retain label and marker; newly exposed
// edges become d0 with `cut_marker`. Used to truncate a master mesh into a
// nested exhaustion, which makes discrete monotonicity exact.
// ---------------------------------------------------------------------------

struct Submesh {
    MeshManifold mesh;
    std::vector<Index> vertex_map;  // new index -> parent index
    std::vector<Index> parent_to_sub; // parent index -> new index or -1
};

template <class KeepVertex>
Submesh extract_submesh(const MeshManifold& m, KeepVertex keep,
                        const std::string& cut_marker = "cut") {
    Submesh out;
    out.parent_to_sub.assign(std::size_t(m.num_vertices()), -1);
    std::vector<char> kept(std::size_t(m.num_vertices()), 0);
    for (Index v = 0; v < m.num_vertices(); ++v) kept[std::size_t(v)] = keep(v) ? 1 : 0;

    std::map<std::pair<Index, Index>, int> edge_count;
    std::vector<std::array<Index, 3>> kept_tris;
    for (const auto& tri : m.triangles) {
        if (!kept[std::size_t(tri[0])] || !kept[std::size_t(tri[1])] || !kept[std::size_t(tri[2])])
            continue;
        kept_tris.push_back(tri);
        for (int k = 0; k < 3; ++k) ++edge_count[detail::ekey(tri[k], tri[(k + 1) % 3])];
    }
    if (kept_tris.empty()) throw MeshingFailure("submesh predicate keeps no triangle");

    auto remap = [&](Index v) {
        if (out.parent_to_sub[std::size_t(v)] < 0) {
            out.parent_to_sub[std::size_t(v)] = Index(out.vertex_map.size());
            out.vertex_map.push_back(v);
            out.mesh.vertices.push_back(m.vertices[std::size_t(v)]);
            if (m.has_heights()) out.mesh.heights.push_back(m.heights[std::size_t(v)]);
        }
        return out.parent_to_sub[std::size_t(v)];
    };

    std::set<std::pair<Index, Index>> parent_boundary;
    for (const auto& be : m.boundary_edges) parent_boundary.insert(detail::ekey(be.v0, be.v1));

    Index t_parent = 0;
    for (const auto& tri : m.triangles) {
        const bool in = kept[std::size_t(tri[0])] && kept[std::size_t(tri[1])] && kept[std::size_t(tri[2])];
        if (in) {
            out.mesh.triangles.push_back({remap(tri[0]), remap(tri[1]), remap(tri[2])});
            if (m.has_metric()) out.mesh.metric.push_back(m.metric[std::size_t(t_parent)]);
        }
        ++t_parent;
    }
    for (const auto& be : m.boundary_edges) {
        auto it = edge_count.find(detail::ekey(be.v0, be.v1));
        if (it != edge_count.end() && it->second == 1)
            out.mesh.boundary_edges.push_back({remap(be.v0), remap(be.v1), be.label, be.marker});
    }
    for (const auto& [e, c] : edge_count) {
        if (c != 1 || parent_boundary.count(e)) continue;
        // expose with the orientation of the single kept triangle
        bool emitted = false;
        for (const auto& tri : kept_tris) {
            for (int k = 0; k < 3 && !emitted; ++k) {
                const Index a = tri[k], b = tri[(k + 1) % 3];
                if (detail::ekey(a, b) == e) {
                    out.mesh.boundary_edges.push_back(
                        {remap(a), remap(b), BoundaryLabel::D0, cut_marker});
                    emitted = true;
                }
            }
            if (emitted) break;
        }
    }
    return out;
}

} // namespace parlab

#endif
