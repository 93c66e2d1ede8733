#ifndef PARLAB_MESHGEN_HPP
#define PARLAB_MESHGEN_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "parlab/common.hpp"
#include "parlab/mesh.hpp"
#include "parlab/model.hpp"

namespace parlab {

namespace meshgen {

struct Ring {
    Real radius = 0;
    std::vector<Index> points; // vertex indices ordered by angle
    std::vector<Real> angles;
};

// Points on a circle arc. Closed rings stagger alternate rings by half a step
// (antiprism strips stay acute); open sectors pin both endpoints to the walls.
inline Ring make_ring(MeshManifold& m, Real r, Real th0, Real th1, Index n, bool closed,
                      bool stagger) {
    Ring ring;
    ring.radius = r;
    const Real span = th1 - th0;
    if (closed) {
        const Real dth = span / Real(n);
        for (Index i = 0; i < n; ++i) {
            const Real th = th0 + (Real(i) + (stagger ? 0.5 : 0.0)) * dth;
            ring.points.push_back(Index(m.vertices.size()));
            ring.angles.push_back(th);
            m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
        }
    } else {
        const Real dth = span / Real(n);
        ring.points.push_back(Index(m.vertices.size()));
        ring.angles.push_back(th0);
        m.vertices.push_back({r * std::cos(th0), r * std::sin(th0)});
        if (stagger) {
            for (Index i = 0; i < n; ++i) {
                const Real th = th0 + (Real(i) + 0.5) * dth;
                ring.points.push_back(Index(m.vertices.size()));
                ring.angles.push_back(th);
                m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
            }
        } else {
            for (Index i = 1; i < n; ++i) {
                const Real th = th0 + Real(i) * dth;
                ring.points.push_back(Index(m.vertices.size()));
                ring.angles.push_back(th);
                m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
            }
        }
        ring.points.push_back(Index(m.vertices.size()));
        ring.angles.push_back(th1);
        m.vertices.push_back({r * std::cos(th1), r * std::sin(th1)});
    }
    return ring;
}

// Triangulate the strip between two rings by merging the angle sequences.
inline void triangulate_strip(MeshManifold& m, const Ring& inner, const Ring& outer,
                              bool closed) {
    std::vector<Index> ip = inner.points, op = outer.points;
    std::vector<Real> ia = inner.angles, oa = outer.angles;
    if (closed) {
        // unroll: repeat the first point one period later
        const Real period = 2 * kPi;
        ip.push_back(ip.front());
        ia.push_back(ia.front() + period);
        op.push_back(op.front());
        oa.push_back(oa.front() + period);
    }
    std::size_t i = 0, j = 0;
    while (i + 1 < ip.size() || j + 1 < op.size()) {
        const bool can_i = i + 1 < ip.size();
        const bool can_j = j + 1 < op.size();
        bool advance_outer;
        if (!can_i) advance_outer = true;
        else if (!can_j) advance_outer = false;
        else advance_outer = oa[j + 1] <= ia[i + 1];
        if (advance_outer) {
            m.triangles.push_back({ip[i], op[j], op[j + 1]});
            ++j;
        } else {
            m.triangles.push_back({ip[i], op[j], ip[i + 1]});
            ++i;
        }
    }
}

inline void label_ring(MeshManifold& m, const Ring& ring, bool closed, BoundaryLabel label,
                       const std::string& marker) {
    for (std::size_t i = 0; i + 1 < ring.points.size(); ++i)
        m.boundary_edges.push_back({ring.points[i], ring.points[i + 1], label, marker});
    if (closed)
        m.boundary_edges.push_back({ring.points.back(), ring.points.front(), label, marker});
}

// Wall edges of a sector mesh: the chain of ring endpoints along theta = const.
inline void label_walls(MeshManifold& m, const std::vector<Ring>& rings, bool has_center,
                        Index center, const std::string& marker) {
    std::vector<Index> lo, hi;
    if (has_center) {
        lo.push_back(center);
        hi.push_back(center);
    }
    for (const auto& r : rings) {
        lo.push_back(r.points.front());
        hi.push_back(r.points.back());
    }
    for (std::size_t i = 0; i + 1 < lo.size(); ++i)
        m.boundary_edges.push_back({lo[i], lo[i + 1], BoundaryLabel::D1, marker});
    for (std::size_t i = 0; i + 1 < hi.size(); ++i)
        m.boundary_edges.push_back({hi[i], hi[i + 1], BoundaryLabel::D1, marker});
}

// Stiffness coupling of an interior edge (negated off-diagonal entry).
inline Real edge_coupling(const MeshManifold& m, Index t, Index vi, Index vj) {
    const TriGeom tg = tri_geom(m, t);
    int a = -1, b = -1;
    for (int k = 0; k < 3; ++k) {
        if (tg.v[k] == vi) a = k;
        if (tg.v[k] == vj) b = k;
    }
    return -tg.area * tg.ginv.quad(tg.grad[a], tg.grad[b]);
}

} // namespace meshgen

// Lawson-style improvement: flip interior edges whose stiffness coupling is
// negative beyond tolerance (the metric-aware Delaunay criterion). Boundary
// edges are never flipped. Triangles touched by a flip sit out the rest of
// the sweep; sweeps repeat until no edge wants flipping.
inline int delaunay_flip_pass(MeshManifold& m, Real tol = 1e-12, int max_sweeps = 50) {
    int total_flips = 0;
    std::set<std::pair<Index, Index>> boundary;
    for (const auto& be : m.boundary_edges) boundary.insert(detail::ekey(be.v0, be.v1));
    auto orient = [&](Index a, Index b, Index c) {
        return cross(m.vertices[std::size_t(b)] - m.vertices[std::size_t(a)],
                     m.vertices[std::size_t(c)] - m.vertices[std::size_t(a)]) > 0;
    };
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        auto et = edge_triangles(m);
        std::vector<char> dirty(std::size_t(m.num_triangles()), 0);
        int flips = 0;
        for (const auto& [e, ts] : et) {
            if (ts.size() != 2 || boundary.count(e)) continue;
            if (dirty[std::size_t(ts[0])] || dirty[std::size_t(ts[1])]) continue;
            const Real w = meshgen::edge_coupling(m, ts[0], e.first, e.second) +
                           meshgen::edge_coupling(m, ts[1], e.first, e.second);
            Real diag = 0;
            for (Index t : ts) {
                const TriGeom tg = tri_geom(m, t);
                for (int k = 0; k < 3; ++k)
                    diag = std::max(diag, tg.area * tg.ginv.quad(tg.grad[k]));
            }
            if (w >= -tol * std::max<Real>(1, diag)) continue;
            Index k0 = -1, k1 = -1;
            for (Index v : m.triangles[std::size_t(ts[0])])
                if (v != e.first && v != e.second) k0 = v;
            for (Index v : m.triangles[std::size_t(ts[1])])
                if (v != e.first && v != e.second) k1 = v;
            // flip to the k0-k1 diagonal; the quad must be strictly convex
            std::array<Index, 3> n0{}, n1{};
            if (orient(k0, k1, e.second) && orient(k1, k0, e.first)) {
                n0 = {k0, k1, e.second};
                n1 = {k1, k0, e.first};
            } else if (orient(k0, k1, e.first) && orient(k1, k0, e.second)) {
                n0 = {k0, k1, e.first};
                n1 = {k1, k0, e.second};
            } else {
                continue;
            }
            m.triangles[std::size_t(ts[0])] = n0;
            m.triangles[std::size_t(ts[1])] = n1;
            dirty[std::size_t(ts[0])] = dirty[std::size_t(ts[1])] = 1;
            ++flips;
        }
        total_flips += flips;
        if (flips == 0) break;
    }
    return total_flips;
}

// ---------------------------------------------------------------------------
// Generators. All produce consistently oriented, fully labeled flat meshes
// with target edge length h. Markers: disk "circle" (d1); annulus "inner",
// "outer" (d0); half variants add the diameter wall "wall" (d1) and use
// "arc" for the half-disk rim.
// ---------------------------------------------------------------------------

enum class RadialGrading { Uniform, LogPolar };

namespace meshgen {

inline std::vector<Real> uniform_radii(Real a, Real b, Real h) {
    const Index n = std::max<Index>(1, Index(std::llround((b - a) / h)));
    std::vector<Real> r(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k) r[std::size_t(k - 1)] = a + (b - a) * Real(k) / Real(n);
    return r;
}

inline std::vector<Real> logpolar_radii(Real a, Real b, Real h) {
    const Index n = std::max<Index>(1, Index(std::llround(std::log(b / a) * a / h)));
    const Real s = std::log(b / a) / Real(n);
    std::vector<Real> r(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k) r[std::size_t(k - 1)] = a * std::exp(s * Real(k));
    r.back() = b;
    return r;
}

// constant_count keeps one angular resolution across rings (self-similar
// log-polar cells); otherwise each ring targets arc length h.
inline MeshManifold ring_family_mesh(Real a, const std::vector<Real>& radii, Real h, bool half,
                                     bool constant_count, const std::string& inner_marker,
                                     const std::string& outer_marker) {
    if (!(a > 0) || radii.empty() || !(radii.front() > a))
        throw MeshingFailure("annulus needs 0 < a < b");
    MeshManifold m;
    const Real th0 = 0, th1 = half ? kPi : 2 * kPi;
    auto count_for = [&](Real r) {
        return std::max<Index>(half ? 6 : 12,
                               Index(std::llround((th1 - th0) * (constant_count ? a : r) / h)));
    };
    std::vector<Ring> rings;
    rings.push_back(make_ring(m, a, th0, th1, count_for(a), !half, false));
    bool st = true;
    for (Real r : radii) {
        rings.push_back(make_ring(m, r, th0, th1, count_for(r), !half, st));
        st = !st;
    }
    for (std::size_t k = 0; k + 1 < rings.size(); ++k)
        triangulate_strip(m, rings[k], rings[k + 1], !half);
    label_ring(m, rings.front(), !half, BoundaryLabel::D0, inner_marker);
    label_ring(m, rings.back(), !half, BoundaryLabel::D0, outer_marker);
    if (half) label_walls(m, rings, false, -1, "wall");
    return m;
}

} // namespace meshgen

inline MeshManifold build_annulus_mesh(Real a, Real b, Real h,
                                       RadialGrading grading = RadialGrading::Uniform) {
    if (!(a > 0) || !(b > a) || !(h > 0)) throw MeshingFailure("annulus needs 0 < a < b, h > 0");
    const auto radii = grading == RadialGrading::Uniform ? meshgen::uniform_radii(a, b, h)
                                                         : meshgen::logpolar_radii(a, b, h);
    auto m = meshgen::ring_family_mesh(a, radii, h, false, grading == RadialGrading::LogPolar, "inner", "outer");
    delaunay_flip_pass(m);
    return m;
}

inline MeshManifold build_half_annulus_mesh(Real a, Real b, Real h,
                                            RadialGrading grading = RadialGrading::Uniform) {
    if (!(a > 0) || !(b > a) || !(h > 0)) throw MeshingFailure("annulus needs 0 < a < b, h > 0");
    const auto radii = grading == RadialGrading::Uniform ? meshgen::uniform_radii(a, b, h)
                                                         : meshgen::logpolar_radii(a, b, h);
    auto m = meshgen::ring_family_mesh(a, radii, h, true, grading == RadialGrading::LogPolar, "inner", "outer");
    delaunay_flip_pass(m);
    return m;
}

namespace meshgen {

// Disk-type meshes: center fan plus strips. `ring_radii` must be increasing,
// last entry is the rim.
inline MeshManifold disk_from_rings(const std::vector<Real>& ring_radii, Real h, bool half,
                                    BoundaryLabel rim_label, const std::string& rim_marker) {
    MeshManifold m;
    m.vertices.push_back({0, 0});
    const Index center = 0;
    const Real th0 = 0, th1 = half ? kPi : 2 * kPi;
    std::vector<Ring> rings;
    bool st = false;
    for (std::size_t k = 0; k < ring_radii.size(); ++k) {
        const Real frac = ring_radii[k] / ring_radii.back();
        const Index n = std::max<Index>(
            half ? 3 : 6, Index(std::llround((th1 - th0) * ring_radii.back() * frac / h)));
        rings.push_back(make_ring(m, ring_radii[k], th0, th1, n, !half, st));
        st = !st;
    }
    // center fan
    const auto& r0 = rings.front();
    const std::size_t n0 = r0.points.size();
    for (std::size_t i = 0; i + 1 < n0; ++i)
        m.triangles.push_back({center, r0.points[i], r0.points[i + 1]});
    if (!half) m.triangles.push_back({center, r0.points.back(), r0.points.front()});
    for (std::size_t k = 0; k + 1 < rings.size(); ++k)
        triangulate_strip(m, rings[k], rings[k + 1], !half);
    label_ring(m, rings.back(), !half, rim_label, rim_marker);
    if (half) label_walls(m, rings, true, center, "wall");
    return m;
}

} // namespace meshgen

// Flat disk; the rim is the true manifold boundary (marker "circle").
inline MeshManifold build_disk_mesh(Real radius, Real h) {
    if (!(radius > 0) || !(h > 0)) throw MeshingFailure("disk needs radius > 0, h > 0");
    const Index n = std::max<Index>(2, Index(std::llround(radius / h)));
    std::vector<Real> rings(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k) rings[std::size_t(k - 1)] = radius * Real(k) / Real(n);
    auto m = meshgen::disk_from_rings(rings, h, false, BoundaryLabel::D1, "circle");
    delaunay_flip_pass(m);
    return m;
}

// Disk graded so that rings are uniform in spherical arc length for a cap of
// curvature radius R0 >= radius; resolves the rim gradient of cap solutions.
inline MeshManifold build_disk_mesh_cap_graded(Real radius, Real h, Real R0) {
    if (!(radius > 0) || !(h > 0) || !(R0 >= radius))
        throw MeshingFailure("cap grading needs 0 < radius <= R0");
    const Real phi_max = std::asin(radius / R0);
    const Index n = std::max<Index>(2, Index(std::llround(phi_max * R0 / h)));
    std::vector<Real> rings(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k)
        rings[std::size_t(k - 1)] = R0 * std::sin(phi_max * Real(k) / Real(n));
    rings.back() = radius;
    auto m = meshgen::disk_from_rings(rings, h, false, BoundaryLabel::D1, "circle");
    delaunay_flip_pass(m);
    return m;
}

// Half-disk {|x| <= radius, y >= 0}: semicircle d0 "arc", diameter d1 "wall".
inline MeshManifold build_halfdisk_mesh(Real radius, Real h) {
    if (!(radius > 0) || !(h > 0)) throw MeshingFailure("half-disk needs radius > 0, h > 0");
    const Index n = std::max<Index>(2, Index(std::llround(radius / h)));
    std::vector<Real> rings(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k) rings[std::size_t(k - 1)] = radius * Real(k) / Real(n);
    auto m = meshgen::disk_from_rings(rings, h, true, BoundaryLabel::D0, "arc");
    delaunay_flip_pass(m);
    return m;
}

// ---------------------------------------------------------------------------
// Model-metric meshes. A rotationally symmetric m-model reduces to a 2-D
// warped product with warp F(r) = f(r)^{m-1}; in the chart the metric is
//   g = e_r e_r^T + (F(r)/r)^2 e_th e_th^T,
// evaluated per triangle at the centroid. Capacities and volumes measured on
// such a mesh recover the model values after multiplication by
// capacity_scale = sector * omega_{m-1} / meshed_angle.
// ---------------------------------------------------------------------------

inline void apply_model_metric(MeshManifold& mesh, const ModelManifold& model) {
    mesh.metric.resize(std::size_t(mesh.num_triangles()));
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[std::size_t(t)];
        Vec2 c{0, 0};
        for (int k = 0; k < 3; ++k) c += (1.0 / 3.0) * mesh.vertices[std::size_t(tri[k])];
        const Real r = norm(c);
        if (!(r > 0)) throw MeshingFailure("model metric undefined at the origin");
        const Vec2 er = (1.0 / r) * c;
        const Real F = std::pow(model.warp(r), model.dim() - 1);
        const Real w = sq(F / r);
        // er er^T + w * et et^T with et = perp(er)
        mesh.metric[std::size_t(t)] = {er.x * er.x + w * er.y * er.y,
                                       er.x * er.y - w * er.x * er.y,
                                       er.y * er.y + w * er.x * er.x};
    }
}

inline Real model_capacity_scale(const ModelManifold& model, bool half_mesh) {
    const Real meshed_angle = half_mesh ? kPi : 2 * kPi;
    return model.sector_fraction() * unit_sphere_area(model.dim()) / meshed_angle;
}

// Ring radii graded toward metric isotropy: radial steps follow dth * F(r),
// clamped so that strongly warped models stay meshable. The grading never
// looks at b, so the rings of a small mesh are a prefix of a larger one and
// truncation families stay nested.
inline std::vector<Real> model_graded_radii(const ModelManifold& model, Real a, Real b, Real h) {
    const Real dth = h / a;
    const Real step_max = 4 * h;
    const Real step_min = h / 4;
    std::vector<Real> radii;
    Real r = a;
    while (r < b) {
        const Real F = std::pow(model.warp(r), model.dim() - 1);
        const Real step = std::clamp(dth * F, step_min, step_max);
        r = std::min(b, r + step);
        radii.push_back(r);
    }
    if (radii.size() < 2) radii = meshgen::uniform_radii(a, b, (b - a) / 2);
    radii.back() = b;
    return radii;
}

namespace meshgen {

// Half models live on the parameter rectangle [a, b] x [0, pi] where the
// warped metric is exactly diagonal: diag(1, F(r)^2) with F = f^{m-1}. The
// rotated polar form would lose the determinant to cancellation once the
// anisotropy F/r exceeds ~1e6.
inline MeshManifold model_rect_mesh(const ModelManifold& model, Real a,
                                    const std::vector<Real>& radii, Real h) {
    MeshManifold m;
    const Real th1 = kPi;
    const Index n_theta = std::max<Index>(6, Index(std::llround(th1 * a / h)));
    auto make_column = [&](Real r, bool stagger) {
        Ring col;
        col.radius = r;
        const Real dth = th1 / Real(n_theta);
        auto push = [&](Real th) {
            col.points.push_back(Index(m.vertices.size()));
            col.angles.push_back(th);
            m.vertices.push_back({r, th});
        };
        push(0.0);
        if (stagger)
            for (Index i = 0; i < n_theta; ++i) push((Real(i) + 0.5) * dth);
        else
            for (Index i = 1; i < n_theta; ++i) push(Real(i) * dth);
        push(th1);
        return col;
    };
    std::vector<Ring> cols;
    cols.push_back(make_column(a, false));
    bool st = true;
    for (Real r : radii) {
        cols.push_back(make_column(r, st));
        st = !st;
    }
    for (std::size_t k = 0; k + 1 < cols.size(); ++k)
        triangulate_strip(m, cols[k], cols[k + 1], false);
    label_ring(m, cols.front(), false, BoundaryLabel::D0, "inner");
    label_ring(m, cols.back(), false, BoundaryLabel::D0, "outer");
    label_walls(m, cols, false, -1, "wall");

    m.metric.resize(std::size_t(m.num_triangles()));
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[std::size_t(t)];
        Real r = 0;
        for (int k = 0; k < 3; ++k) r += m.vertices[std::size_t(tri[k])].x / 3.0;
        const Real F = std::pow(model.warp(r), model.dim() - 1);
        m.metric[std::size_t(t)] = {1.0, 0.0, F * F};
    }
    return m;
}

} // namespace meshgen

// Annular mesh of the model between radii a and b; half models (sector 1/2)
// use the parameter rectangle and carry d1 walls, full models the polar
// chart. Returns the mesh with metric applied.
inline MeshManifold build_model_annulus_mesh(const ModelManifold& model, Real a, Real b, Real h,
                                             std::vector<Real> radii = {}) {
    const bool half = std::abs(model.sector_fraction() - 0.5) < 1e-12;
    if (!half && std::abs(model.sector_fraction() - 1.0) > 1e-12)
        throw MeshingFailure("only full and half models are meshable");
    if (radii.empty()) radii = model_graded_radii(model, a, b, h);
    if (half) {
        auto m = meshgen::model_rect_mesh(model, a, radii, h);
        delaunay_flip_pass(m);
        return m;
    }
    for (Real r : radii) {
        const Real F = std::pow(model.warp(r), model.dim() - 1);
        if (F / r > 1e6 || F / r < 1e-6)
            throw MeshingFailure("model too anisotropic for the polar chart; reduce the radius");
    }
    auto m = meshgen::ring_family_mesh(a, radii, h, false, true, "inner", "outer");
    apply_model_metric(m, model);
    delaunay_flip_pass(m);
    return m;
}

} // namespace parlab

#endif
