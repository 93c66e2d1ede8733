#ifndef PARLAB_CLIPPING_HPP
#define PARLAB_CLIPPING_HPP

#include <algorithm>
#include <vector>

#include "parlab/common.hpp"
#include "parlab/mesh.hpp"

namespace parlab {

namespace clip {

// Chart polygon area of {phi <= c} inside one triangle, with phi linear on
// the triangle. Exact for P1 fields.
inline Real sublevel_chart_area(const Vec2 p[3], const Real phi[3], Real c) {
    std::vector<Vec2> poly;
    for (int k = 0; k < 3; ++k) {
        const int k1 = (k + 1) % 3;
        const Real fa = phi[k] - c, fb = phi[k1] - c;
        if (fa <= 0) poly.push_back(p[k]);
        if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
            const Real t = fa / (fa - fb);
            poly.push_back(p[k] + t * (p[k1] - p[k]));
        }
    }
    if (poly.size() < 3) return 0;
    Real twice = 0;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        twice += cross(poly[i] - poly[0], poly[i + 1] - poly[0]);
    return 0.5 * twice;
}

// Chart endpoints of the level segment {phi = c} inside one triangle; returns
// false when the level set misses the triangle interior.
inline bool level_segment(const Vec2 p[3], const Real phi[3], Real c, Vec2& a, Vec2& b) {
    Vec2 pts[3];
    int n = 0;
    for (int k = 0; k < 3 && n < 3; ++k) {
        const int k1 = (k + 1) % 3;
        const Real fa = phi[k] - c, fb = phi[k1] - c;
        if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
            const Real t = fa / (fa - fb);
            pts[n++] = p[k] + t * (p[k1] - p[k]);
        }
    }
    if (n != 2) return false;
    a = pts[0];
    b = pts[1];
    return true;
}

} // namespace clip

// Riemannian measure of {phi < c} by exact sub-triangle clipping.
inline Real sublevel_volume(const MeshManifold& m, const ScalarField& phi, Real c) {
    require_same_mesh(m, phi);
    Real vol = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        const Real v[3] = {phi[tg.v[0]], phi[tg.v[1]], phi[tg.v[2]]};
        const Real chart = clip::sublevel_chart_area(tg.p, v, c);
        if (chart > 0) vol += chart * std::sqrt(tg.g.det());
    }
    return vol;
}

inline Real superlevel_volume(const MeshManifold& m, const ScalarField& phi, Real c) {
    require_same_mesh(m, phi);
    Real vol = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        const Real v[3] = {-phi[tg.v[0]], -phi[tg.v[1]], -phi[tg.v[2]]};
        const Real chart = clip::sublevel_chart_area(tg.p, v, -c);
        if (chart > 0) vol += chart * std::sqrt(tg.g.det());
    }
    return vol;
}

namespace clip {

inline Real level_length_raw(const MeshManifold& m, const ScalarField& phi, Real c) {
    Real len = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        const Real v[3] = {phi[tg.v[0]], phi[tg.v[1]], phi[tg.v[2]]};
        Vec2 a, b;
        if (level_segment(tg.p, v, c, a, b)) len += metric_edge_length(tg.g, b - a);
    }
    return len;
}

} // namespace clip

// Riemannian length of the level set {phi = c}. Levels running exactly
// through vertices are measure-degenerate for the strict-crossing count, so
// the length is taken as the average of two nearby regular levels.
inline Real level_length(const MeshManifold& m, const ScalarField& phi, Real c) {
    require_same_mesh(m, phi);
    Real lo = phi.values.front(), hi = lo;
    for (Real v : phi.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const Real delta = 1e-7 * std::max({hi - lo, std::abs(c), 1e-30});
    return 0.5 * (clip::level_length_raw(m, phi, c - delta) +
                  clip::level_length_raw(m, phi, c + delta));
}

struct BallGrowthRow {
    Real radius = 0;
    Real volume = 0;
    Real area = 0;
};

struct BallGrowthTable {
    Index center = 0;
    std::vector<BallGrowthRow> rows;

    // vol(R2) - vol(R1) vs the trapezoid of Area dR; worst relative mismatch.
    Real coarea_defect() const {
        Real worst = 0;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            const Real dv = rows[i + 1].volume - rows[i].volume;
            const Real qa =
                0.5 * (rows[i].area + rows[i + 1].area) * (rows[i + 1].radius - rows[i].radius);
            const Real scale = std::max(std::abs(dv), std::abs(qa));
            if (scale > 0) worst = std::max(worst, std::abs(dv - qa) / scale);
        }
        return worst;
    }
};

inline BallGrowthTable ball_growth_samples(const MeshManifold& m, const ScalarField& dist,
                                           Index center, const std::vector<Real>& radii) {
    require_same_mesh(m, dist);
    const Real rmax = *std::max_element(dist.values.begin(), dist.values.end());
    BallGrowthTable table;
    table.center = center;
    Real prev = -std::numeric_limits<Real>::infinity();
    for (Real R : radii) {
        if (!(R > prev)) throw RadiusOutOfRange("radii must be strictly increasing");
        if (R > rmax) throw RadiusOutOfRange("radius exceeds the meshed extent");
        prev = R;
        table.rows.push_back({R, sublevel_volume(m, dist, R), level_length(m, dist, R)});
    }
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
        if (table.rows[i + 1].volume < table.rows[i].volume - 1e-12)
            throw InvariantViolation("ball volume must be non-decreasing");
    return table;
}

} // namespace parlab

#endif
