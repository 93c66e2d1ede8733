#ifndef PARLAB_GRAPH_HPP
#define PARLAB_GRAPH_HPP

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "parlab/calculus.hpp"
#include "parlab/clipping.hpp"
#include "parlab/common.hpp"
#include "parlab/distance.hpp"
#include "parlab/fem.hpp"
#include "parlab/mesh.hpp"

namespace parlab {

inline constexpr int kGraphDim = 2; // graphs over surfaces; H = -(1/m) div(grad u / W)

// Graph over a meshed base: height field u plus the per-triangle derived
// quantities of the immersion x -> (x, u(x)) with downward unit normal.
class GraphSurface {
  public:
    GraphSurface(const MeshManifold& base, ScalarField u) : base_(&base), u_(std::move(u)) {
        require_same_mesh(base, u_);
        require_finite(u_);
    }

    const MeshManifold& base() const { return *base_; }
    const ScalarField& height() const { return u_; }

    Real tilt_factor(Index t) const { // W = sqrt(1 + |grad u|^2)
        const TriGeom tg = tri_geom(*base_, t);
        const Vec2 du = chart_gradient(tg, u_);
        return std::sqrt(1 + tg.ginv.quad(du));
    }

    Real cos_theta(Index t) const { return -1.0 / tilt_factor(t); }

    SymMat2 pulled_metric(Index t) const { // g + du (x) du
        const TriGeom tg = tri_geom(*base_, t);
        const Vec2 du = chart_gradient(tg, u_);
        SymMat2 g = tg.g;
        g.a += du.x * du.x;
        g.b += du.x * du.y;
        g.c += du.y * du.y;
        return g;
    }

    // Copy of the base carrying the pulled-back metric; heights are kept so
    // the mesh round-trips as an embedded surface.
    MeshManifold pulled_back_mesh() const {
        MeshManifold m = *base_;
        m.heights.assign(u_.values.begin(), u_.values.end());
        m.metric.resize(std::size_t(m.num_triangles()));
        for (Index t = 0; t < m.num_triangles(); ++t) m.metric[std::size_t(t)] = pulled_metric(t);
        return m;
    }

    // sup |grad u| over triangles (base metric).
    Real max_gradient() const {
        Real s = 0;
        for (Index t = 0; t < base_->num_triangles(); ++t) {
            const TriGeom tg = tri_geom(*base_, t);
            const Vec2 du = chart_gradient(tg, u_);
            s = std::max(s, std::sqrt(tg.ginv.quad(du)));
        }
        return s;
    }

  private:
    const MeshManifold* base_;
    ScalarField u_;
};

inline Real max_edge_length(const MeshManifold& m) {
    Real h = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        for (int k = 0; k < 3; ++k)
            h = std::max(h, metric_edge_length(tg.g, tg.p[(k + 1) % 3] - tg.p[k]));
    }
    return h;
}

// Normalized gradient field grad u / W (contravariant, base metric).
inline VectorField normalized_gradient(const MeshManifold& base, const ScalarField& u) {
    VectorField X(base);
    for (Index t = 0; t < base.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(base, t);
        const Vec2 du = chart_gradient(tg, u);
        const Real W = std::sqrt(1 + tg.ginv.quad(du));
        X[t] = (1.0 / W) * tg.ginv.mul(du);
    }
    return X;
}

// Lumped weak evaluation of H at every non-d0 vertex: the solver's own
// residual form divided by vertex mass. Pointwise it inherits the patch
// asymmetry of the mesh, so it serves as the weak-form route only.
inline ScalarField mean_curvature_field_weak(const GraphSurface& g) {
    const MeshManifold& base = g.base();
    const VectorField X = normalized_gradient(base, g.height());
    const auto pairings = divergence_hat_pairings(base, X);
    const auto mass = lumped_mass(base);
    ScalarField H(base);
    for (Index v : test_vertices(base))
        H[v] = -pairings[std::size_t(v)] / (Real(kGraphDim) * mass[std::size_t(v)]);
    return H;
}

// Second-order jet of the height at a vertex, from a distance-weighted
// quadratic least-squares fit over the 2-ring.
struct HeightJet {
    bool valid = false;
    Real ux = 0, uy = 0, uxx = 0, uxy = 0, uyy = 0;
};

inline std::vector<HeightJet> fit_height_jets(const MeshManifold& base, const ScalarField& u) {
    require_same_mesh(base, u);
    std::vector<std::set<Index>> nb(std::size_t(base.num_vertices()));
    for (const auto& tri : base.triangles)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a != b) nb[std::size_t(tri[a])].insert(tri[b]);

    std::vector<HeightJet> jets(std::size_t(base.num_vertices()));
    for (Index v = 0; v < base.num_vertices(); ++v) {
        std::set<Index> ring(nb[std::size_t(v)]);
        for (Index w : nb[std::size_t(v)])
            ring.insert(nb[std::size_t(w)].begin(), nb[std::size_t(w)].end());
        ring.erase(v);
        if (ring.size() < 6) continue;
        const Vec2 p0 = base.vertices[std::size_t(v)];
        Real scale = 0;
        for (Index w : ring) scale = std::max(scale, norm(base.vertices[std::size_t(w)] - p0));
        Eigen::MatrixXd A(Index(ring.size()) + 1, 6);
        Eigen::VectorXd rhs(Index(ring.size()) + 1);
        int r = 0;
        auto add_row = [&](const Vec2& d, Real val, Real wgt) {
            const Real x = d.x / scale, y = d.y / scale;
            A.row(r) << wgt, wgt * x, wgt * y, wgt * 0.5 * x * x, wgt * x * y, wgt * 0.5 * y * y;
            rhs[r] = wgt * val;
            ++r;
        };
        add_row({0, 0}, u[v], 2.0);
        for (Index w : ring) {
            const Vec2 d = base.vertices[std::size_t(w)] - p0;
            add_row(d, u[w], std::exp(-sq(norm(d) / (0.7 * scale))));
        }
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
        HeightJet& jet = jets[std::size_t(v)];
        jet.valid = true;
        jet.ux = c[1] / scale;
        jet.uy = c[2] / scale;
        jet.uxx = c[3] / (scale * scale);
        jet.uxy = c[4] / (scale * scale);
        jet.uyy = c[5] / (scale * scale);
    }
    return jets;
}

// Pointwise evaluation of H = -(1/m) div(grad u / W) at interior and d1
// vertices of a flat base, via the closed-form curvature of the fitted jet.
// Stays consistent on meshes whose vertex patches are not centrally
// symmetric, where dividing the weak residual by the lumped mass picks up an
// O(1) bias. Metric bases fall back to the weak route.
inline ScalarField mean_curvature_field(const GraphSurface& g) {
    const MeshManifold& base = g.base();
    if (base.has_metric()) return mean_curvature_field_weak(g);
    const auto jets = fit_height_jets(base, g.height());
    ScalarField H(base);
    for (Index v : test_vertices(base)) {
        const HeightJet& j = jets[std::size_t(v)];
        if (!j.valid) continue;
        const Real W2 = 1 + j.ux * j.ux + j.uy * j.uy;
        H[v] = -((1 + j.uy * j.uy) * j.uxx - 2 * j.ux * j.uy * j.uxy +
                 (1 + j.ux * j.ux) * j.uyy) /
               (Real(kGraphDim) * W2 * std::sqrt(W2));
    }
    return H;
}

// ---------------------------------------------------------------------------
// Prescribed-mean-curvature Dirichlet solver: Newton with analytic Jacobian,
// Armijo backtracking and continuation in H. Divergence of the line search is
// the expected outcome when no graph spans the data (e.g. H * radius > 1 on a
// disk); the solver must stop, not loop.
// ---------------------------------------------------------------------------

enum class CmcStatus { Converged, Diverged, StepLimit };

inline std::string to_string(CmcStatus s) {
    switch (s) {
        case CmcStatus::Converged: return "Converged";
        case CmcStatus::Diverged: return "Diverged";
        case CmcStatus::StepLimit: return "StepLimit";
    }
    return "?";
}

struct CmcSolveResult {
    ScalarField u;
    int newton_iterations = 0;
    Real final_residual = 0;
    int continuation_steps = 0;
    CmcStatus status = CmcStatus::Diverged;
};

struct CmcOptions {
    Real rel_tol = 1e-10;
    int max_newton_total = 200;
    Real continuation_fraction = 0.1; // step at most this fraction of H_target
    bool neumann_d1 = false;          // flag: leave d1 natural instead of Dirichlet
};

namespace detail {

struct CmcSystem {
    const MeshManifold* mesh;
    std::vector<Index> free_list;
    std::vector<int> to_free;
    std::vector<Real> mass;

    // residual R_i = int <grad u / W, grad hat_i> - m H int hat_i over free i
    DenseVector residual(const ScalarField& u, Real H) const {
        const MeshManifold& m = *mesh;
        DenseVector R = DenseVector::Zero(Index(free_list.size()));
        for (Index t = 0; t < m.num_triangles(); ++t) {
            const TriGeom tg = tri_geom(m, t);
            const Vec2 du = chart_gradient(tg, u);
            const Real W = std::sqrt(1 + tg.ginv.quad(du));
            const Vec2 q = tg.ginv.mul(du);
            for (int k = 0; k < 3; ++k) {
                const int fi = to_free[std::size_t(tg.v[k])];
                if (fi >= 0) R[fi] += tg.area * dot(q, tg.grad[k]) / W;
            }
        }
        for (std::size_t i = 0; i < free_list.size(); ++i)
            R[Index(i)] -= Real(kGraphDim) * H * mass[std::size_t(free_list[i])];
        return R;
    }

    SparseMatrix jacobian(const ScalarField& u) const {
        const MeshManifold& m = *mesh;
        std::vector<Eigen::Triplet<Real>> trip;
        trip.reserve(std::size_t(m.num_triangles()) * 9);
        for (Index t = 0; t < m.num_triangles(); ++t) {
            const TriGeom tg = tri_geom(m, t);
            const Vec2 du = chart_gradient(tg, u);
            const Real W = std::sqrt(1 + tg.ginv.quad(du));
            const Vec2 q = tg.ginv.mul(du);
            for (int i = 0; i < 3; ++i) {
                const int fi = to_free[std::size_t(tg.v[i])];
                if (fi < 0) continue;
                for (int j = 0; j < 3; ++j) {
                    const int fj = to_free[std::size_t(tg.v[j])];
                    if (fj < 0) continue;
                    const Real val =
                        tg.area * (tg.ginv.quad(tg.grad[i], tg.grad[j]) / W -
                                   dot(q, tg.grad[i]) * dot(q, tg.grad[j]) / (W * W * W));
                    trip.emplace_back(fi, fj, val);
                }
            }
        }
        SparseMatrix J(Index(free_list.size()), Index(free_list.size()));
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    }
};

} // namespace detail

// Vertex-level interface: `fixed` pins heights directly.
inline CmcSolveResult solve_cmc_fixed(const MeshManifold& base, Real H_target,
                                      const std::map<Index, Real>& fixed,
                                      const CmcOptions& opt = {}) {
    if (fixed.empty()) throw SingularSystem("no Dirichlet-constrained vertex");

    detail::CmcSystem sys;
    sys.mesh = &base;
    sys.to_free.assign(std::size_t(base.num_vertices()), -1);
    sys.mass = lumped_mass(base);
    for (Index v = 0; v < base.num_vertices(); ++v)
        if (!fixed.count(v)) {
            sys.to_free[std::size_t(v)] = int(sys.free_list.size());
            sys.free_list.push_back(v);
        }

    CmcSolveResult result;
    result.u = ScalarField(base);
    for (const auto& [v, val] : fixed) result.u[v] = val;

    // natural residual scale at the target curvature
    Real load_scale = 0;
    for (Index v : sys.free_list)
        load_scale += sq(Real(kGraphDim) * H_target * sys.mass[std::size_t(v)]);
    load_scale = std::sqrt(load_scale);

    const int n_stages =
        H_target == 0 ? 1 : std::max(1, int(std::ceil(1.0 / opt.continuation_fraction)));
    for (int stage = 1; stage <= n_stages; ++stage) {
        const Real H = H_target * Real(stage) / Real(n_stages);
        result.continuation_steps = stage;
        DenseVector R = sys.residual(result.u, H);
        Real rnorm = R.norm();
        const Real tol = opt.rel_tol * std::max({rnorm, load_scale, Real(1e-14)});
        while (rnorm > tol) {
            if (result.newton_iterations >= opt.max_newton_total) {
                result.status = CmcStatus::StepLimit;
                result.final_residual = rnorm;
                return result;
            }
            ++result.newton_iterations;
            Eigen::SimplicialLDLT<SparseMatrix> solver(sys.jacobian(result.u));
            if (solver.info() != Eigen::Success) {
                result.status = CmcStatus::Diverged;
                result.final_residual = rnorm;
                return result;
            }
            const DenseVector step = solver.solve(-R);
            // Armijo backtracking on ||R||
            Real lambda = 1.0;
            ScalarField trial = result.u;
            bool accepted = false;
            while (lambda >= 1e-10) {
                for (std::size_t i = 0; i < sys.free_list.size(); ++i)
                    trial[sys.free_list[i]] = result.u[sys.free_list[i]] + lambda * step[Index(i)];
                const DenseVector Rt = sys.residual(trial, H);
                if (Rt.norm() <= (1 - 1e-4 * lambda) * rnorm) {
                    result.u = trial;
                    R = Rt;
                    rnorm = Rt.norm();
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted) {
                result.status = CmcStatus::Diverged;
                result.final_residual = rnorm;
                return result;
            }
        }
        result.final_residual = rnorm;
    }
    result.status = CmcStatus::Converged;
    return result;
}

inline CmcSolveResult solve_cmc_dirichlet(const MeshManifold& base, Real H_target,
                                          const std::map<std::string, Real>& boundary_data,
                                          const CmcOptions& opt = {}) {
    auto fixed = dirichlet_vertex_values(base, boundary_data);
    if (!opt.neumann_d1) {
        // every boundary vertex must be constrained
        for (const auto& be : base.boundary_edges)
            for (Index v : {be.v0, be.v1})
                if (!fixed.count(v))
                    throw PreconditionViolated(
                        "all boundary components need Dirichlet data (or the Neumann flag)");
    } else {
        for (const auto& be : base.boundary_edges)
            if (be.label == BoundaryLabel::D0)
                for (Index v : {be.v0, be.v1})
                    if (!fixed.count(v))
                        throw PreconditionViolated("d0 boundary needs Dirichlet data");
    }
    return solve_cmc_fixed(base, H_target, fixed, opt);
}

// ---------------------------------------------------------------------------
// Height estimate: a CMC graph with H > 0, boundary in the zero slice, lies
// in the slab [0, 1/H] up to the first-order discretization allowance.
// ---------------------------------------------------------------------------

struct HeightReport {
    Real min_height = 0;
    Real max_height = 0;
    Real slack = 0; // 1/H - max u
    Real tolerance = 0;
    bool pass = false;
};

inline HeightReport height_estimate_check(const GraphSurface& g, Real H) {
    if (!(H > 0)) throw HypothesisViolation("height estimate needs constant H > 0");
    const MeshManifold& base = g.base();
    for (Index v : vertices_on_label(base, BoundaryLabel::D1))
        if (std::abs(g.height()[v]) > 1e-10)
            throw HypothesisViolation("graph boundary must lie in the zero slice");
    HeightReport rep;
    const Real h = max_edge_length(base);
    rep.tolerance = 5 * h * (1 + g.max_gradient());
    rep.min_height = std::numeric_limits<Real>::infinity();
    rep.max_height = -std::numeric_limits<Real>::infinity();
    for (Real v : g.height().values) {
        rep.min_height = std::min(rep.min_height, v);
        rep.max_height = std::max(rep.max_height, v);
    }
    rep.slack = 1.0 / H - rep.max_height;
    rep.pass = rep.min_height >= -rep.tolerance && rep.max_height <= 1.0 / H + rep.tolerance;
    return rep;
}

// w = H u - 1/W, subharmonic on the graph over a flat base. The vertex tilt
// W comes from the fitted gradient where available (pointwise second order);
// vertices without a usable stencil fall back to the lumped-mass average of
// the triangle values.
inline ScalarField auxiliary_w_field(const GraphSurface& g, Real H) {
    const MeshManifold& base = g.base();
    std::vector<Real> wsum(std::size_t(base.num_vertices()), 0);
    std::vector<Real> msum(std::size_t(base.num_vertices()), 0);
    for (Index t = 0; t < base.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(base, t);
        const Real W = g.tilt_factor(t);
        for (int k = 0; k < 3; ++k) {
            wsum[std::size_t(tg.v[k])] += tg.area / 3 * W;
            msum[std::size_t(tg.v[k])] += tg.area / 3;
        }
    }
    std::vector<HeightJet> jets;
    if (!base.has_metric()) jets = fit_height_jets(base, g.height());
    ScalarField w(base);
    for (Index v = 0; v < base.num_vertices(); ++v) {
        Real Wv = wsum[std::size_t(v)] / msum[std::size_t(v)];
        if (!jets.empty() && jets[std::size_t(v)].valid) {
            const HeightJet& j = jets[std::size_t(v)];
            Wv = std::sqrt(1 + j.ux * j.ux + j.uy * j.uy);
        }
        w[v] = H * g.height()[v] - 1.0 / Wv;
    }
    return w;
}

// Ball growth in the pulled-back metric: edge lengths sqrt(|e|^2 + du(e)^2),
// areas scaled by W.
inline BallGrowthTable graph_ball_growth(const GraphSurface& g, Index o,
                                         const std::vector<Real>& radii) {
    const MeshManifold sigma = g.pulled_back_mesh();
    const ScalarField dist = distance_field(sigma, o, DistanceMode::Dijkstra);
    return ball_growth_samples(sigma, dist, o, radii);
}

// ---------------------------------------------------------------------------
// Liouville probe for the mean curvature operator: tabulates
//   H(R) = int_{B_R} e^u Phi(|grad u|) |grad u|^2,  Phi(t) = 1/sqrt(1+t^2),
// for the normalization u <= 0 and checks the differential inequality
// H'/H^2 >= 1/Area(d0 B_R) in finite-difference form together with its
// integrated consequence.
// ---------------------------------------------------------------------------

struct LiouvilleRow {
    Real radius = 0;
    Real energy = 0;     // H(R)
    Real area = 0;       // Area(d0 B_R)
    Real fd_lhs = 0;     // (H(R_{k+1}) - H(R_k)) / (dR * H(R_k)^2)
    Real fd_rhs = 0;     // 1 / Area(R_{k+1})
    bool holds = false;
    Real integrated_bound = 0; // 1 / int_{R_0}^{R_k} Area^{-1}
};

struct LiouvilleReport {
    std::vector<LiouvilleRow> rows;
    Real fraction_holding = 0;
    bool integrated_ok = false; // H(R_0) <= integrated bound at every row
    bool note_constant = false;
    Real normalization_shift = 0;
};

inline LiouvilleReport liouville_probe(const MeshManifold& mesh, const ScalarField& u, Index o,
                                       const std::vector<Real>& radii,
                                       DistanceMode mode = DistanceMode::Exact) {
    require_same_mesh(mesh, u);
    require_finite(u);
    if (radii.size() < 3) throw InsufficientData("liouville probe needs several radii");

    const Real umax = *std::max_element(u.values.begin(), u.values.end());
    const ScalarField dist = distance_field(mesh, o, mode);

    LiouvilleReport report;
    report.normalization_shift = umax;

    for (Real R : radii) {
        LiouvilleRow row;
        row.radius = R;
        Real acc = 0;
        for (Index t = 0; t < mesh.num_triangles(); ++t) {
            const TriGeom tg = tri_geom(mesh, t);
            const Real rv[3] = {dist[tg.v[0]], dist[tg.v[1]], dist[tg.v[2]]};
            const Real chart = clip::sublevel_chart_area(tg.p, rv, R);
            if (chart <= 0) continue;
            const Vec2 du = chart_gradient(tg, u);
            const Real grad2 = tg.ginv.quad(du);
            const Real phi = 1.0 / std::sqrt(1 + grad2);
            // centroid height of the clipped part, first order in h
            Real ubar = 0;
            for (int k = 0; k < 3; ++k) ubar += (u[tg.v[k]] - umax) / 3.0;
            acc += chart * std::sqrt(tg.g.det()) * std::exp(ubar) * phi * grad2;
        }
        row.energy = acc;
        row.area = level_length(mesh, dist, R);
        report.rows.push_back(row);
    }

    auto& rows = report.rows;
    const Real scale = rows.back().energy;
    if (scale <= 1e-14) {
        report.note_constant = true;
        report.fraction_holding = 1;
        report.integrated_ok = true;
        return report;
    }
    int n_checked = 0, n_hold = 0;
    Real inv_area_integral = 0;
    report.integrated_ok = true;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const Real dR = rows[k + 1].radius - rows[k].radius;
        inv_area_integral += dR * 0.5 * (1 / rows[k].area + 1 / rows[k + 1].area);
        rows[k + 1].integrated_bound = 1 / inv_area_integral;
        if (rows[k].energy > 1e-12 * scale) {
            rows[k].fd_lhs = (rows[k + 1].energy - rows[k].energy) / (dR * sq(rows[k].energy));
            rows[k].fd_rhs = 1 / rows[k + 1].area;
            rows[k].holds = rows[k].fd_lhs >= rows[k].fd_rhs * (1 - 1e-9);
            ++n_checked;
            n_hold += rows[k].holds ? 1 : 0;
        }
        if (rows.front().energy > rows[k + 1].integrated_bound * (1 + 1e-9))
            report.integrated_ok = false;
    }
    report.fraction_holding = n_checked ? Real(n_hold) / Real(n_checked) : 1;
    return report;
}

// ---------------------------------------------------------------------------
// Slice report: verifies the checkable hypotheses of the slice theorem for
// graphs (H <= 0 sign gate, the boundary angle condition, boundary avoidance
// of the threshold slices) and tabulates superlevel volumes against the
// constancy deficit. The family-level implication is asserted by the callers.
// ---------------------------------------------------------------------------

struct SliceThresholdRow {
    Real threshold = 0;
    Real superlevel_volume = 0;
    bool boundary_avoids = false;
};

struct SliceReport {
    Real max_mean_curvature = 0;
    Real curvature_tolerance = 0;
    bool angle_condition_ok = false; // hypothesis (c): du/dnu <= 0 on d1
    Real worst_d1_flux = 0;
    Real d1_max_height = 0;
    std::vector<SliceThresholdRow> thresholds;
    Real constancy_deficit = 0; // osc of u over the mesh
    Real deficit_tolerance = 0;
};

inline SliceReport slice_report(const GraphSurface& g, const std::vector<Real>& thresholds) {
    const MeshManifold& base = g.base();
    const Real h = max_edge_length(base);
    SliceReport rep;
    rep.curvature_tolerance = 10 * h;
    rep.deficit_tolerance = 10 * h;

    const ScalarField H = mean_curvature_field(g);
    rep.max_mean_curvature = -std::numeric_limits<Real>::infinity();
    for (Index v : test_vertices(base)) rep.max_mean_curvature = std::max(rep.max_mean_curvature, H[v]);
    if (rep.max_mean_curvature > rep.curvature_tolerance)
        throw HypothesisViolation("mean curvature is not <= 0 within tolerance");

    rep.worst_d1_flux = 0;
    const VectorField grad = gradient_field(base, g.height());
    for (const auto& ef : boundary_fluxes(base, grad)) {
        const auto& be = base.boundary_edges[ef.edge_index];
        if (be.label != BoundaryLabel::D1) continue;
        rep.worst_d1_flux = std::max(rep.worst_d1_flux, ef.flux / ef.length);
    }
    rep.angle_condition_ok = rep.worst_d1_flux <= 1e-8;

    rep.d1_max_height = -std::numeric_limits<Real>::infinity();
    for (Index v : vertices_on_label(base, BoundaryLabel::D1))
        rep.d1_max_height = std::max(rep.d1_max_height, g.height()[v]);

    for (Real t : thresholds) {
        SliceThresholdRow row;
        row.threshold = t;
        row.superlevel_volume = superlevel_volume(base, g.height(), t);
        row.boundary_avoids = rep.d1_max_height < t - 1e-12;
        rep.thresholds.push_back(row);
    }
    Real umin = std::numeric_limits<Real>::infinity(), umax = -umin;
    for (Real v : g.height().values) {
        umin = std::min(umin, v);
        umax = std::max(umax, v);
    }
    rep.constancy_deficit = umax - umin;
    return rep;
}

} // namespace parlab

#endif
