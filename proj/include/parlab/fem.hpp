#ifndef PARLAB_FEM_HPP
#define PARLAB_FEM_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include "parlab/common.hpp"
#include "parlab/mesh.hpp"

namespace parlab {

using SparseMatrix = Eigen::SparseMatrix<Real>;
using DenseVector = Eigen::VectorXd;

// P1 stiffness with the per-triangle metric: S_ij = int <grad phi_i, grad phi_j>_g.
// Reduces to cotangent weights on flat meshes.
inline SparseMatrix assemble_stiffness(const MeshManifold& m) {
    std::vector<Eigen::Triplet<Real>> trip;
    trip.reserve(std::size_t(m.num_triangles()) * 9);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(int(tg.v[i]), int(tg.v[j]),
                                  tg.area * tg.ginv.quad(tg.grad[i], tg.grad[j]));
    }
    SparseMatrix S(int(m.num_vertices()), int(m.num_vertices()));
    S.setFromTriplets(trip.begin(), trip.end());
    return S;
}

// Lumped mass: one third of the incident metric area per vertex.
inline std::vector<Real> lumped_mass(const MeshManifold& m) {
    std::vector<Real> mass(std::size_t(m.num_vertices()), 0);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        for (int k = 0; k < 3; ++k) mass[std::size_t(tg.v[k])] += tg.area / 3.0;
    }
    return mass;
}

inline Real dirichlet_energy(const MeshManifold& m, const ScalarField& u) {
    require_same_mesh(m, u);
    Real e = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        const Vec2 du = chart_gradient(tg, u);
        e += tg.area * tg.ginv.quad(du);
    }
    return e;
}

// Riemannian gradient as a contravariant per-triangle field.
inline VectorField gradient_field(const MeshManifold& m, const ScalarField& u) {
    require_same_mesh(m, u);
    VectorField X(m);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        X[t] = tg.ginv.mul(chart_gradient(tg, u));
    }
    return X;
}

inline Real l2_norm_squared(const MeshManifold& m, const VectorField& X) {
    require_same_mesh(m, X);
    Real n = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        n += tg.area * tg.g.quad(X[t]);
    }
    return n;
}

// ---------------------------------------------------------------------------
// Linear solves. Direct sparse factorization up to `direct_limit` unknowns,
// diagonally preconditioned CG beyond; both are verified against the reduced
// residual afterwards.
// ---------------------------------------------------------------------------

struct SolveOptions {
    Real rel_tol = 1e-10;
    Index direct_limit = 200000;
};

// Solve S u = rhs with u pinned at `fixed` (vertex -> value).
inline ScalarField solve_constrained(const MeshManifold& m, const SparseMatrix& S,
                                     const DenseVector& rhs, const std::map<Index, Real>& fixed,
                                     const SolveOptions& opt = {}) {
    const Index nv = m.num_vertices();
    if (fixed.empty()) throw SingularSystem("no Dirichlet-constrained vertex");

    // uniform data with zero load: constants are Neumann-harmonic and the
    // solution is the constant itself
    {
        bool uniform = rhs.isZero(0.0);
        const Real c = fixed.begin()->second;
        for (const auto& [v, val] : fixed) uniform &= val == c;
        if (uniform) return ScalarField(m, c);
    }
    std::vector<int> to_free(std::size_t(nv), -1);
    std::vector<Index> free_list;
    DenseVector full = DenseVector::Zero(nv);
    for (Index v = 0; v < nv; ++v) {
        auto it = fixed.find(v);
        if (it == fixed.end()) {
            to_free[std::size_t(v)] = int(free_list.size());
            free_list.push_back(v);
        } else {
            full[v] = it->second;
        }
    }

    const Index nf = Index(free_list.size());
    ScalarField u(m);
    if (nf == 0) {
        for (Index v = 0; v < nv; ++v) u[v] = full[v];
        return u;
    }

    std::vector<Eigen::Triplet<Real>> trip;
    DenseVector b = DenseVector::Zero(nf);
    for (Index fi = 0; fi < nf; ++fi) b[fi] = rhs[free_list[std::size_t(fi)]];
    for (int col = 0; col < S.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(S, col); it; ++it) {
            const int i = int(it.row()), j = int(it.col());
            const int fi = to_free[std::size_t(i)], fj = to_free[std::size_t(j)];
            if (fi >= 0 && fj >= 0) trip.emplace_back(fi, fj, it.value());
            else if (fi >= 0 && fj < 0) b[fi] -= it.value() * full[j];
        }
    }
    SparseMatrix A(static_cast<int>(nf), static_cast<int>(nf));
    A.setFromTriplets(trip.begin(), trip.end());

    DenseVector x;
    if (nf <= opt.direct_limit) {
        Eigen::SimplicialLDLT<SparseMatrix> solver(A);
        if (solver.info() != Eigen::Success) throw SingularSystem("factorization failed");
        x = solver.solve(b);
    } else {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<Real>>
            cg(A);
        cg.setTolerance(opt.rel_tol * 1e-2);
        cg.setMaxIterations(20000);
        x = cg.solve(b);
        if (cg.info() != Eigen::Success) throw SolverDivergence("conjugate gradient stalled");
    }
    const Real rn = (A * x - b).norm();
    const Real scale = std::max(b.norm(), A.norm() * x.norm());
    if (scale > 0 && rn > opt.rel_tol * scale)
        throw SolverDivergence("residual above tolerance after linear solve");

    for (Index v = 0; v < nv; ++v) u[v] = full[v];
    for (Index fi = 0; fi < nf; ++fi) u[free_list[std::size_t(fi)]] = x[fi];
    return u;
}

// Dirichlet values per boundary marker; every D1 edge and unmarked D0 edge
// gets the natural zero-flux condition. A vertex claimed by two markers with
// different values is an error, not a tie-break.
inline std::map<Index, Real> dirichlet_vertex_values(
    const MeshManifold& m, const std::map<std::string, Real>& dirichlet) {
    std::map<Index, Real> fixed;
    for (const auto& [marker, value] : dirichlet) {
        bool seen = false;
        for (const auto& be : m.boundary_edges) {
            if (be.marker != marker) continue;
            seen = true;
            for (Index v : {be.v0, be.v1}) {
                auto [it, inserted] = fixed.emplace(v, value);
                if (!inserted && it->second != value)
                    throw InvariantViolation("vertex constrained by two markers with different values");
            }
        }
        if (!seen) throw InvariantViolation("no boundary edge carries marker '" + marker + "'");
    }
    return fixed;
}

inline ScalarField solve_mixed_bvp(const MeshManifold& m,
                                   const std::map<std::string, Real>& dirichlet,
                                   const ScalarField* source = nullptr,
                                   const SolveOptions& opt = {}) {
    const SparseMatrix S = assemble_stiffness(m);
    DenseVector rhs = DenseVector::Zero(m.num_vertices());
    if (source) {
        require_same_mesh(m, *source);
        require_finite(*source);
        const auto mass = lumped_mass(m);
        for (Index v = 0; v < m.num_vertices(); ++v)
            rhs[v] = mass[std::size_t(v)] * (*source)[v];
    }
    return solve_constrained(m, S, rhs, dirichlet_vertex_values(m, dirichlet), opt);
}

// Poisson problem of the Neumann Green kernel construction: Delta u = -f,
// zero flux on d1, u = 0 on the outer marker.
inline ScalarField solve_neumann_poisson(const MeshManifold& m, const ScalarField& f,
                                         const std::string& outer_marker,
                                         const SolveOptions& opt = {}) {
    require_same_mesh(m, f);
    for (const auto& be : m.boundary_edges)
        for (Index v : {be.v0, be.v1})
            if (f[v] != 0)
                throw PreconditionViolated("source must be compactly supported away from the boundary");
    return solve_mixed_bvp(m, {{outer_marker, 0.0}}, &f, opt);
}

// ---------------------------------------------------------------------------
// Boundary fluxes of P0 fields. Outward orientation is taken from the unique
// incident triangle, exact for constant fields.
// ---------------------------------------------------------------------------

struct BoundaryEdgeFlux {
    std::size_t edge_index;
    Real flux;      // int_e <X, nu>_g dl
    Real length;    // metric length of the edge
    Index triangle; // incident triangle
};

inline std::vector<BoundaryEdgeFlux> boundary_fluxes(const MeshManifold& m, const VectorField& X) {
    require_same_mesh(m, X);
    auto et = edge_triangles(m);
    std::vector<BoundaryEdgeFlux> out;
    out.reserve(m.boundary_edges.size());
    for (std::size_t e = 0; e < m.boundary_edges.size(); ++e) {
        const auto& be = m.boundary_edges[e];
        const auto& ts = et.at(detail::ekey(be.v0, be.v1));
        if (ts.size() != 1) throw InvariantViolation("boundary edge not incident to one triangle");
        const Index t = ts.front();
        const TriGeom tg = tri_geom(m, t);
        // directed edge of the triangle (domain on the left)
        Vec2 a{}, b{};
        for (int k = 0; k < 3; ++k) {
            const Index va = tg.v[k], vb = tg.v[(k + 1) % 3];
            if ((va == be.v0 && vb == be.v1) || (va == be.v1 && vb == be.v0)) {
                a = m.vertices[std::size_t(va)];
                b = m.vertices[std::size_t(vb)];
            }
        }
        out.push_back({e, metric_edge_flux(tg.g, X[t], a, b), metric_edge_length(tg.g, b - a), t});
    }
    return out;
}

inline Real total_boundary_flux(const MeshManifold& m, const VectorField& X,
                                std::optional<BoundaryLabel> label = {}) {
    Real s = 0;
    for (const auto& ef : boundary_fluxes(m, X))
        if (!label || m.boundary_edges[ef.edge_index].label == *label) s += ef.flux;
    return s;
}

// Convenience: P1 interpolation of a chart function.
template <class F>
ScalarField interpolate(const MeshManifold& m, F&& f) {
    ScalarField u(m);
    for (Index v = 0; v < m.num_vertices(); ++v) {
        const auto& p = m.vertices[std::size_t(v)];
        u[v] = f(p.x, p.y);
    }
    return u;
}

} // namespace parlab

#endif
