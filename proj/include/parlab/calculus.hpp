#ifndef PARLAB_CALCULUS_HPP
#define PARLAB_CALCULUS_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "parlab/common.hpp"
#include "parlab/fem.hpp"
#include "parlab/mesh.hpp"

namespace parlab {

// -int <grad u, grad phi>_g, the weak form tested against phi.
inline Real weak_laplacian_pairing(const MeshManifold& m, const ScalarField& u,
                                   const ScalarField& phi) {
    require_same_mesh(m, u);
    require_same_mesh(m, phi);
    Real acc = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        acc += tg.area * tg.ginv.quad(chart_gradient(tg, u), chart_gradient(tg, phi));
    }
    return -acc;
}

// Vertices whose hat functions are admissible test functions: compactly
// supported in the domain, i.e. not touching any d0 edge. d1 vertices stay in
// the test set (the Neumann side of the pairing).
inline std::vector<Index> test_vertices(const MeshManifold& m) {
    std::set<Index> excluded;
    for (const auto& be : m.boundary_edges)
        if (be.label == BoundaryLabel::D0) {
            excluded.insert(be.v0);
            excluded.insert(be.v1);
        }
    std::vector<Index> out;
    for (Index v = 0; v < m.num_vertices(); ++v)
        if (!excluded.count(v)) out.push_back(v);
    return out;
}

struct WeakPairingReport {
    Index worst_vertex = -1;
    Real worst_value = 0;
    bool pass = false;
    Real tolerance = 0;
};

// Tests -int <grad u, grad hat_i> >= -tol against every admissible hat. The
// hats positively span the discrete non-negative test cone, so this decides
// the weak Neumann subsolution property.
inline WeakPairingReport is_weak_neumann_subsolution(const MeshManifold& m, const ScalarField& u,
                                                     Real tol) {
    require_same_mesh(m, u);
    if (tol < 0) throw PreconditionViolated("tolerance must be non-negative");
    const SparseMatrix S = assemble_stiffness(m);
    DenseVector uv(m.num_vertices());
    for (Index v = 0; v < m.num_vertices(); ++v) uv[v] = u[v];
    const DenseVector Su = S * uv;
    WeakPairingReport report;
    report.tolerance = tol;
    report.worst_value = std::numeric_limits<Real>::infinity();
    for (Index v : test_vertices(m)) {
        const Real pairing = -Su[v];
        if (pairing < report.worst_value) {
            report.worst_value = pairing;
            report.worst_vertex = v;
        }
    }
    report.pass = report.worst_value >= -tol;
    return report;
}

struct AhlforsReport {
    Real sup_D = 0;
    Real sup_boundary0 = 0;
    Real gap = 0; // sup_D - sup_boundary0
    Index argmax = -1;
};

inline AhlforsReport ahlfors_report(const MeshManifold& m, const ScalarField& u,
                                    const std::vector<Index>& D,
                                    const std::vector<Index>& boundary0) {
    require_same_mesh(m, u);
    if (boundary0.empty()) throw EmptyBoundary("d0 vertex set of the report domain is empty");
    AhlforsReport rep;
    rep.sup_D = -std::numeric_limits<Real>::infinity();
    rep.sup_boundary0 = -std::numeric_limits<Real>::infinity();
    for (Index v : D) {
        if (u[v] > rep.sup_D) {
            rep.sup_D = u[v];
            rep.argmax = v;
        }
    }
    for (Index v : boundary0) rep.sup_boundary0 = std::max(rep.sup_boundary0, u[v]);
    rep.gap = rep.sup_D - rep.sup_boundary0;
    return rep;
}

inline AhlforsReport ahlfors_report(const MeshManifold& m, const ScalarField& u,
                                    const std::string& boundary_marker) {
    std::vector<Index> all(std::size_t(m.num_vertices()));
    for (Index v = 0; v < m.num_vertices(); ++v) all[std::size_t(v)] = v;
    return ahlfors_report(m, u, all, vertices_on_marker(m, boundary_marker));
}

// ---------------------------------------------------------------------------
// Distributional divergence: (div X, phi) = -int <X, grad phi> + boundary
// pairing over the true boundary d1 (trapezoid in phi, exact P0 flux).
// ---------------------------------------------------------------------------

inline Real weak_divergence_pairing(const MeshManifold& m, const VectorField& X,
                                    const ScalarField& phi) {
    require_same_mesh(m, X);
    require_same_mesh(m, phi);
    Real acc = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        // <X, grad_g phi>_g = dphi(X) for contravariant X
        acc -= tg.area * dot(X[t], chart_gradient(tg, phi));
    }
    for (const auto& ef : boundary_fluxes(m, X)) {
        const auto& be = m.boundary_edges[ef.edge_index];
        if (be.label != BoundaryLabel::D1) continue;
        acc += ef.flux * 0.5 * (phi[be.v0] + phi[be.v1]);
    }
    return acc;
}

// (div X, hat_i) for every vertex at once; one triangle sweep.
inline std::vector<Real> divergence_hat_pairings(const MeshManifold& m, const VectorField& X) {
    require_same_mesh(m, X);
    std::vector<Real> pair(std::size_t(m.num_vertices()), 0);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        for (int k = 0; k < 3; ++k)
            pair[std::size_t(tg.v[k])] -= tg.area * dot(X[t], tg.grad[k]);
    }
    for (const auto& ef : boundary_fluxes(m, X)) {
        const auto& be = m.boundary_edges[ef.edge_index];
        if (be.label != BoundaryLabel::D1) continue;
        pair[std::size_t(be.v0)] += 0.5 * ef.flux;
        pair[std::size_t(be.v1)] += 0.5 * ef.flux;
    }
    return pair;
}

// Interior integral of div X by edge-flux telescoping; equals the total
// boundary flux identically for P0 fields.
inline Real telescoped_divergence(const MeshManifold& m, const VectorField& X) {
    require_same_mesh(m, X);
    auto et = edge_triangles(m);
    std::set<std::pair<Index, Index>> boundary;
    for (const auto& be : m.boundary_edges) boundary.insert(detail::ekey(be.v0, be.v1));
    Real interior_jumps = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        for (int k = 0; k < 3; ++k) {
            const Index a = tg.v[k], b = tg.v[(k + 1) % 3];
            if (boundary.count(detail::ekey(a, b))) continue;
            interior_jumps += metric_edge_flux(tg.g, X[t], m.vertices[std::size_t(a)],
                                               m.vertices[std::size_t(b)]);
        }
    }
    return -interior_jumps;
}

// | (div X, 1) - total boundary flux |: an exact discrete identity, the
// residual measures floating-point and quadrature error only.
inline Real stokes_residual(const MeshManifold& m, const VectorField& X) {
    return std::abs(telescoped_divergence(m, X) - total_boundary_flux(m, X));
}

// ---------------------------------------------------------------------------
// L2-divergence limit study over an exhaustion. The interesting column is the
// artificial-boundary leak: it vanishes for L2 fields on parabolic families
// and converges to -int f on the Neumann-Poisson witness of a non-parabolic
// family, reproducing the failure of the global Stokes identity.
// ---------------------------------------------------------------------------

struct StokesMemberData {
    std::shared_ptr<MeshManifold> mesh;
    VectorField X;
    Real f_integral = 0; // int f when X = grad(Poisson solution), else 0
};

struct StokesLimitRow {
    int j = 0;
    Real interior = 0;
    Real d1_flux = 0;
    Real d0_leak = 0;
    Real l2_norm_sq = 0;
};

enum class StokesVerdict { LeakVanishes, LeakPersistsAsPredicted, NotL2, Inconclusive };

inline std::string to_string(StokesVerdict v) {
    switch (v) {
        case StokesVerdict::LeakVanishes: return "LeakVanishes";
        case StokesVerdict::LeakPersistsAsPredicted: return "LeakPersistsAsPredicted";
        case StokesVerdict::NotL2: return "NotL2";
        case StokesVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct StokesLimitReport {
    std::vector<StokesLimitRow> rows;
    StokesVerdict verdict = StokesVerdict::Inconclusive;
    Real f_integral = 0;
    std::string note;
};

inline StokesLimitReport stokes_limit_study(const std::vector<StokesMemberData>& members,
                                            Real leak_match_rel = 0.05) {
    if (members.size() < 2) throw InsufficientData("limit study needs at least two truncations");
    StokesLimitReport report;
    int j = 1;
    for (const auto& mem : members) {
        const MeshManifold& m = *mem.mesh;
        StokesLimitRow row;
        row.j = j++;
        row.interior = telescoped_divergence(m, mem.X);
        row.d1_flux = total_boundary_flux(m, mem.X, BoundaryLabel::D1);
        row.d0_leak = total_boundary_flux(m, mem.X, BoundaryLabel::D0);
        row.l2_norm_sq = l2_norm_squared(m, mem.X);
        report.rows.push_back(row);
    }
    report.f_integral = members.back().f_integral;

    const auto& rows = report.rows;
    const Real l2_last = rows.back().l2_norm_sq;
    const Real l2_prev = rows[rows.size() - 2].l2_norm_sq;
    const bool l2_bounded = std::abs(l2_last - l2_prev) <= 0.05 * std::max(l2_last, 1e-300);
    if (!l2_bounded) {
        report.verdict = StokesVerdict::NotL2;
        report.note = "field energy keeps growing; the L2 hypothesis fails";
        return report;
    }
    const Real leak = rows.back().d0_leak;
    const Real scale = std::max({std::abs(rows.back().interior), std::abs(report.f_integral),
                                 std::sqrt(l2_last), 1e-14});
    if (std::abs(report.f_integral) > 0 &&
        std::abs(leak + report.f_integral) <= leak_match_rel * std::abs(report.f_integral)) {
        report.verdict = StokesVerdict::LeakPersistsAsPredicted;
        report.note = "global Stokes fails as predicted: leak converges to -int f";
    } else if (std::abs(leak) <= 1e-6 * scale + 1e-12) {
        report.verdict = StokesVerdict::LeakVanishes;
        report.note = "artificial-boundary leak vanishes";
    } else {
        report.verdict = StokesVerdict::Inconclusive;
        report.note = "leak neither vanishes nor matches -int f";
    }
    return report;
}

// ---------------------------------------------------------------------------
// Divergence inequality div X >= f with inward true-boundary flux: per
// truncation the theorem compares int f against the d1 flux.
// ---------------------------------------------------------------------------

struct DivIneqMemberData {
    std::shared_ptr<MeshManifold> mesh;
    VectorField X;
    ScalarField f;
};

struct DivIneqRow {
    int j = 0;
    Real f_integral = 0;
    Real d1_flux = 0;
};

struct DivIneqReport {
    std::vector<DivIneqRow> rows;
    bool conclusion_holds = false; // int f <= int_{d1} <X, nu> in the limit row
    Real slack = 0;
};

inline DivIneqReport div_inequality_report(const std::vector<DivIneqMemberData>& members,
                                           Real tol = 1e-8) {
    if (members.empty()) throw InsufficientData("no truncations given");
    DivIneqReport report;
    int j = 1;
    for (const auto& mem : members) {
        const MeshManifold& m = *mem.mesh;
        require_same_mesh(m, mem.X);
        require_same_mesh(m, mem.f);
        // precondition: <X, nu> <= 0 on every d1 edge
        for (const auto& ef : boundary_fluxes(m, mem.X)) {
            const auto& be = m.boundary_edges[ef.edge_index];
            if (be.label == BoundaryLabel::D1 && ef.flux > tol * std::max<Real>(1, ef.length))
                throw PreconditionViolated("positive flux through the true boundary");
        }
        // precondition: (div X, hat_i) >= int f hat_i against admissible hats
        const auto mass = lumped_mass(m);
        const auto pairings = divergence_hat_pairings(m, mem.X);
        for (Index v : test_vertices(m)) {
            const Real lhs = pairings[std::size_t(v)];
            const Real rhs = mass[std::size_t(v)] * mem.f[v];
            if (lhs < rhs - tol * std::max<Real>(1, std::abs(rhs)))
                throw PreconditionViolated("weak inequality div X >= f fails at a test hat");
        }
        DivIneqRow row;
        row.j = j++;
        Real fint = 0;
        for (Index v = 0; v < m.num_vertices(); ++v) fint += mass[std::size_t(v)] * mem.f[v];
        row.f_integral = fint;
        row.d1_flux = total_boundary_flux(m, mem.X, BoundaryLabel::D1);
        report.rows.push_back(row);
    }
    const auto& last = report.rows.back();
    report.slack = last.d1_flux - last.f_integral;
    report.conclusion_holds = report.slack >= -tol;
    return report;
}

} // namespace parlab

#endif
