#ifndef PARLAB_CAPACITY_HPP
#define PARLAB_CAPACITY_HPP

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "parlab/common.hpp"
#include "parlab/fem.hpp"
#include "parlab/mesh.hpp"
#include "parlab/model.hpp"

namespace parlab {

// Condenser (K, Omega): plate vertices carry u = 1, the d0-Omega vertices
// u = 0, every other boundary edge is Neumann.
struct Condenser {
    const MeshManifold* mesh = nullptr;
    std::vector<Index> plate;
    std::vector<Index> ground;

    void check() const {
        if (!mesh) throw InvariantViolation("condenser has no mesh");
        if (plate.empty()) throw InvariantViolation("condenser plate K is empty");
        if (ground.empty()) throw InvariantViolation("condenser has no grounded boundary");
        std::set<Index> p(plate.begin(), plate.end());
        for (Index v : ground)
            if (p.count(v))
                throw InvariantViolation("K touches the grounded boundary; refine the mesh");
    }
};

inline Condenser condenser_from_markers(const MeshManifold& m, const std::string& plate_marker,
                                        const std::string& ground_marker) {
    return {&m, vertices_on_marker(m, plate_marker), vertices_on_marker(m, ground_marker)};
}

struct CapacityResult {
    Real value = 0;
    ScalarField potential;
    Real energy_residual = 0;
};

inline CapacityResult condenser_capacity(const Condenser& c, const SolveOptions& opt = {}) {
    c.check();
    const MeshManifold& m = *c.mesh;
    const SparseMatrix S = assemble_stiffness(m);
    std::map<Index, Real> fixed;
    for (Index v : c.plate) fixed[v] = 1.0;
    for (Index v : c.ground) fixed[v] = 0.0;
    CapacityResult res;
    res.potential = solve_constrained(m, S, DenseVector::Zero(m.num_vertices()), fixed, opt);
    res.value = dirichlet_energy(m, res.potential);
    res.energy_residual = std::abs(dirichlet_energy(m, res.potential) - res.value);
    return res;
}

// Capacity of the radial condenser (B_a, B_b) on a model manifold:
//   sector * omega_{m-1} / int_a^b f(t)^{-(m-1)} dt.
// A divergent resistance integral (b = inf) means zero capacity.
inline Real radial_capacity_oracle(const ModelManifold& model, Real a, Real b) {
    const ImproperResult r = radial_resistance(model, a, b);
    if (r.divergent) return 0.0;
    return model.sector_fraction() * unit_sphere_area(model.dim()) / r.value;
}

// ---------------------------------------------------------------------------
// Limit classification of a non-increasing positive sequence. Numerics cannot
// prove convergence to zero; the rules below are the named heuristics, and
// every report carries the raw sequence.
// ---------------------------------------------------------------------------

enum class LimitClass { DecaysToZero, PositiveLimit, Undetermined };

inline std::string to_string(LimitClass c) {
    switch (c) {
        case LimitClass::DecaysToZero: return "DecaysToZero";
        case LimitClass::PositiveLimit: return "PositiveLimit";
        case LimitClass::Undetermined: return "Undetermined";
    }
    return "?";
}

struct LimitEstimate {
    LimitClass cls = LimitClass::Undetermined;
    Real limit = 0;
    std::string note;
};

// values[j] sampled at increasing radii[j]; theta_zero = zero_fraction * values[0].
inline LimitEstimate classify_limit_sequence(const std::vector<Real>& values,
                                             const std::vector<Real>& radii,
                                             Real zero_fraction = 1e-2) {
    LimitEstimate est;
    const std::size_t n = values.size();
    if (n < 3) {
        est.note = "fewer than three members";
        return est;
    }
    const Real theta_zero = zero_fraction * std::max(values.front(), Real(0));
    const Real c_last = values[n - 1];
    const Real d_last = values[n - 1] - values[n - 2];
    const Real d_prev = values[n - 2] - values[n - 3];
    const Real rel_step = std::abs(d_last) / std::max(std::abs(c_last), 1e-300);

    if (rel_step <= 0.02) {
        // stabilized: geometric extrapolation inside the contraction window,
        // otherwise the last value already is the limit estimate
        Real L = c_last;
        if (std::abs(d_prev) > 0) {
            const Real rho = d_last / d_prev;
            if (rho >= 0.1 && rho <= 0.9) L = c_last + d_last * rho / (1 - rho);
        }
        est.limit = L;
        est.cls = L > theta_zero ? LimitClass::PositiveLimit : LimitClass::DecaysToZero;
        est.note = "stabilized sequence";
        return est;
    }
    if (c_last <= theta_zero) {
        est.cls = LimitClass::DecaysToZero;
        est.limit = 0;
        est.note = "last value below theta_zero";
        return est;
    }
    // still moving: log-log tail slope over the latter half
    const std::size_t lo = n / 2;
    if (values[lo] > 0 && c_last > 0 && radii[n - 1] > radii[lo]) {
        const Real slope = (std::log(c_last) - std::log(values[lo])) /
                           (std::log(radii[n - 1]) - std::log(radii[lo]));
        est.note = "tail log-log slope " + std::to_string(slope);
        if (slope <= -0.1) {
            est.cls = LimitClass::DecaysToZero;
            est.limit = 0;
            return est;
        }
    }
    est.cls = LimitClass::Undetermined;
    est.limit = c_last;
    return est;
}

struct ExhaustionRow {
    int j = 0;
    Real outer_radius = 0;
    Real capacity = 0;
    Real potential_at_o = 0;
};

struct ExhaustionReport {
    std::vector<ExhaustionRow> rows;
    Real limit_estimate = 0;
    LimitClass classification = LimitClass::Undetermined;
    std::string extrapolation_note;
};

} // namespace parlab

#endif
