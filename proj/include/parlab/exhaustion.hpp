#ifndef PARLAB_EXHAUSTION_HPP
#define PARLAB_EXHAUSTION_HPP

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "parlab/capacity.hpp"
#include "parlab/common.hpp"
#include "parlab/fem.hpp"
#include "parlab/mesh.hpp"
#include "parlab/meshgen.hpp"
#include "parlab/model.hpp"

namespace parlab {

// One truncation of an exhaustion, ready for solving.
struct ExhaustionMember {
    std::shared_ptr<MeshManifold> mesh;
    std::vector<Index> plate;  // K vertices
    std::vector<Index> outer;  // artificial d0 boundary of the truncation
    Index probe = 0;           // reference vertex o
    Real outer_radius = 0;
    Real capacity_scale = 1;   // model sector normalization
};

// Increasing exhaustion with the compact plate K represented identically in
// every member. Either backed by nested submeshes of one master triangulation
// (discrete monotonicity is then exact) or by the 1-D radial reduction of a
// model manifold.
class ExhaustionFamily {
  public:
    virtual ~ExhaustionFamily() = default;
    virtual std::string name() const = 0;
    virtual int size() const = 0;
    virtual Real outer_radius(int j) const = 0;
    // capacity of (K, Omega_j) and the equilibrium potential at the probe
    virtual std::pair<Real, Real> capacity_member(int j) const = 0;
    virtual bool has_meshes() const { return false; }
    virtual ExhaustionMember member(int /*j*/) const {
        throw PreconditionViolated("family '" + name() + "' has no mesh realization");
    }
};

// ---------------------------------------------------------------------------
// Mesh-backed family: nested truncations of a master annulus (full or half,
// optionally carrying a model metric). K is the inner boundary circle.
// ---------------------------------------------------------------------------

// Chart in which the master mesh measures radius: flat meshes use the polar
// chart (radius = |p|), warped half models the parameter rectangle
// (radius = x).
enum class ChartKind { Polar, Rect };

class MeshExhaustionFamily : public ExhaustionFamily {
  public:
    MeshExhaustionFamily(std::string name, MeshManifold master, std::vector<Real> member_radii,
                         Real probe_radius, Real capacity_scale = 1,
                         ChartKind chart = ChartKind::Polar)
        : name_(std::move(name)), master_(std::make_shared<MeshManifold>(std::move(master))),
          radii_(std::move(member_radii)), probe_radius_(probe_radius), scale_(capacity_scale),
          chart_(chart) {}

    std::string name() const override { return name_; }
    int size() const override { return int(radii_.size()); }
    Real outer_radius(int j) const override { return radii_.at(std::size_t(j)); }
    bool has_meshes() const override { return true; }

    Real chart_radius(const Vec2& p) const { return chart_ == ChartKind::Polar ? norm(p) : p.x; }

    ExhaustionMember member(int j) const override {
        const Real R = radii_.at(std::size_t(j));
        const Real tol = 1e-9 * R;
        Submesh sub = extract_submesh(
            *master_,
            [&](Index v) { return chart_radius(master_->vertices[std::size_t(v)]) <= R + tol; },
            "cut");
        ExhaustionMember mem;
        mem.mesh = std::make_shared<MeshManifold>(std::move(sub.mesh));
        mem.plate = vertices_on_marker(*mem.mesh, "inner");
        mem.outer = vertices_on_marker(*mem.mesh, "cut");
        // the last member keeps the master's own outer circle
        auto master_outer = vertices_on_marker(*mem.mesh, "outer");
        mem.outer.insert(mem.outer.end(), master_outer.begin(), master_outer.end());
        if (mem.outer.empty()) throw MeshingFailure("truncation exposed no outer boundary");
        mem.probe = nearest_vertex(*mem.mesh, probe_radius_, chart_);
        mem.outer_radius = R;
        mem.capacity_scale = scale_;
        return mem;
    }

    std::pair<Real, Real> capacity_member(int j) const override {
        const ExhaustionMember mem = member(j);
        Condenser c{mem.mesh.get(), mem.plate, mem.outer};
        const CapacityResult res = condenser_capacity(c);
        return {scale_ * res.value, res.potential[mem.probe]};
    }

    const MeshManifold& master() const { return *master_; }

  private:
    static Index nearest_vertex(const MeshManifold& m, Real r_probe, ChartKind chart) {
        // aim for radius r_probe halfway up the meshed sector
        Real best = std::numeric_limits<Real>::infinity();
        Index arg = 0;
        for (Index v = 0; v < m.num_vertices(); ++v) {
            const Vec2 p = m.vertices[std::size_t(v)];
            const Real d = chart == ChartKind::Polar
                               ? std::abs(norm(p) - r_probe) +
                                     std::abs(std::atan2(p.y, p.x) - kPi / 2)
                               : std::abs(p.x - r_probe) + std::abs(p.y - kPi / 2);
            if (d < best) {
                best = d;
                arg = v;
            }
        }
        return arg;
    }

    std::string name_;
    std::shared_ptr<MeshManifold> master_;
    std::vector<Real> radii_;
    Real probe_radius_;
    Real scale_;
    ChartKind chart_;
};

// Flat-plane style family on [a, 2^count * a]; sector picks full or half.
inline MeshExhaustionFamily make_flat_family(Real a, int count, Real h, bool half,
                                             Real probe_radius = 1.5) {
    std::vector<Real> radii;
    for (int j = 1; j <= count; ++j) radii.push_back(a * std::pow(2.0, j));
    auto master = half ? build_half_annulus_mesh(a, radii.back(), h, RadialGrading::LogPolar)
                       : build_annulus_mesh(a, radii.back(), h, RadialGrading::LogPolar);
    // flat meshes measure the true capacity directly; no sector rescaling
    return MeshExhaustionFamily(half ? "flat-half-plane" : "flat-plane", std::move(master), radii,
                                probe_radius, 1.0);
}

// Model-metric family: the master is the warped annulus between a and the
// largest radius; capacities are rescaled to model normalization.
inline MeshExhaustionFamily make_model_mesh_family(const std::string& name,
                                                   const ModelManifold& model, Real a,
                                                   std::vector<Real> radii, Real h,
                                                   Real probe_radius = 1.5) {
    const bool half = std::abs(model.sector_fraction() - 0.5) < 1e-12;
    auto mesh = build_model_annulus_mesh(model, a, radii.back(), h);
    return MeshExhaustionFamily(name, std::move(mesh), std::move(radii), probe_radius,
                                model_capacity_scale(model, half),
                                half ? ChartKind::Rect : ChartKind::Polar);
}

// ---------------------------------------------------------------------------
// Model-backed family: the 1-D radial reduction, solved by quadrature.
// ---------------------------------------------------------------------------

class ModelExhaustionFamily : public ExhaustionFamily {
  public:
    ModelExhaustionFamily(std::string name, ModelManifold model, Real a, std::vector<Real> radii,
                          Real probe_radius = 1.5)
        : name_(std::move(name)), model_(std::move(model)), a_(a), radii_(std::move(radii)),
          probe_(probe_radius) {}

    std::string name() const override { return name_; }
    int size() const override { return int(radii_.size()); }
    Real outer_radius(int j) const override { return radii_.at(std::size_t(j)); }

    std::pair<Real, Real> capacity_member(int j) const override {
        const Real b = radii_.at(std::size_t(j));
        const Real cap = radial_capacity_oracle(model_, a_, b);
        // radial equilibrium potential: u(r) = resistance(r, b) / resistance(a, b)
        const Real denom = radial_resistance(model_, a_, b).value;
        const Real num = probe_ < b ? radial_resistance(model_, probe_, b).value : 0.0;
        return {cap, denom > 0 ? num / denom : 1.0};
    }

    const ModelManifold& model() const { return model_; }
    Real inner_radius() const { return a_; }

  private:
    std::string name_;
    ModelManifold model_;
    Real a_;
    std::vector<Real> radii_;
    Real probe_;
};

// ---------------------------------------------------------------------------
// Absolute capacity along the exhaustion.
// ---------------------------------------------------------------------------

inline ExhaustionReport absolute_capacity(const ExhaustionFamily& family, int j_max) {
    if (j_max < 3) throw InsufficientData("exhaustion needs j_max >= 3");
    j_max = std::min(j_max, family.size());
    ExhaustionReport report;
    std::vector<Real> caps, radii;
    for (int j = 0; j < j_max; ++j) {
        const auto [cap, pot] = family.capacity_member(j);
        report.rows.push_back({j + 1, family.outer_radius(j), cap, pot});
        caps.push_back(cap);
        radii.push_back(family.outer_radius(j));
        if (j > 0 && cap > caps[std::size_t(j - 1)] * (1 + 1e-6) + 1e-12)
            throw MonotonicityViolation("capacity increased along the exhaustion of '" +
                                        family.name() + "'");
    }
    const LimitEstimate est = classify_limit_sequence(caps, radii);
    report.classification = est.cls;
    report.limit_estimate = est.limit;
    report.extrapolation_note = est.note;
    return report;
}

} // namespace parlab

#endif
