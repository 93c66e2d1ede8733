#ifndef PARLAB_MODEL_HPP
#define PARLAB_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "parlab/common.hpp"
#include "parlab/quadrature.hpp"

namespace parlab {

enum class WarpKind { Euclidean, Hyperbolic, Cusp, Power, Table };

inline std::string to_string(WarpKind k) {
    switch (k) {
        case WarpKind::Euclidean: return "euclidean";
        case WarpKind::Hyperbolic: return "hyperbolic";
        case WarpKind::Cusp: return "cusp";
        case WarpKind::Power: return "power";
        case WarpKind::Table: return "table";
    }
    return "?";
}

// Surface area of the unit (m-1)-sphere in R^m.
inline Real unit_sphere_area(int m) { return 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m); }

// Rotationally symmetric model with warp f(r): metric dr^2 + f(r)^2 dtheta^2
// (and its higher-dimensional analogues). sector_fraction < 1 models a sector
// whose radial walls are the true boundary; 1/2 is the half-space model.
class ModelManifold {
  public:
    ModelManifold(WarpKind kind, std::vector<Real> params, int dim, Real sector_fraction)
        : kind_(kind), params_(std::move(params)), dim_(dim), sector_(sector_fraction) {
        if (dim_ < 2) throw InvariantViolation("model dimension must be >= 2");
        if (!(sector_ > 0) || sector_ > 1) throw InvalidFraction("sector_fraction must lie in (0,1]");
        if (kind_ == WarpKind::Power && params_.size() != 1)
            throw InvalidWarp("power warp needs exactly one exponent parameter");
        if (kind_ == WarpKind::Power && !(params_[0] > 0))
            throw InvalidWarp("power warp exponent must be positive");
        if (kind_ != WarpKind::Power && kind_ != WarpKind::Table && !params_.empty())
            throw InvalidWarp("warp kind takes no parameters");
        probe_positivity();
    }

    ModelManifold(std::vector<std::pair<Real, Real>> table, int dim, Real sector_fraction)
        : kind_(WarpKind::Table), dim_(dim), sector_(sector_fraction), table_(std::move(table)) {
        if (dim_ < 2) throw InvariantViolation("model dimension must be >= 2");
        if (!(sector_ > 0) || sector_ > 1) throw InvalidFraction("sector_fraction must lie in (0,1]");
        if (table_.size() < 2) throw InvalidWarp("sampled warp needs at least two rows");
        for (std::size_t i = 0; i + 1 < table_.size(); ++i)
            if (!(table_[i].first < table_[i + 1].first))
                throw InvalidWarp("sampled radii must be strictly increasing");
        probe_positivity();
    }

    WarpKind kind() const { return kind_; }
    int dim() const { return dim_; }
    Real sector_fraction() const { return sector_; }
    Real max_radius() const {
        return kind_ == WarpKind::Table ? table_.back().first
                                        : std::numeric_limits<Real>::infinity();
    }

    Real warp(Real r) const {
        switch (kind_) {
            case WarpKind::Euclidean: return r;
            case WarpKind::Hyperbolic: return std::sinh(r);
            case WarpKind::Cusp: return std::exp(-r);
            case WarpKind::Power: return std::pow(r, params_[0]);
            case WarpKind::Table: return interpolate(r);
        }
        return 0;
    }

  private:
    void probe_positivity() const {
        const Real hi = kind_ == WarpKind::Table ? table_.back().first : 16.0;
        for (int i = 1; i <= 256; ++i) {
            const Real r = hi * Real(i) / 256.0;
            if (!(warp_raw(r) > 0)) throw InvalidWarp("warp must be positive on (0, R]");
        }
    }

    Real warp_raw(Real r) const {
        if (kind_ == WarpKind::Table) return interpolate(r);
        switch (kind_) {
            case WarpKind::Euclidean: return r;
            case WarpKind::Hyperbolic: return std::sinh(r);
            case WarpKind::Cusp: return std::exp(-r);
            case WarpKind::Power: return std::pow(r, params_[0]);
            default: return 0;
        }
    }

    Real interpolate(Real r) const {
        if (r <= table_.front().first) return table_.front().second;
        if (r >= table_.back().first) return table_.back().second;
        auto it = std::upper_bound(table_.begin(), table_.end(), r,
                                   [](Real v, const auto& row) { return v < row.first; });
        const auto& [r1, f1] = *it;
        const auto& [r0, f0] = *(it - 1);
        const Real t = (r - r0) / (r1 - r0);
        return f0 + t * (f1 - f0);
    }

    WarpKind kind_;
    std::vector<Real> params_;
    int dim_;
    Real sector_;
    std::vector<std::pair<Real, Real>> table_;
};

inline ModelManifold build_model(WarpKind kind, const std::vector<Real>& params, int dim,
                                 Real sector_fraction) {
    return ModelManifold(kind, params, dim, sector_fraction);
}

inline ModelManifold build_model(const std::string& kind, const std::vector<Real>& params,
                                 int dim, Real sector_fraction) {
    if (kind == "euclidean") return build_model(WarpKind::Euclidean, params, dim, sector_fraction);
    if (kind == "hyperbolic") return build_model(WarpKind::Hyperbolic, params, dim, sector_fraction);
    if (kind == "cusp") return build_model(WarpKind::Cusp, params, dim, sector_fraction);
    if (kind == "power") return build_model(WarpKind::Power, params, dim, sector_fraction);
    throw InvalidWarp("unknown warp kind '" + kind + "'");
}

// vol B_R = sector * omega_{m-1} * int_0^R f(t)^{m-1} dt.
inline Real ball_volume(const ModelManifold& model, Real R) {
    if (R < 0) throw RadiusOutOfRange("ball radius must be non-negative");
    if (R == 0) return 0;
    const int m = model.dim();
    const Real scale = model.sector_fraction() * unit_sphere_area(m);
    switch (model.kind()) {
        case WarpKind::Euclidean:
            return scale * std::pow(R, m) / m;
        case WarpKind::Hyperbolic:
            if (m == 2) return scale * (std::cosh(R) - 1.0);
            break;
        case WarpKind::Cusp:
            if (m == 2) return scale * (1.0 - std::exp(-R));
            break;
        case WarpKind::Power: {
            // exponent alpha*(m-1) > -1 always holds here (alpha > 0).
            break;
        }
        case WarpKind::Table:
            break;
    }
    return scale * integrate([&](Real t) { return std::pow(model.warp(t), m - 1); }, 0.0, R);
}

// Area(d0 B_R) = sector * omega_{m-1} * f(R)^{m-1}.
inline Real sphere_area(const ModelManifold& model, Real R) {
    if (!(R > 0)) throw RadiusOutOfRange("sphere radius must be positive");
    return model.sector_fraction() * unit_sphere_area(model.dim()) *
           std::pow(model.warp(R), model.dim() - 1);
}

// int_a^b f(t)^{-(m-1)} dt, the radial resistance of the shell [a, b].
// b = +inf is admitted; divergence is signalled through the flag.
inline ImproperResult radial_resistance(const ModelManifold& model, Real a, Real b) {
    if (!(a > 0) || !(b > a)) throw RadiusOutOfRange("need 0 < a < b");
    const int m = model.dim();
    auto integrand = [&](Real t) { return std::pow(model.warp(t), -(m - 1)); };
    if (std::isinf(b)) return integrate_to_infinity(integrand, a);
    return {integrate(integrand, a, b), false};
}

} // namespace parlab

#endif
