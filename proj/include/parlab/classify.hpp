#ifndef PARLAB_CLASSIFY_HPP
#define PARLAB_CLASSIFY_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "parlab/capacity.hpp"
#include "parlab/clipping.hpp"
#include "parlab/common.hpp"
#include "parlab/exhaustion.hpp"
#include "parlab/fem.hpp"
#include "parlab/model.hpp"
#include "parlab/rng.hpp"

namespace parlab {

enum class Verdict { Parabolic, NonParabolic, Inconclusive };
enum class ClassifyMethod { VolumeCriterion, AreaCriterion, CapacityDecay, WalkEstimate, DParabolicTest };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Parabolic: return "Parabolic";
        case Verdict::NonParabolic: return "NonParabolic";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

inline std::string to_string(ClassifyMethod m) {
    switch (m) {
        case ClassifyMethod::VolumeCriterion: return "VolumeCriterion";
        case ClassifyMethod::AreaCriterion: return "AreaCriterion";
        case ClassifyMethod::CapacityDecay: return "CapacityDecay";
        case ClassifyMethod::WalkEstimate: return "WalkEstimate";
        case ClassifyMethod::DParabolicTest: return "DParabolicTest";
    }
    return "?";
}

struct Classification {
    Verdict verdict = Verdict::Inconclusive;
    ClassifyMethod method = ClassifyMethod::VolumeCriterion;
    std::vector<std::string> evidence_columns;
    std::vector<std::vector<Real>> evidence;
    std::string note;
};

// ---------------------------------------------------------------------------
// Integral criteria: int^inf R/vol(B_R) and int^inf dR/Area(d0 B_R). The
// integral is sampled over dyadic windows; divergence is declared when the
// tail window contributions stop decaying (log2-slope >= -1 + eps_slope).
// Sufficient conditions only: the verdict is Parabolic or Inconclusive.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr Real kSlopeEps = 0.1;
inline constexpr int kDyadicWindows = 10;

template <class F>
Classification dyadic_divergence_test(ClassifyMethod method, const F& integrand, Real r_min,
                                      Real r_max) {
    if (!(r_max > 0) || !(r_max / 2 <= r_max))
        throw InsufficientData("invalid probing range");
    if (r_min > r_max / std::pow(2.0, kDyadicWindows - 1))
        throw InsufficientData("need at least 10 dyadic probe points above the data floor");
    Classification cls;
    cls.method = method;
    cls.evidence_columns = {"window_lo", "window_hi", "contribution"};
    std::vector<Real> contributions;
    for (int k = kDyadicWindows - 1; k >= 0; --k) {
        const Real hi = r_max / std::pow(2.0, k);
        const Real lo = hi / 2;
        // trapezoid over the window; the integrands are smooth and positive
        const int ns = 32;
        Real acc = 0;
        Real prev = integrand(lo);
        for (int s = 1; s <= ns; ++s) {
            const Real r = lo + (hi - lo) * Real(s) / ns;
            const Real cur = integrand(r);
            acc += 0.5 * (prev + cur) * (hi - lo) / ns;
            prev = cur;
        }
        contributions.push_back(acc);
        cls.evidence.push_back({lo, hi, acc});
    }
    // median log2-ratio over the last windows
    std::vector<Real> slopes;
    const std::size_t nfit = 4;
    for (std::size_t i = contributions.size() - std::min(contributions.size() - 1, nfit);
         i < contributions.size(); ++i) {
        if (contributions[i - 1] > 0 && contributions[i] > 0)
            slopes.push_back(std::log2(contributions[i] / contributions[i - 1]));
    }
    if (slopes.empty()) throw InsufficientData("window contributions vanished");
    std::sort(slopes.begin(), slopes.end());
    const Real sigma = slopes[slopes.size() / 2];
    cls.note = "tail log2-slope " + std::to_string(sigma);
    cls.verdict = sigma >= -1.0 + kSlopeEps ? Verdict::Parabolic : Verdict::Inconclusive;
    return cls;
}

struct GrowthData {
    std::function<Real(Real)> volume;
    std::function<Real(Real)> area;
    Real r_min = 0;
};

inline GrowthData growth_from_model(const ModelManifold& model) {
    GrowthData g;
    g.volume = [&model](Real R) { return ball_volume(model, R); };
    g.area = [&model](Real R) { return sphere_area(model, R); };
    g.r_min = 0;
    return g;
}

inline GrowthData growth_from_table(const BallGrowthTable& table) {
    if (table.rows.size() < 2) throw InsufficientData("growth table has fewer than two rows");
    GrowthData g;
    auto interp = [rows = table.rows](Real R, bool area) {
        if (R <= rows.front().radius)
            return area ? rows.front().area : rows.front().volume;
        if (R >= rows.back().radius) return area ? rows.back().area : rows.back().volume;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            if (R <= rows[i + 1].radius) {
                const Real t = (R - rows[i].radius) / (rows[i + 1].radius - rows[i].radius);
                const Real a = area ? rows[i].area : rows[i].volume;
                const Real b = area ? rows[i + 1].area : rows[i + 1].volume;
                return a + t * (b - a);
            }
        }
        return area ? rows.back().area : rows.back().volume;
    };
    g.volume = [interp](Real R) { return interp(R, false); };
    g.area = [interp](Real R) { return interp(R, true); };
    g.r_min = table.rows.front().radius;
    return g;
}

inline Classification volume_criterion_impl(const GrowthData& g, Real r_max) {
    return dyadic_divergence_test(
        ClassifyMethod::VolumeCriterion,
        [&](Real R) {
            const Real v = g.volume(R);
            if (!(v > 0)) throw InsufficientData("ball volume not positive at probe radius");
            return R / v;
        },
        g.r_min, r_max);
}

inline Classification area_criterion_impl(const GrowthData& g, Real r_max) {
    return dyadic_divergence_test(
        ClassifyMethod::AreaCriterion,
        [&](Real R) {
            const Real a = g.area(R);
            if (!(a > 0)) throw InsufficientData("sphere area not positive at probe radius");
            return 1.0 / a;
        },
        g.r_min, r_max);
}

} // namespace detail

inline Classification volume_criterion(const ModelManifold& model, Real r_max) {
    return detail::volume_criterion_impl(detail::growth_from_model(model), r_max);
}
inline Classification volume_criterion(const BallGrowthTable& table, Real r_max) {
    return detail::volume_criterion_impl(detail::growth_from_table(table), r_max);
}
inline Classification area_criterion(const ModelManifold& model, Real r_max) {
    return detail::area_criterion_impl(detail::growth_from_model(model), r_max);
}
inline Classification area_criterion(const BallGrowthTable& table, Real r_max) {
    return detail::area_criterion_impl(detail::growth_from_table(table), r_max);
}

// ---------------------------------------------------------------------------
// Capacity decay along an exhaustion (Theorem: zero absolute capacity of
// every compact set is equivalent to parabolicity).
// ---------------------------------------------------------------------------

inline Classification capacity_decay_test(const ExhaustionFamily& family, int j_max) {
    const ExhaustionReport report = absolute_capacity(family, j_max);
    Classification cls;
    cls.method = ClassifyMethod::CapacityDecay;
    cls.evidence_columns = {"j", "outer_radius", "capacity", "potential_at_o"};
    for (const auto& row : report.rows)
        cls.evidence.push_back({Real(row.j), row.outer_radius, row.capacity, row.potential_at_o});
    cls.note = report.extrapolation_note;
    switch (report.classification) {
        case LimitClass::DecaysToZero: cls.verdict = Verdict::Parabolic; break;
        case LimitClass::PositiveLimit: cls.verdict = Verdict::NonParabolic; break;
        case LimitClass::Undetermined: cls.verdict = Verdict::Inconclusive; break;
    }
    return cls;
}

// ---------------------------------------------------------------------------
// Reflected random walk on vertices with transition probabilities
// proportional to the positive stiffness couplings. The absorption
// probability into K then equals the discrete equilibrium potential at the
// start vertex exactly in expectation.
// ---------------------------------------------------------------------------

struct WalkEstimate {
    long trials = 0;
    long hits_K = 0;
    Real p_hat = 0;
    Real std_err = 0;
    std::uint64_t seed = 0;
};

namespace detail {

struct AliasTable {
    std::vector<int> alias;
    std::vector<Real> prob;
    std::vector<Index> targets;

    void build(const std::vector<Real>& w, const std::vector<Index>& t) {
        targets = t;
        const int n = int(w.size());
        alias.assign(std::size_t(n), 0);
        prob.assign(std::size_t(n), 1.0);
        Real total = 0;
        for (Real x : w) total += x;
        std::vector<Real> scaled(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) scaled[i] = w[i] / total * n;
        std::vector<int> small, large;
        for (int i = 0; i < n; ++i) (scaled[std::size_t(i)] < 1 ? small : large).push_back(i);
        while (!small.empty() && !large.empty()) {
            const int s = small.back();
            small.pop_back();
            const int l = large.back();
            prob[std::size_t(s)] = scaled[std::size_t(s)];
            alias[std::size_t(s)] = l;
            scaled[std::size_t(l)] -= 1 - scaled[std::size_t(s)];
            if (scaled[std::size_t(l)] < 1) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (int i : small) prob[std::size_t(i)] = 1.0;
        for (int i : large) prob[std::size_t(i)] = 1.0;
    }

    Index sample(CounterRng& rng) const {
        const int k = int(rng.next_below(std::uint64_t(prob.size())));
        return rng.next_real() < prob[std::size_t(k)] ? targets[std::size_t(k)]
                                                      : targets[std::size_t(alias[std::size_t(k)])];
    }
};

inline int thread_budget() {
    if (const char* env = std::getenv("PARLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

} // namespace detail

inline WalkEstimate reflected_walk_test(const MeshManifold& mesh, const std::vector<Index>& K,
                                        const std::string& outer_marker, long trials,
                                        std::uint64_t seed, Index start) {
    if (trials < 1000) throw PreconditionViolated("walk needs at least 1000 trials");
    const auto outer = vertices_on_marker(mesh, outer_marker);
    if (outer.empty()) throw NonAbsorbingConfiguration("outer marker has no vertices");

    const Index nv = mesh.num_vertices();
    std::vector<int> state(std::size_t(nv), 0); // 0 free, 1 hit-K, 2 miss
    for (Index v : K) state[std::size_t(v)] = 1;
    for (Index v : outer) state[std::size_t(v)] = 2;
    if (start < 0 || start >= nv || state[std::size_t(start)] != 0)
        throw PreconditionViolated("start vertex must lie outside K and the outer boundary");

    const SparseMatrix S = assemble_stiffness(mesh);
    std::vector<std::vector<Real>> weights(static_cast<std::size_t>(nv));
    std::vector<std::vector<Index>> targets(static_cast<std::size_t>(nv));
    std::vector<Real> diag(std::size_t(nv), 0);
    for (int col = 0; col < S.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(S, col); it; ++it)
            if (it.row() == it.col()) diag[std::size_t(it.row())] = it.value();
    for (int col = 0; col < S.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(S, col); it; ++it) {
            if (it.row() == it.col()) continue;
            const Real w = -it.value();
            const Index i = Index(it.row()), j = Index(it.col());
            const Real scale = std::max(diag[std::size_t(i)], diag[std::size_t(j)]);
            if (w < -1e-10 * scale)
                throw ObtuseMeshUnsupported("negative stiffness coupling encountered");
            if (w > 0) {
                weights[std::size_t(i)].push_back(w);
                targets[std::size_t(i)].push_back(j);
            }
        }
    }

    // absorbing set must be reachable through positive couplings
    {
        std::vector<char> seen(std::size_t(nv), 0);
        std::queue<Index> q;
        q.push(start);
        seen[std::size_t(start)] = 1;
        bool reachable = false;
        while (!q.empty() && !reachable) {
            const Index v = q.front();
            q.pop();
            if (state[std::size_t(v)] != 0) {
                reachable = true;
                break;
            }
            for (Index w : targets[std::size_t(v)])
                if (!seen[std::size_t(w)]) {
                    seen[std::size_t(w)] = 1;
                    q.push(w);
                }
        }
        if (!reachable) throw NonAbsorbingConfiguration("no absorbing vertex reachable from start");
    }

    std::vector<detail::AliasTable> alias(static_cast<std::size_t>(nv));
    for (Index v = 0; v < nv; ++v)
        if (state[std::size_t(v)] == 0 && !weights[std::size_t(v)].empty())
            alias[std::size_t(v)].build(weights[std::size_t(v)], targets[std::size_t(v)]);

    const int n_threads = std::min<long>(detail::thread_budget(), std::max<long>(1, trials / 1000));
    std::atomic<long> hits{0};
    auto run_range = [&](long lo, long hi) {
        long local = 0;
        for (long t = lo; t < hi; ++t) {
            CounterRng rng(seed, std::uint64_t(t));
            Index v = start;
            while (state[std::size_t(v)] == 0) v = alias[std::size_t(v)].sample(rng);
            if (state[std::size_t(v)] == 1) ++local;
        }
        hits += local;
    };
    if (n_threads <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (trials + n_threads - 1) / n_threads;
        for (int k = 0; k < n_threads; ++k)
            pool.emplace_back(run_range, k * chunk, std::min<long>(trials, (k + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    WalkEstimate est;
    est.trials = trials;
    est.hits_K = hits.load();
    est.p_hat = Real(est.hits_K) / Real(trials);
    est.std_err = std::sqrt(std::max<Real>(est.p_hat * (1 - est.p_hat), 1e-12) / Real(trials));
    est.seed = seed;
    return est;
}

// ---------------------------------------------------------------------------
// D-parabolicity: solve Delta u = 0 with u = 0 on the true boundary and
// u = 1 on the exhaustion boundary; the escape probability u_j(o) vanishes in
// the limit exactly on D-parabolic families.
// ---------------------------------------------------------------------------

inline Classification d_parabolicity_test(const ExhaustionFamily& family, int j_max) {
    if (!family.has_meshes())
        throw PreconditionViolated("D-parabolicity needs meshed members with a true boundary");
    j_max = std::min(j_max, family.size());
    Classification cls;
    cls.method = ClassifyMethod::DParabolicTest;
    cls.evidence_columns = {"j", "outer_radius", "u_at_o"};
    std::vector<Real> values, radii;
    for (int j = 0; j < j_max; ++j) {
        const ExhaustionMember mem = family.member(j);
        const auto d1 = vertices_on_label(*mem.mesh, BoundaryLabel::D1);
        if (d1.empty()) throw PreconditionViolated("family member has no d1 boundary");
        std::map<Index, Real> fixed;
        // corner vertices sit on both the wall and the cut; the true boundary
        // (absorbing floor) wins there
        for (Index v : mem.outer) fixed[v] = 1.0;
        for (Index v : d1) fixed[v] = 0.0;
        const SparseMatrix S = assemble_stiffness(*mem.mesh);
        const ScalarField u = solve_constrained(*mem.mesh, S,
                                                DenseVector::Zero(mem.mesh->num_vertices()), fixed);
        values.push_back(u[mem.probe]);
        radii.push_back(mem.outer_radius);
        cls.evidence.push_back({Real(j + 1), mem.outer_radius, u[mem.probe]});
    }
    if (values.size() < 3) {
        cls.verdict = Verdict::Inconclusive;
        cls.note = "fewer than three members";
        return cls;
    }
    const LimitEstimate est = classify_limit_sequence(values, radii);
    cls.note = est.note;
    switch (est.cls) {
        case LimitClass::DecaysToZero: cls.verdict = Verdict::Parabolic; break;
        case LimitClass::PositiveLimit: cls.verdict = Verdict::NonParabolic; break;
        case LimitClass::Undetermined: cls.verdict = Verdict::Inconclusive; break;
    }
    return cls;
}

// ---------------------------------------------------------------------------
// Appendix implications: N-parabolic => Ahlfors property, N => D. For every
// family whose (possibly claimed) N-verdict is Parabolic, the equilibrium
// potentials must attain their maximum on the d0 data set and the D-test must
// not come back NonParabolic.
// ---------------------------------------------------------------------------

struct ImplicationEntry {
    const ExhaustionFamily* family = nullptr;
    std::optional<Verdict> claimed; // override for negative-path tests
};

struct ImplicationRow {
    std::string family;
    Verdict n_verdict = Verdict::Inconclusive;
    bool checked = false;
    Real worst_ahlfors_gap = 0;
    Verdict d_verdict = Verdict::Inconclusive;
    bool ahlfors_violated = false;
    bool d_violated = false;
};

struct ImplicationReport {
    std::vector<ImplicationRow> rows;
    bool any_violation = false;
};

inline ImplicationReport implication_check(const std::vector<ImplicationEntry>& suite,
                                           int j_max = 6, Real gap_tol = 1e-10) {
    ImplicationReport report;
    for (const auto& entry : suite) {
        const ExhaustionFamily& fam = *entry.family;
        ImplicationRow row;
        row.family = fam.name();
        row.n_verdict = entry.claimed ? *entry.claimed : capacity_decay_test(fam, j_max).verdict;
        if (row.n_verdict != Verdict::Parabolic || !fam.has_meshes()) {
            report.rows.push_back(row);
            continue;
        }
        row.checked = true;
        const int jj = std::min(j_max, fam.size());
        for (int j = 0; j < jj; ++j) {
            const ExhaustionMember mem = fam.member(j);
            Condenser c{mem.mesh.get(), mem.plate, mem.outer};
            const CapacityResult res = condenser_capacity(c);
            Real sup_all = -std::numeric_limits<Real>::infinity();
            Real sup_d0 = -std::numeric_limits<Real>::infinity();
            for (Index v = 0; v < mem.mesh->num_vertices(); ++v)
                sup_all = std::max(sup_all, res.potential[v]);
            for (Index v : mem.plate) sup_d0 = std::max(sup_d0, res.potential[v]);
            for (Index v : mem.outer) sup_d0 = std::max(sup_d0, res.potential[v]);
            row.worst_ahlfors_gap = std::max(row.worst_ahlfors_gap, sup_all - sup_d0);
        }
        row.ahlfors_violated = row.worst_ahlfors_gap > gap_tol;
        row.d_verdict = d_parabolicity_test(fam, j_max).verdict;
        row.d_violated = row.d_verdict == Verdict::NonParabolic;
        report.any_violation |= row.ahlfors_violated || row.d_violated;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace parlab

#endif
