#ifndef PARLAB_IO_HPP
#define PARLAB_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parlab/calculus.hpp"
#include "parlab/capacity.hpp"
#include "parlab/classify.hpp"
#include "parlab/common.hpp"
#include "parlab/graph.hpp"

namespace parlab {

using Json = nlohmann::ordered_json;

// 17 significant digits round-trip doubles losslessly.
inline std::string format_real(Real x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Write-to-temp then rename: no partial outputs on failure.
inline void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename to '" + path + "' failed: " + ec.message());
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Real>> rows;

    std::string to_string() const {
        std::string out;
        for (std::size_t c = 0; c < columns.size(); ++c)
            out += (c ? "," : "") + columns[c];
        out += "\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out += (c ? "," : "") + format_real(row[c]);
            out += "\n";
        }
        return out;
    }
};

inline void write_csv(const std::string& path, const CsvTable& table) {
    atomic_write_file(path, table.to_string());
}

// ---------------------------------------------------------------------------
// JSON views of the report types.
// ---------------------------------------------------------------------------

inline Json to_json(const CapacityResult& r) {
    Json j;
    j["value"] = r.value;
    j["energy_residual"] = r.energy_residual;
    return j;
}

inline CsvTable potential_csv(const ScalarField& u) {
    CsvTable t;
    t.columns = {"vertex", "value"};
    for (std::size_t v = 0; v < u.values.size(); ++v)
        t.rows.push_back({Real(v), u.values[v]});
    return t;
}

inline Json to_json(const ExhaustionReport& r) {
    Json j;
    j["classification"] = to_string(r.classification);
    j["limit_estimate"] = r.limit_estimate;
    j["extrapolation_note"] = r.extrapolation_note;
    return j;
}

inline CsvTable exhaustion_csv(const ExhaustionReport& r) {
    CsvTable t;
    t.columns = {"j", "outer_radius", "capacity", "potential_at_o"};
    for (const auto& row : r.rows)
        t.rows.push_back({Real(row.j), row.outer_radius, row.capacity, row.potential_at_o});
    return t;
}

inline Json to_json(const Classification& c) {
    Json j;
    j["verdict"] = to_string(c.verdict);
    j["method"] = to_string(c.method);
    j["note"] = c.note;
    return j;
}

inline CsvTable evidence_csv(const Classification& c) {
    CsvTable t;
    t.columns = c.evidence_columns;
    t.rows = c.evidence;
    return t;
}

inline Json to_json(const WalkEstimate& w) {
    Json j;
    j["trials"] = w.trials;
    j["hits_K"] = w.hits_K;
    j["p_hat"] = w.p_hat;
    j["std_err"] = w.std_err;
    j["seed"] = w.seed;
    return j;
}

inline Json to_json(const WeakPairingReport& r) {
    Json j;
    j["worst_vertex"] = r.worst_vertex;
    j["worst_value"] = r.worst_value;
    j["pass"] = r.pass;
    j["tolerance"] = r.tolerance;
    return j;
}

inline Json to_json(const AhlforsReport& r) {
    Json j;
    j["sup_D"] = r.sup_D;
    j["sup_boundary0"] = r.sup_boundary0;
    j["gap"] = r.gap;
    j["argmax"] = r.argmax;
    return j;
}

inline Json to_json(const StokesLimitReport& r) {
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["f_integral"] = r.f_integral;
    j["note"] = r.note;
    return j;
}

inline CsvTable stokes_csv(const StokesLimitReport& r) {
    CsvTable t;
    t.columns = {"j", "interior", "d1_flux", "d0_leak", "l2_norm_sq"};
    for (const auto& row : r.rows)
        t.rows.push_back({Real(row.j), row.interior, row.d1_flux, row.d0_leak, row.l2_norm_sq});
    return t;
}

inline Json to_json(const HeightReport& r) {
    Json j;
    j["min_height"] = r.min_height;
    j["max_height"] = r.max_height;
    j["slack"] = r.slack;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    return j;
}

inline Json to_json(const CmcSolveResult& r) {
    Json j;
    j["status"] = to_string(r.status);
    j["newton_iterations"] = r.newton_iterations;
    j["continuation_steps"] = r.continuation_steps;
    j["final_residual"] = r.final_residual;
    return j;
}

inline Json to_json(const LiouvilleReport& r) {
    Json j;
    j["fraction_holding"] = r.fraction_holding;
    j["integrated_ok"] = r.integrated_ok;
    j["note_constant"] = r.note_constant;
    j["normalization_shift"] = r.normalization_shift;
    return j;
}

inline CsvTable liouville_csv(const LiouvilleReport& r) {
    CsvTable t;
    t.columns = {"radius", "energy", "area", "fd_lhs", "fd_rhs", "holds", "integrated_bound"};
    for (const auto& row : r.rows)
        t.rows.push_back({row.radius, row.energy, row.area, row.fd_lhs, row.fd_rhs,
                          Real(row.holds ? 1 : 0), row.integrated_bound});
    return t;
}

inline Json to_json(const SliceReport& r) {
    Json j;
    j["max_mean_curvature"] = r.max_mean_curvature;
    j["curvature_tolerance"] = r.curvature_tolerance;
    j["angle_condition_ok"] = r.angle_condition_ok;
    j["worst_d1_flux"] = r.worst_d1_flux;
    j["d1_max_height"] = r.d1_max_height;
    j["constancy_deficit"] = r.constancy_deficit;
    j["deficit_tolerance"] = r.deficit_tolerance;
    return j;
}

inline CsvTable slice_csv(const SliceReport& r) {
    CsvTable t;
    t.columns = {"threshold", "superlevel_volume", "boundary_avoids"};
    for (const auto& row : r.thresholds)
        t.rows.push_back({row.threshold, row.superlevel_volume, Real(row.boundary_avoids ? 1 : 0)});
    return t;
}

inline Json to_json(const ImplicationReport& r) {
    Json j;
    j["any_violation"] = r.any_violation;
    auto& rows = j["families"] = Json::array();
    for (const auto& row : r.rows) {
        Json e;
        e["family"] = row.family;
        e["n_verdict"] = to_string(row.n_verdict);
        e["checked"] = row.checked;
        e["worst_ahlfors_gap"] = row.worst_ahlfors_gap;
        e["d_verdict"] = to_string(row.d_verdict);
        e["ahlfors_violated"] = row.ahlfors_violated;
        e["d_violated"] = row.d_violated;
        rows.push_back(e);
    }
    return j;
}

inline Json to_json(const BallGrowthTable& t) {
    Json j;
    j["center"] = t.center;
    auto& rows = j["rows"] = Json::array();
    for (const auto& row : t.rows) rows.push_back({row.radius, row.volume, row.area});
    return j;
}

inline CsvTable growth_csv(const BallGrowthTable& t) {
    CsvTable c;
    c.columns = {"radius", "volume", "area"};
    for (const auto& row : t.rows) c.rows.push_back({row.radius, row.volume, row.area});
    return c;
}

} // namespace parlab

#endif
