#ifndef PARLAB_MESH_IO_HPP
#define PARLAB_MESH_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "parlab/common.hpp"
#include "parlab/mesh.hpp"

namespace parlab {

// Mesh file schema: a single JSON document
//   {"dim": 2, "vertices": [[x,y(,z)]...], "triangles": [[i,j,k]...],
//    "boundary_edges": [{"v":[i,j],"label":"d0"|"d1","marker":...}...],
//    "metric": null | [[[a,b],[b,c]]...]}
// Writers emit keys in this order; readers accept any order.

inline nlohmann::ordered_json mesh_to_json(const MeshManifold& m) {
    nlohmann::ordered_json j;
    j["dim"] = 2;
    auto& verts = j["vertices"] = nlohmann::ordered_json::array();
    for (Index v = 0; v < m.num_vertices(); ++v) {
        const auto& p = m.vertices[std::size_t(v)];
        if (m.has_heights())
            verts.push_back({p.x, p.y, m.heights[std::size_t(v)]});
        else
            verts.push_back({p.x, p.y});
    }
    auto& tris = j["triangles"] = nlohmann::ordered_json::array();
    for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
    auto& bes = j["boundary_edges"] = nlohmann::ordered_json::array();
    for (const auto& be : m.boundary_edges) {
        nlohmann::ordered_json e;
        e["v"] = {be.v0, be.v1};
        e["label"] = to_string(be.label);
        e["marker"] = be.marker;
        bes.push_back(e);
    }
    if (m.has_metric()) {
        auto& met = j["metric"] = nlohmann::ordered_json::array();
        for (const auto& g : m.metric) met.push_back({{g.a, g.b}, {g.b, g.c}});
    } else {
        j["metric"] = nullptr;
    }
    return j;
}

inline MeshManifold mesh_from_json(const nlohmann::json& j) {
    MeshManifold m;
    try {
        for (const auto& v : j.at("vertices")) {
            m.vertices.push_back({v.at(0).get<Real>(), v.at(1).get<Real>()});
            if (v.size() > 2) m.heights.push_back(v.at(2).get<Real>());
        }
        if (!m.heights.empty() && m.heights.size() != m.vertices.size())
            throw ParseError("mixed 2-D and 3-D vertices");
        for (const auto& t : j.at("triangles"))
            m.triangles.push_back({t.at(0).get<Index>(), t.at(1).get<Index>(), t.at(2).get<Index>()});
        for (const auto& e : j.at("boundary_edges")) {
            BoundaryEdge be;
            be.v0 = e.at("v").at(0).get<Index>();
            be.v1 = e.at("v").at(1).get<Index>();
            const std::string label = e.at("label").get<std::string>();
            if (label == "d0") be.label = BoundaryLabel::D0;
            else if (label == "d1") be.label = BoundaryLabel::D1;
            else throw ParseError("boundary label must be 'd0' or 'd1'");
            be.marker = e.value("marker", std::string{});
            m.boundary_edges.push_back(be);
        }
        if (j.contains("metric") && !j.at("metric").is_null()) {
            for (const auto& g : j.at("metric")) {
                m.metric.push_back({g.at(0).at(0).get<Real>(), g.at(0).at(1).get<Real>(),
                                    g.at(1).at(1).get<Real>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed mesh document: ") + e.what());
    }
    validate(m);
    return m;
}

inline void save_mesh(const MeshManifold& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << mesh_to_json(m).dump(1) << "\n";
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline MeshManifold load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return mesh_from_json(j);
}

} // namespace parlab

#endif
