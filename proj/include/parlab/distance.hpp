#ifndef PARLAB_DISTANCE_HPP
#define PARLAB_DISTANCE_HPP

#include <map>
#include <queue>
#include <vector>

#include "parlab/clipping.hpp"
#include "parlab/common.hpp"
#include "parlab/mesh.hpp"

namespace parlab {

enum class DistanceMode {
    Exact,    // chart Euclidean distance; valid on flat meshes star-shaped about o
    Dijkstra, // shortest paths on the one-ring graph with edge-midpoint Steiner points
};

namespace detail {

// Graph nodes: vertices, then one Steiner node per undirected edge. Per
// triangle the graph carries the edge halves, the three midlines and the
// three medians, measured in the triangle metric; shared segments take the
// minimum over incident triangles. Dijkstra distances on this graph
// overestimate the geodesic distance monotonically.
inline std::vector<Real> steiner_dijkstra(const MeshManifold& m, Index o) {
    std::map<std::pair<Index, Index>, Index> steiner;
    Index next = m.num_vertices();
    auto et = edge_triangles(m);
    for (const auto& [e, ts] : et) steiner.emplace(e, next++);
    const Index n_nodes = next;

    std::map<std::pair<Index, Index>, Real> weight;
    auto add = [&](Index a, Index b, Real w) {
        const auto key = ekey(a, b);
        auto it = weight.find(key);
        if (it == weight.end() || w < it->second) weight[key] = w;
    };
    std::vector<Vec2> pos(static_cast<std::size_t>(n_nodes));
    for (Index v = 0; v < m.num_vertices(); ++v) pos[std::size_t(v)] = m.vertices[std::size_t(v)];
    for (const auto& [e, idx] : steiner)
        pos[std::size_t(idx)] =
            0.5 * (m.vertices[std::size_t(e.first)] + m.vertices[std::size_t(e.second)]);

    for (Index t = 0; t < m.num_triangles(); ++t) {
        const TriGeom tg = tri_geom(m, t);
        const Index a = tg.v[0], b = tg.v[1], c = tg.v[2];
        const Index mab = steiner.at(ekey(a, b));
        const Index mbc = steiner.at(ekey(b, c));
        const Index mca = steiner.at(ekey(c, a));
        auto len = [&](Index i, Index j) {
            return metric_edge_length(tg.g, pos[std::size_t(j)] - pos[std::size_t(i)]);
        };
        const Index nodes[6] = {a, b, c, mab, mbc, mca};
        static const int pairs[][2] = {{0, 3}, {3, 1}, {1, 4}, {4, 2}, {2, 5}, {5, 0},
                                       {3, 4}, {4, 5}, {5, 3}, {0, 4}, {1, 5}, {2, 3}};
        for (const auto& p : pairs) add(nodes[p[0]], nodes[p[1]], len(nodes[p[0]], nodes[p[1]]));
    }

    std::vector<std::vector<std::pair<Index, Real>>> adj(static_cast<std::size_t>(n_nodes));
    for (const auto& [e, w] : weight) {
        adj[std::size_t(e.first)].push_back({e.second, w});
        adj[std::size_t(e.second)].push_back({e.first, w});
    }

    std::vector<Real> dist(std::size_t(n_nodes), std::numeric_limits<Real>::infinity());
    using QItem = std::pair<Real, Index>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
    dist[std::size_t(o)] = 0;
    pq.push({0, o});
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[std::size_t(u)]) continue;
        for (const auto& [v, w] : adj[std::size_t(u)]) {
            const Real nd = d + w;
            if (nd < dist[std::size_t(v)]) {
                dist[std::size_t(v)] = nd;
                pq.push({nd, v});
            }
        }
    }
    dist.resize(std::size_t(m.num_vertices()));
    return dist;
}

} // namespace detail

inline ScalarField distance_field(const MeshManifold& m, Index o,
                                  DistanceMode mode = DistanceMode::Dijkstra) {
    if (o < 0 || o >= m.num_vertices()) throw InvariantViolation("origin is not a vertex index");
    ScalarField d(m);
    if (mode == DistanceMode::Exact) {
        const Vec2 po = m.vertices[std::size_t(o)];
        for (Index v = 0; v < m.num_vertices(); ++v)
            d[v] = norm(m.vertices[std::size_t(v)] - po);
        return d;
    }
    auto dist = detail::steiner_dijkstra(m, o);
    for (Index v = 0; v < m.num_vertices(); ++v) {
        if (!finite(dist[std::size_t(v)]))
            throw DisconnectedMesh("vertex unreachable from the origin");
        d[v] = dist[std::size_t(v)];
    }
    return d;
}

inline BallGrowthTable ball_growth_samples(const MeshManifold& m, Index center,
                                           const std::vector<Real>& radii,
                                           DistanceMode mode = DistanceMode::Dijkstra) {
    return ball_growth_samples(m, distance_field(m, center, mode), center, radii);
}

} // namespace parlab

#endif
