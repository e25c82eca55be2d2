#include "fedsched/temporal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "fedsched/errors.hpp"

namespace fedsched {

namespace {

struct Adjacency {
    // neighbor node index -> edge index, per node, sorted by neighbor.
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> nbrs;
};

Adjacency build_adjacency(const SnapshotGraph& snapshot) {
    Adjacency adj;
    adj.nbrs.resize(snapshot.node_count());
    for (std::int32_t e = 0; e < static_cast<std::int32_t>(snapshot.edges.size()); ++e) {
        const EdgeRec& edge = snapshot.edges[e];
        adj.nbrs[edge.u].emplace_back(edge.v, e);
        adj.nbrs[edge.v].emplace_back(edge.u, e);
    }
    for (auto& list : adj.nbrs) std::sort(list.begin(), list.end());
    return adj;
}

RoutePath assemble_path(const SnapshotGraph& snapshot, std::vector<std::int32_t> nodes,
                        std::vector<std::int32_t> edge_indices) {
    RoutePath path;
    path.window_index = snapshot.window_index;
    path.nodes = std::move(nodes);
    path.edges.reserve(edge_indices.size());
    double min_bw = std::numeric_limits<double>::infinity();
    double delay = 0.0;
    for (std::int32_t e : edge_indices) {
        const EdgeRec& edge = snapshot.edges[e];
        path.edges.push_back(edge);
        min_bw = std::min(min_bw, edge.bandwidth_mbps);
        delay += edge.delay_ms;
    }
    path.bottleneck_mbps = min_bw;
    path.total_delay_ms = delay;
    return path;
}

void check_endpoints(const SnapshotGraph& snapshot, std::int32_t src, std::int32_t dst) {
    const auto n = static_cast<std::int32_t>(snapshot.node_count());
    if (src < 0 || src >= n || dst < 0 || dst >= n)
        throw BadInputError("route endpoints outside the node table");
    if (src == dst) throw BadInputError("route source equals destination");
}

// Hop distances from start, restricted to edges with bandwidth >= floor.
std::vector<std::int32_t> bfs_hops(const SnapshotGraph& snapshot, const Adjacency& adj,
                                   std::int32_t start, double bw_floor) {
    std::vector<std::int32_t> dist(snapshot.node_count(), -1);
    std::queue<std::int32_t> frontier;
    dist[start] = 0;
    frontier.push(start);
    while (!frontier.empty()) {
        const std::int32_t cur = frontier.front();
        frontier.pop();
        for (const auto& [nbr, e] : adj.nbrs[cur]) {
            if (snapshot.edges[e].bandwidth_mbps < bw_floor || dist[nbr] >= 0) continue;
            dist[nbr] = dist[cur] + 1;
            frontier.push(nbr);
        }
    }
    return dist;
}

} // namespace

NodeTablePtr make_node_table(std::vector<NodeInfo> nodes) {
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeInfo& a, const NodeInfo& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].id == nodes[i - 1].id)
            throw BadInputError("duplicate node id: " + nodes[i].id);
    return std::make_shared<const NodeTable>(std::move(nodes));
}

std::optional<std::int32_t> SnapshotGraph::find_node(std::string_view id) const {
    if (!nodes) return std::nullopt;
    auto it = std::lower_bound(nodes->begin(), nodes->end(), id,
                               [](const NodeInfo& n, std::string_view key) { return n.id < key; });
    if (it == nodes->end() || it->id != id) return std::nullopt;
    return static_cast<std::int32_t>(it - nodes->begin());
}

const SnapshotGraph& TemporalGraph::snapshot_at(double time_s) const {
    if (time_s < 0.0) throw BadInputError("snapshot_at: negative time");
    if (window_length_s <= 0.0 || snapshots.empty())
        throw OutOfHorizonError("snapshot_at: empty temporal graph");
    const auto idx = static_cast<long long>(std::floor(time_s / window_length_s));
    if (idx >= static_cast<long long>(snapshots.size()))
        throw OutOfHorizonError("time " + std::to_string(time_s) +
                                " s is beyond the temporal-graph horizon of " +
                                std::to_string(horizon_s()) + " s");
    return snapshots[static_cast<std::size_t>(idx)];
}

double bottleneck(std::span<const EdgeRec> edges) {
    if (edges.empty()) throw BadInputError("bottleneck of an empty path");
    double min_bw = edges[0].bandwidth_mbps;
    for (const EdgeRec& e : edges.subspan(1)) min_bw = std::min(min_bw, e.bandwidth_mbps);
    return min_bw;
}

RoutePath widest_path(const SnapshotGraph& snapshot, std::int32_t src, std::int32_t dst) {
    check_endpoints(snapshot, src, dst);
    const Adjacency adj = build_adjacency(snapshot);
    const std::size_t n = snapshot.node_count();

    // Phase 1: the max-min bottleneck value via a widest-first Dijkstra.
    std::vector<double> best(n, 0.0);
    best[src] = std::numeric_limits<double>::infinity();
    using QItem = std::pair<double, std::int32_t>; // (bottleneck, node)
    std::priority_queue<QItem> queue;
    queue.emplace(best[src], src);
    while (!queue.empty()) {
        const auto [width, cur] = queue.top();
        queue.pop();
        if (width < best[cur]) continue;
        for (const auto& [nbr, e] : adj.nbrs[cur]) {
            const double through = std::min(width, snapshot.edges[e].bandwidth_mbps);
            if (through > best[nbr]) {
                best[nbr] = through;
                queue.emplace(through, nbr);
            }
        }
    }
    if (best[dst] <= 0.0)
        throw NoRouteError("no route from " + snapshot.node_id(src) + " to " +
                           snapshot.node_id(dst) + " in window " +
                           std::to_string(snapshot.window_index));
    const double width = best[dst];

    // Phase 2: restrict to edges at or above the bottleneck and take the
    // lexicographically smallest hop-minimal path. Walking from src toward
    // dst while descending the BFS distance-to-dst field and always picking
    // the smallest neighbor index yields exactly that path.
    const std::vector<std::int32_t> to_dst = bfs_hops(snapshot, adj, dst, width);
    std::vector<std::int32_t> nodes{src};
    std::vector<std::int32_t> edges;
    std::int32_t cur = src;
    while (cur != dst) {
        std::int32_t next = -1, via = -1;
        for (const auto& [nbr, e] : adj.nbrs[cur]) {
            if (snapshot.edges[e].bandwidth_mbps < width) continue;
            if (to_dst[nbr] == to_dst[cur] - 1) {
                next = nbr;
                via = e;
                break; // neighbors sorted by index = sorted by id
            }
        }
        nodes.push_back(next);
        edges.push_back(via);
        cur = next;
    }
    return assemble_path(snapshot, std::move(nodes), std::move(edges));
}

RoutePath min_delay_path(const SnapshotGraph& snapshot, std::int32_t src, std::int32_t dst) {
    check_endpoints(snapshot, src, dst);
    const Adjacency adj = build_adjacency(snapshot);
    const std::size_t n = snapshot.node_count();

    struct Label {
        double delay = std::numeric_limits<double>::infinity();
        std::int32_t hops = 0;
    };
    auto dijkstra = [&](std::int32_t start) {
        std::vector<Label> label(n);
        label[start] = {0.0, 0};
        using QItem = std::tuple<double, std::int32_t, std::int32_t>; // (delay, hops, node)
        std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
        queue.emplace(0.0, 0, start);
        while (!queue.empty()) {
            const auto [delay, hops, cur] = queue.top();
            queue.pop();
            if (delay > label[cur].delay || (delay == label[cur].delay && hops > label[cur].hops))
                continue;
            for (const auto& [nbr, e] : adj.nbrs[cur]) {
                const double nd = delay + snapshot.edges[e].delay_ms;
                const std::int32_t nh = hops + 1;
                if (nd < label[nbr].delay ||
                    (nd == label[nbr].delay && nh < label[nbr].hops)) {
                    label[nbr] = {nd, nh};
                    queue.emplace(nd, nh, nbr);
                }
            }
        }
        return label;
    };

    const auto from_src = dijkstra(src);
    if (!std::isfinite(from_src[dst].delay))
        throw NoRouteError("no route from " + snapshot.node_id(src) + " to " +
                           snapshot.node_id(dst) + " in window " +
                           std::to_string(snapshot.window_index));
    const auto to_dst = dijkstra(dst);
    const double opt_delay = from_src[dst].delay;
    const std::int32_t opt_hops = from_src[dst].hops;
    constexpr double delay_tol = 1e-9; // ms; absorbs summation-order noise

    // Greedy lexicographic walk along edges that lie on some optimal path.
    std::vector<std::int32_t> nodes{src};
    std::vector<std::int32_t> edges;
    std::int32_t cur = src;
    while (cur != dst) {
        std::int32_t next = -1, via = -1;
        for (const auto& [nbr, e] : adj.nbrs[cur]) {
            const double d = from_src[cur].delay + snapshot.edges[e].delay_ms + to_dst[nbr].delay;
            const std::int32_t h = from_src[cur].hops + 1 + to_dst[nbr].hops;
            if (std::abs(d - opt_delay) <= delay_tol && h == opt_hops) {
                next = nbr;
                via = e;
                break;
            }
        }
        if (next < 0) throw NoRouteError("min-delay path reconstruction failed");
        nodes.push_back(next);
        edges.push_back(via);
        cur = next;
    }
    return assemble_path(snapshot, std::move(nodes), std::move(edges));
}

RoutePath route(const SnapshotGraph& snapshot, std::int32_t src, std::int32_t dst,
                PathMetric metric) {
    return metric == PathMetric::widest ? widest_path(snapshot, src, dst)
                                        : min_delay_path(snapshot, src, dst);
}

} // namespace fedsched
