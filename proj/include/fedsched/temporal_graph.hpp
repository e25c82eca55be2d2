#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fedsched {

enum class NodeKind { satellite, site };

struct NodeInfo {
    std::string id;
    NodeKind kind = NodeKind::satellite;
    std::string name;
};

/// Undirected edge between node-table indices, stored with u < v. The node
/// table is sorted by id, so index order doubles as lexicographic id order.
struct EdgeRec {
    std::int32_t u = 0;
    std::int32_t v = 0;
    double bandwidth_mbps = 0.0;
    double delay_ms = 0.0;
};

using NodeTable = std::vector<NodeInfo>;
using NodeTablePtr = std::shared_ptr<const NodeTable>;

/// Build a node table (sorted by id) from satellites and sites; throws on
/// duplicate ids.
NodeTablePtr make_node_table(std::vector<NodeInfo> nodes);

struct SnapshotGraph {
    int window_index = 0;
    double window_start_s = 0.0;
    double window_length_s = 0.0;
    NodeTablePtr nodes;
    std::vector<EdgeRec> edges; // sorted by (u, v), no duplicates, no self-loops

    std::size_t node_count() const { return nodes ? nodes->size() : 0; }
    const std::string& node_id(std::int32_t idx) const { return (*nodes)[idx].id; }
    /// Index of a node id, or nullopt when absent.
    std::optional<std::int32_t> find_node(std::string_view id) const;
};

struct TemporalGraph {
    double window_length_s = 0.0;
    NodeTablePtr nodes;
    std::vector<SnapshotGraph> snapshots; // contiguous window indices from 0

    double horizon_s() const { return static_cast<double>(snapshots.size()) * window_length_s; }
    /// Snapshot whose half-open window contains time_s; throws OutOfHorizon.
    const SnapshotGraph& snapshot_at(double time_s) const;
};

struct RoutePath {
    int window_index = 0;
    std::vector<std::int32_t> nodes; // source first
    std::vector<EdgeRec> edges;      // edges[i] joins nodes[i] and nodes[i+1]
    double bottleneck_mbps = 0.0;
    double total_delay_ms = 0.0;
};

enum class PathMetric { widest, min_delay };

/// Minimum bandwidth over a non-empty edge list; throws BadInput on empty.
double bottleneck(std::span<const EdgeRec> edges);

/// Max-bottleneck simple path from src to dst; ties broken by fewer hops,
/// then by the lexicographically smallest node-id sequence. Throws NoRoute.
RoutePath widest_path(const SnapshotGraph& snapshot, std::int32_t src, std::int32_t dst);

/// Minimum total propagation delay, same tie-breaking scheme.
RoutePath min_delay_path(const SnapshotGraph& snapshot, std::int32_t src, std::int32_t dst);

RoutePath route(const SnapshotGraph& snapshot, std::int32_t src, std::int32_t dst, PathMetric metric);

} // namespace fedsched
