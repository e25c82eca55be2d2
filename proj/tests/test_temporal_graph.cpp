#include <doctest.h>

#include <functional>
#include <set>

#include "fedsched/errors.hpp"
#include "fedsched/temporal_graph.hpp"
#include "test_helpers.hpp"

using namespace fedsched;
using namespace fedsched::testing;

TEST_CASE("bottleneck is the minimum over the edge list") {
    std::vector<EdgeRec> edges = {{0, 1, 20.0, 1.0}, {1, 2, 10.0, 1.0}, {2, 3, 30.0, 1.0}};
    CHECK(bottleneck(edges) == 10.0);
    edges.resize(1);
    edges[0].bandwidth_mbps = 15.0;
    CHECK(bottleneck(edges) == 15.0);
    CHECK_THROWS_AS(bottleneck(std::span<const EdgeRec>{}), BadInputError);
}

TEST_CASE("widest_path prefers the single wide edge over the narrow chain") {
    const SnapshotGraph snap = ToyGraph()
                                   .node("a")
                                   .node("b")
                                   .node("c")
                                   .edge("a", "b", 10.0)
                                   .edge("b", "c", 10.0)
                                   .edge("a", "c", 25.0)
                                   .snapshot();
    const RoutePath path = widest_path(snap, *snap.find_node("a"), *snap.find_node("c"));
    CHECK(path.bottleneck_mbps == 25.0);
    REQUIRE(path.nodes.size() == 2);
    CHECK(snap.node_id(path.nodes.front()) == "a");
    CHECK(snap.node_id(path.nodes.back()) == "c");
}

TEST_CASE("widest_path on a single edge") {
    const SnapshotGraph snap = ToyGraph().node("a").node("b").edge("a", "b", 15.0).snapshot();
    const RoutePath path = widest_path(snap, *snap.find_node("a"), *snap.find_node("b"));
    CHECK(path.bottleneck_mbps == 15.0);
    CHECK(path.edges.size() == 1);
}

TEST_CASE("widest_path raises NoRoute for an isolated destination") {
    const SnapshotGraph snap =
        ToyGraph().node("a").node("b").node("x").edge("a", "b", 5.0).snapshot();
    CHECK_THROWS_AS(widest_path(snap, *snap.find_node("a"), *snap.find_node("x")), NoRouteError);
}

TEST_CASE("widest_path matches the brute-force oracle on random graphs") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        SplitMix rng(hash_combine(0xabcdULL, seed));
        const int n = static_cast<int>(rng.uniform_int(4, 10));
        ToyGraph graph;
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) {
            ids.push_back("v" + std::to_string(i));
            graph.node(ids.back());
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform(0.0, 1.0) < 0.45)
                    graph.edge(ids[i], ids[j], rng.uniform(1.0, 40.0), rng.uniform(1.0, 10.0));
        const SnapshotGraph snap = graph.snapshot();
        const auto src = *snap.find_node(ids[0]);
        const auto dst = *snap.find_node(ids[n - 1]);
        const auto oracle = brute_force_widest(snap, src, dst);
        if (oracle.empty()) {
            CHECK_THROWS_AS(widest_path(snap, src, dst), NoRouteError);
            continue;
        }
        const RoutePath path = widest_path(snap, src, dst);
        CHECK(path.bottleneck_mbps == oracle.front().bottleneck);
        CHECK(static_cast<int>(path.edges.size()) == oracle.front().hops);
        std::vector<std::string> got;
        for (auto node : path.nodes) got.push_back(snap.node_id(node));
        CHECK(got == oracle.front().node_ids);
        // Internal consistency.
        CHECK(path.bottleneck_mbps == bottleneck(path.edges));
    }
}

TEST_CASE("removing an edge never increases the widest bottleneck") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        SplitMix rng(hash_combine(0x77ULL, seed));
        ToyGraph graph;
        const int n = 8;
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) {
            ids.push_back("v" + std::to_string(i));
            graph.node(ids.back());
        }
        std::vector<std::tuple<int, int, double>> edges;
        for (int i = 1; i < n; ++i) edges.emplace_back(static_cast<int>(rng.uniform_int(0, i - 1)), i,
                                                       rng.uniform(1.0, 40.0));
        for (int k = 0; k < 6; ++k) {
            int a = static_cast<int>(rng.uniform_int(0, n - 1));
            int b = static_cast<int>(rng.uniform_int(0, n - 1));
            if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b), rng.uniform(1.0, 40.0));
        }
        ToyGraph full = graph;
        std::set<std::pair<int, int>> seen;
        std::vector<std::tuple<int, int, double>> unique_edges;
        for (auto& [a, b, bw] : edges)
            if (seen.insert({a, b}).second) {
                full.edge(ids[a], ids[b], bw);
                unique_edges.emplace_back(a, b, bw);
            }
        const SnapshotGraph snap = full.snapshot();
        const auto src = *snap.find_node(ids[0]);
        const auto dst = *snap.find_node(ids[n - 1]);
        double full_width = 0.0;
        try {
            full_width = widest_path(snap, src, dst).bottleneck_mbps;
        } catch (const NoRouteError&) {
            continue;
        }
        // Drop one edge at a time.
        for (std::size_t drop = 0; drop < unique_edges.size(); ++drop) {
            ToyGraph reduced = graph;
            for (std::size_t e = 0; e < unique_edges.size(); ++e) {
                if (e == drop) continue;
                const auto& [a, b, bw] = unique_edges[e];
                reduced.edge(ids[a], ids[b], bw);
            }
            const SnapshotGraph rsnap = reduced.snapshot();
            double reduced_width = 0.0;
            try {
                reduced_width = widest_path(rsnap, src, dst).bottleneck_mbps;
            } catch (const NoRouteError&) {
                continue; // disconnection is an acceptable outcome of removal
            }
            CHECK(reduced_width <= full_width);
        }
    }
}

TEST_CASE("routes are simple paths with consecutive edges") {
    for (std::uint64_t seed = 400; seed < 430; ++seed) {
        const FuzzInstance instance = make_fuzz_instance(seed, 4);
        const SnapshotGraph& snap = instance.tg.snapshots.front();
        const auto src = *snap.find_node(instance.task.server_site);
        const auto dst = *snap.find_node(instance.task.clients.front().site_id);
        for (PathMetric metric : {PathMetric::widest, PathMetric::min_delay}) {
            const RoutePath path = route(snap, src, dst, metric);
            REQUIRE(path.nodes.size() == path.edges.size() + 1);
            CHECK(path.nodes.front() == src);
            CHECK(path.nodes.back() == dst);
            std::set<std::int32_t> seen(path.nodes.begin(), path.nodes.end());
            CHECK(seen.size() == path.nodes.size());
            double delay = 0.0;
            for (std::size_t e = 0; e < path.edges.size(); ++e) {
                const EdgeRec& edge = path.edges[e];
                const auto lo = std::min(path.nodes[e], path.nodes[e + 1]);
                const auto hi = std::max(path.nodes[e], path.nodes[e + 1]);
                CHECK(edge.u == lo);
                CHECK(edge.v == hi);
                delay += edge.delay_ms;
            }
            CHECK(path.total_delay_ms == doctest::Approx(delay).epsilon(1e-12));
        }
    }
}

TEST_CASE("widest_path is deterministic across repeated calls") {
    const FuzzInstance instance = make_fuzz_instance(7);
    const SnapshotGraph& snap = instance.tg.snapshots.front();
    const auto src = *snap.find_node(instance.task.server_site);
    const auto dst = *snap.find_node(instance.task.clients.front().site_id);
    const RoutePath first = widest_path(snap, src, dst);
    for (int i = 0; i < 5; ++i) {
        const RoutePath again = widest_path(snap, src, dst);
        CHECK(again.nodes == first.nodes);
        CHECK(again.bottleneck_mbps == first.bottleneck_mbps);
    }
}

TEST_CASE("min_delay_path minimizes total delay with deterministic tie-breaks") {
    const SnapshotGraph snap = ToyGraph()
                                   .node("a")
                                   .node("b")
                                   .node("c")
                                   .node("d")
                                   .edge("a", "b", 5.0, 2.0)
                                   .edge("b", "d", 5.0, 2.0)
                                   .edge("a", "c", 50.0, 10.0)
                                   .edge("c", "d", 50.0, 10.0)
                                   .snapshot();
    const RoutePath path = min_delay_path(snap, *snap.find_node("a"), *snap.find_node("d"));
    CHECK(path.total_delay_ms == doctest::Approx(4.0));
    REQUIRE(path.nodes.size() == 3);
    CHECK(snap.node_id(path.nodes[1]) == "b");
}

TEST_CASE("min_delay_path matches a brute-force oracle on random graphs") {
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
        SplitMix rng(hash_combine(0xde1a4ULL, seed));
        const int n = static_cast<int>(rng.uniform_int(4, 9));
        ToyGraph graph;
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) {
            ids.push_back("v" + std::to_string(i));
            graph.node(ids.back());
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform(0.0, 1.0) < 0.5)
                    graph.edge(ids[i], ids[j], rng.uniform(1.0, 40.0), rng.uniform(1.0, 30.0));
        const SnapshotGraph snap = graph.snapshot();
        const auto src = *snap.find_node(ids[0]);
        const auto dst = *snap.find_node(ids[n - 1]);

        // Enumerate every simple path and rank by (delay, hops, id sequence).
        std::vector<std::vector<std::pair<std::int32_t, const EdgeRec*>>> adj(snap.node_count());
        for (const EdgeRec& e : snap.edges) {
            adj[e.u].emplace_back(e.v, &e);
            adj[e.v].emplace_back(e.u, &e);
        }
        struct Candidate {
            double delay;
            int hops;
            std::vector<std::string> node_ids;
        };
        std::vector<Candidate> all;
        std::vector<bool> on_path(snap.node_count(), false);
        std::vector<std::int32_t> stack{src};
        std::function<void(std::int32_t, double)> dfs = [&](std::int32_t cur, double delay) {
            if (cur == dst) {
                Candidate c{delay, static_cast<int>(stack.size()) - 1, {}};
                for (auto node : stack) c.node_ids.push_back(snap.node_id(node));
                all.push_back(std::move(c));
                return;
            }
            on_path[cur] = true;
            for (const auto& [nbr, e] : adj[cur]) {
                if (on_path[nbr]) continue;
                stack.push_back(nbr);
                dfs(nbr, delay + e->delay_ms);
                stack.pop_back();
            }
            on_path[cur] = false;
        };
        dfs(src, 0.0);

        if (all.empty()) {
            CHECK_THROWS_AS(min_delay_path(snap, src, dst), NoRouteError);
            continue;
        }
        std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
            if (a.delay != b.delay) return a.delay < b.delay;
            if (a.hops != b.hops) return a.hops < b.hops;
            return a.node_ids < b.node_ids;
        });
        const RoutePath path = min_delay_path(snap, src, dst);
        CHECK(path.total_delay_ms == doctest::Approx(all.front().delay).epsilon(1e-12));
        CHECK(static_cast<int>(path.edges.size()) == all.front().hops);
        std::vector<std::string> got;
        for (auto node : path.nodes) got.push_back(snap.node_id(node));
        CHECK(got == all.front().node_ids);
    }
}

TEST_CASE("snapshot_at uses half-open windows and rejects times beyond the horizon") {
    const TemporalGraph tg = ToyGraph().node("a").node("b").edge("a", "b", 5.0).temporal(3, 10.0);
    CHECK(tg.snapshot_at(0.0).window_index == 0);
    CHECK(tg.snapshot_at(10.0).window_index == 1);
    CHECK(tg.snapshot_at(29.999).window_index == 2);
    CHECK_THROWS_AS(tg.snapshot_at(30.0), OutOfHorizonError);
    CHECK_THROWS_AS(tg.snapshot_at(-1.0), BadInputError);
}
