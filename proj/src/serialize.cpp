#include "fedsched/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedsched/errors.hpp"

namespace fedsched {

using nlohmann::json;

namespace {

constexpr int graph_format_version = 1;
constexpr int schedule_format_version = 1;

Phase phase_from_string(const std::string& s) {
    if (s == "distribute") return Phase::distribute;
    if (s == "train") return Phase::train;
    if (s == "upload") return Phase::upload;
    throw BadInputError("unknown phase: " + s);
}

} // namespace

std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

json temporal_graph_to_json(const TemporalGraph& tg) {
    json j;
    j["format_version"] = graph_format_version;
    j["window_length_s"] = tg.window_length_s;
    j["num_windows"] = tg.snapshots.size();
    json nodes = json::array();
    for (const NodeInfo& n : *tg.nodes)
        nodes.push_back({{"id", n.id},
                         {"kind", n.kind == NodeKind::satellite ? "satellite" : "site"},
                         {"name", n.name}});
    j["nodes"] = std::move(nodes);
    json windows = json::array();
    for (const SnapshotGraph& snap : tg.snapshots) {
        json edges = json::array();
        for (const EdgeRec& e : snap.edges)
            edges.push_back({{"u", snap.node_id(e.u)},
                             {"v", snap.node_id(e.v)},
                             {"mbps", e.bandwidth_mbps},
                             {"delay_ms", e.delay_ms}});
        windows.push_back({{"window_index", snap.window_index}, {"edges", std::move(edges)}});
    }
    j["windows"] = std::move(windows);
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    if (!out) throw IoError("failed writing output file: " + path);
}

void write_temporal_graph(const TemporalGraph& tg, const std::string& path) {
    write_text_file(path, temporal_graph_to_json(tg).dump(1) + "\n");
}

TemporalGraph temporal_graph_from_json(const json& j) {
    if (!j.is_object()) throw BadInputError("temporal graph: top level must be an object");
    if (!j.contains("format_version") || !j.at("format_version").is_number_integer() ||
        j.at("format_version").get<int>() != graph_format_version)
        throw BadInputError("temporal graph: missing or unsupported format_version");

    TemporalGraph tg;
    tg.window_length_s = j.at("window_length_s").get<double>();
    if (tg.window_length_s <= 0.0) throw BadInputError("temporal graph: window_length_s must be positive");

    std::vector<NodeInfo> nodes;
    for (const json& n : j.at("nodes")) {
        NodeInfo info;
        info.id = n.at("id").get<std::string>();
        const std::string kind = n.at("kind").get<std::string>();
        if (kind == "satellite")
            info.kind = NodeKind::satellite;
        else if (kind == "site")
            info.kind = NodeKind::site;
        else
            throw BadInputError("temporal graph: unknown node kind " + kind);
        info.name = n.contains("name") ? n.at("name").get<std::string>() : info.id;
        nodes.push_back(std::move(info));
    }
    tg.nodes = make_node_table(std::move(nodes));

    const std::size_t num_windows = j.at("num_windows").get<std::size_t>();
    const json& windows = j.at("windows");
    if (!windows.is_array() || windows.size() != num_windows)
        throw BadInputError("temporal graph: num_windows disagrees with the windows array");

    int expected_index = 0;
    for (const json& w : windows) {
        SnapshotGraph snap;
        snap.window_index = w.at("window_index").get<int>();
        if (snap.window_index != expected_index++)
            throw BadInputError("temporal graph: window indices must be contiguous from 0");
        snap.window_length_s = tg.window_length_s;
        snap.window_start_s = snap.window_index * tg.window_length_s;
        snap.nodes = tg.nodes;
        for (const json& e : w.at("edges")) {
            EdgeRec edge;
            const std::string u_id = e.at("u").get<std::string>();
            const std::string v_id = e.at("v").get<std::string>();
            const auto u = snap.find_node(u_id);
            const auto v = snap.find_node(v_id);
            if (!u || !v) throw BadInputError("temporal graph: edge endpoint not in node table");
            edge.u = std::min(*u, *v);
            edge.v = std::max(*u, *v);
            if (edge.u == edge.v) throw BadInputError("temporal graph: self-loop on " + u_id);
            edge.bandwidth_mbps = e.at("mbps").get<double>();
            edge.delay_ms = e.at("delay_ms").get<double>();
            if (edge.bandwidth_mbps <= 0.0)
                throw BadInputError("temporal graph: non-positive bandwidth on " + u_id + "-" + v_id);
            if (edge.delay_ms < 0.0)
                throw BadInputError("temporal graph: negative delay on " + u_id + "-" + v_id);
            snap.edges.push_back(edge);
        }
        std::sort(snap.edges.begin(), snap.edges.end(), [](const EdgeRec& a, const EdgeRec& b) {
            return std::tie(a.u, a.v) < std::tie(b.u, b.v);
        });
        for (std::size_t i = 1; i < snap.edges.size(); ++i)
            if (snap.edges[i].u == snap.edges[i - 1].u && snap.edges[i].v == snap.edges[i - 1].v)
                throw BadInputError("temporal graph: duplicate edge in window " +
                                    std::to_string(snap.window_index));
        tg.snapshots.push_back(std::move(snap));
    }
    return tg;
}

TemporalGraph read_temporal_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open temporal-graph file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw BadInputError("temporal graph " + path + ": " + e.what());
    }
    return temporal_graph_from_json(j);
}

std::string schedule_to_csv(const RoundSchedule& schedule, const TemporalGraph& tg) {
    std::ostringstream out;
    out << "policy,client_id,phase,start_s,end_s,bottleneck_mbps,mean_rate_mbps,path_nodes\n";
    for (const PhaseInterval& iv : schedule.intervals) {
        out << policy_name(schedule.policy) << ',' << iv.client_id << ',' << phase_name(iv.phase)
            << ',' << format_double(iv.start_s) << ',' << format_double(iv.end_s) << ',';
        if (iv.path) out << format_double(iv.path->bottleneck_mbps);
        out << ',';
        if (iv.mean_rate_mbps) out << format_double(*iv.mean_rate_mbps);
        out << ',';
        if (iv.path) {
            // Node ids joined with '|'.
            bool first = true;
            for (std::int32_t node : iv.path->nodes) {
                if (!first) out << '|';
                first = false;
                out << tg.nodes->at(static_cast<std::size_t>(node)).id;
            }
        }
        out << '\n';
    }
    return out.str();
}

json schedule_to_json(const RoundSchedule& schedule, const TemporalGraph& tg,
                      const ScheduleMeta& meta) {
    json j;
    j["format_version"] = schedule_format_version;
    j["policy"] = policy_name(schedule.policy);
    j["channel"] = channel_mode_name(schedule.channel);
    j["path_metric"] = path_metric_name(schedule.path_metric);
    j["include_propagation_delay"] = schedule.propagation_delay_included;
    j["round_start_s"] = schedule.round_start_s;
    j["makespan_s"] = schedule.makespan_s;
    j["window_overruns"] = schedule.window_overruns;
    j["seed"] = meta.seed;
    j["config_hash"] = meta.config_hash;

    json intervals = json::array();
    for (const PhaseInterval& iv : schedule.intervals) {
        json item;
        item["client_id"] = iv.client_id;
        item["phase"] = phase_name(iv.phase);
        item["start_s"] = iv.start_s;
        item["end_s"] = iv.end_s;
        if (iv.path) {
            json path_nodes = json::array();
            for (std::int32_t node : iv.path->nodes) path_nodes.push_back(tg.nodes->at(node).id);
            item["path_nodes"] = std::move(path_nodes);
            item["bottleneck_mbps"] = iv.path->bottleneck_mbps;
            item["delay_ms"] = iv.path->total_delay_ms;
        }
        if (iv.mean_rate_mbps) item["mean_rate_mbps"] = *iv.mean_rate_mbps;
        if (!iv.segments.empty()) {
            json segments = json::array();
            for (const RateSegment& seg : iv.segments)
                segments.push_back({{"start_s", seg.start_s},
                                    {"end_s", seg.end_s},
                                    {"rate_mbps", seg.rate_mbps}});
            item["segments"] = std::move(segments);
        }
        intervals.push_back(std::move(item));
    }
    j["intervals"] = std::move(intervals);
    return j;
}

GanttView gantt_view_from_json(const json& j) {
    if (!j.is_object() || !j.contains("format_version") ||
        !j.at("format_version").is_number_integer() ||
        j.at("format_version").get<int>() != schedule_format_version)
        throw BadInputError("schedule file: missing or unsupported format_version");
    GanttView view;
    view.policy = j.at("policy").get<std::string>();
    view.round_start_s = j.at("round_start_s").get<double>();
    view.makespan_s = j.at("makespan_s").get<double>();
    const json& intervals = j.at("intervals");
    if (!intervals.is_array() || intervals.empty())
        throw BadInputError("schedule file: empty interval list");
    for (const json& item : intervals) {
        GanttIntervalView iv;
        iv.client_id = item.at("client_id").get<std::string>();
        iv.phase = phase_from_string(item.at("phase").get<std::string>());
        iv.start_s = item.at("start_s").get<double>();
        iv.end_s = item.at("end_s").get<double>();
        if (iv.end_s < iv.start_s) throw BadInputError("schedule file: interval runs backwards");
        view.intervals.push_back(std::move(iv));
    }
    return view;
}

GanttView read_gantt_view(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schedule file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw BadInputError("schedule " + path + ": " + e.what());
    }
    return gantt_view_from_json(j);
}

} // namespace fedsched
