#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "fedsched/scheduler.hpp"
#include "fedsched/temporal_graph.hpp"

namespace fedsched {

/// Shortest round-trip decimal rendering; identical input bits give
/// identical text, which keeps all file outputs byte-stable.
std::string format_double(double value);

nlohmann::json temporal_graph_to_json(const TemporalGraph& tg);
void write_temporal_graph(const TemporalGraph& tg, const std::string& path);

TemporalGraph temporal_graph_from_json(const nlohmann::json& j);
TemporalGraph read_temporal_graph(const std::string& path);

struct ScheduleMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
};

std::string schedule_to_csv(const RoundSchedule& schedule, const TemporalGraph& tg);
nlohmann::json schedule_to_json(const RoundSchedule& schedule, const TemporalGraph& tg,
                                const ScheduleMeta& meta);

/// The subset of a schedule file the Gantt renderer needs.
struct GanttIntervalView {
    std::string client_id;
    Phase phase;
    double start_s;
    double end_s;
};

struct GanttView {
    std::string policy;
    double round_start_s = 0.0;
    double makespan_s = 0.0;
    std::vector<GanttIntervalView> intervals;
};

GanttView gantt_view_from_json(const nlohmann::json& j);
GanttView read_gantt_view(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

} // namespace fedsched
