#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fedsched/constellation.hpp"
#include "fedsched/fl_task.hpp"
#include "fedsched/scheduler.hpp"
#include "fedsched/temporal_graph.hpp"

namespace fedsched {

struct SchedulingConfig {
    ChannelMode channel = ChannelMode::per_direction;
    PathMetric path_metric = PathMetric::widest;
    double window_length_s = 10.0;
    int horizon_windows = 1;
    bool include_propagation_delay = false;
    bool strict_windows = false;
};

struct TaskTemplate {
    std::string model_name;               // catalog name, or empty when inline
    std::optional<ModelSpec> model_inline;
    std::string server_site;
    std::vector<std::string> client_sites;
    std::vector<std::pair<std::string, double>> multipliers; // per site
};

struct ScenarioFile {
    std::optional<ConstellationConfig> constellation;
    std::vector<GroundSite> sites;
    TaskTemplate task;
    SchedulingConfig scheduling;
};

/// Parse/load a scenario; malformed content raises BadInput naming the
/// offending field, unreadable files raise Io.
ScenarioFile parse_scenario(const nlohmann::json& j);
ScenarioFile load_scenario(const std::string& path);

ModelSpec resolve_model(const TaskTemplate& task);

/// Concrete task from the template. client_count, when given, keeps only the
/// first that many client sites; model_override replaces the template model.
FLTask make_task(const ScenarioFile& scenario, std::optional<int> client_count = std::nullopt,
                 const std::optional<ModelSpec>& model_override = std::nullopt);

ScheduleOptions make_schedule_options(const ScenarioFile& scenario);

/// Materialize the scenario's temporal graph (horizon_windows snapshots).
TemporalGraph build_temporal_graph(const ScenarioFile& scenario,
                                   std::optional<std::uint64_t> seed_override = std::nullopt);

/// Canonical JSON rendering of the scenario, used for hashing.
nlohmann::json scenario_to_json(const ScenarioFile& scenario);

/// FNV-1a hash of the canonical scenario JSON, as fixed-width hex.
std::string scenario_hash_hex(const ScenarioFile& scenario);

} // namespace fedsched
