#include "fedsched/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fedsched/errors.hpp"
#include "fedsched/rng.hpp"

namespace fedsched {

using nlohmann::json;

namespace {

constexpr int scenario_format_version = 1;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw BadInputError("scenario field '" + field + "': " + why);
}

const json& require(const json& j, const char* field, const std::string& where) {
    auto it = j.find(field);
    if (it == j.end()) bad_field(where + field, "missing");
    return *it;
}

double require_number(const json& j, const char* field, const std::string& where) {
    const json& v = require(j, field, where);
    if (!v.is_number()) bad_field(where + field, "must be a number");
    return v.get<double>();
}

std::string require_string(const json& j, const char* field, const std::string& where) {
    const json& v = require(j, field, where);
    if (!v.is_string()) bad_field(where + field, "must be a string");
    return v.get<std::string>();
}

std::string lower_copy(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void check_format_version(const json& j, const std::string& what) {
    if (j.contains("format_version")) {
        const json& v = j.at("format_version");
        if (!v.is_number_integer() || v.get<int>() != scenario_format_version)
            throw BadInputError(what + ": unsupported format_version");
    }
}

ConstellationConfig parse_constellation(const json& j) {
    ConstellationConfig cfg;
    cfg.num_satellites = static_cast<int>(require_number(j, "num_satellites", "constellation."));
    cfg.num_planes = static_cast<int>(require_number(j, "num_planes", "constellation."));
    cfg.altitude_km = require_number(j, "altitude_km", "constellation.");
    cfg.inclination_deg = require_number(j, "inclination_deg", "constellation.");
    if (j.contains("isl_pattern")) {
        const std::string pattern = j.at("isl_pattern").get<std::string>();
        if (pattern != "grid_plus") bad_field("constellation.isl_pattern", "unknown pattern " + pattern);
    }
    cfg.elevation_mask_deg = require_number(j, "elevation_mask_deg", "constellation.");
    const json& dist = require(j, "bandwidth_dist", "constellation.");
    cfg.bandwidth_dist.min_mbps = require_number(dist, "min_mbps", "constellation.bandwidth_dist.");
    cfg.bandwidth_dist.max_mbps = require_number(dist, "max_mbps", "constellation.bandwidth_dist.");
    const json& seed = require(j, "rng_seed", "constellation.");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        bad_field("constellation.rng_seed", "must be an integer");
    cfg.rng_seed = seed.get<std::uint64_t>();
    if (j.contains("ground_attachment")) {
        const std::string mode = j.at("ground_attachment").get<std::string>();
        if (mode == "all")
            cfg.ground_attachment = GroundAttachment::all_visible;
        else if (mode == "best")
            cfg.ground_attachment = GroundAttachment::best_visible;
        else
            bad_field("constellation.ground_attachment", "must be 'all' or 'best'");
    }
    validate_config(cfg);
    return cfg;
}

std::vector<GroundSite> parse_sites(const json& j) {
    if (!j.is_array()) bad_field("sites", "must be an array");
    std::vector<GroundSite> sites;
    for (const json& s : j) {
        GroundSite site;
        site.name = require_string(s, "name", "sites[].");
        site.id = lower_copy(site.name);
        site.latitude_deg = require_number(s, "lat", "sites[].");
        site.longitude_deg = require_number(s, "lon", "sites[].");
        const std::string role = require_string(s, "role", "sites[].");
        if (role == "server")
            site.role = SiteRole::server;
        else if (role == "client")
            site.role = SiteRole::client;
        else
            bad_field("sites[].role", "must be 'server' or 'client'");
        sites.push_back(std::move(site));
    }
    validate_sites(sites);
    return sites;
}

TaskTemplate parse_task(const json& j) {
    TaskTemplate task;
    const json& model = require(j, "model", "task.");
    if (model.is_string()) {
        task.model_name = model.get<std::string>();
        if (find_model(task.model_name) == nullptr)
            bad_field("task.model", "unknown model " + task.model_name);
    } else if (model.is_object()) {
        ModelSpec spec;
        spec.name = model.contains("name") ? model.at("name").get<std::string>() : "custom";
        spec.size_mb = require_number(model, "size_mb", "task.model.");
        spec.training_time_s = require_number(model, "training_time_s", "task.model.");
        if (spec.size_mb <= 0.0) bad_field("task.model.size_mb", "must be positive");
        if (spec.training_time_s <= 0.0) bad_field("task.model.training_time_s", "must be positive");
        task.model_inline = std::move(spec);
    } else {
        bad_field("task.model", "must be a catalog name or an inline spec");
    }
    task.server_site = lower_copy(require_string(j, "server_site", "task."));
    const json& clients = require(j, "client_sites", "task.");
    if (!clients.is_array() || clients.empty())
        bad_field("task.client_sites", "must be a non-empty array");
    for (const json& c : clients) {
        if (!c.is_string()) bad_field("task.client_sites", "entries must be strings");
        task.client_sites.push_back(lower_copy(c.get<std::string>()));
    }
    if (j.contains("multipliers")) {
        const json& m = j.at("multipliers");
        if (!m.is_object()) bad_field("task.multipliers", "must be an object");
        for (auto it = m.begin(); it != m.end(); ++it) {
            if (!it.value().is_number()) bad_field("task.multipliers", "values must be numbers");
            task.multipliers.emplace_back(lower_copy(it.key()), it.value().get<double>());
        }
        std::sort(task.multipliers.begin(), task.multipliers.end());
    }
    return task;
}

SchedulingConfig parse_scheduling(const json& j) {
    SchedulingConfig cfg;
    if (j.contains("channel")) {
        const std::string mode = j.at("channel").get<std::string>();
        if (mode == "per_direction")
            cfg.channel = ChannelMode::per_direction;
        else if (mode == "joint")
            cfg.channel = ChannelMode::joint;
        else
            bad_field("scheduling.channel", "must be 'per_direction' or 'joint'");
    }
    if (j.contains("path_metric")) {
        const std::string metric = j.at("path_metric").get<std::string>();
        if (metric == "widest")
            cfg.path_metric = PathMetric::widest;
        else if (metric == "min_delay")
            cfg.path_metric = PathMetric::min_delay;
        else
            bad_field("scheduling.path_metric", "must be 'widest' or 'min_delay'");
    }
    if (j.contains("window_length_s")) cfg.window_length_s = j.at("window_length_s").get<double>();
    if (cfg.window_length_s <= 0.0) bad_field("scheduling.window_length_s", "must be positive");
    if (j.contains("horizon_windows")) cfg.horizon_windows = j.at("horizon_windows").get<int>();
    if (cfg.horizon_windows < 1) bad_field("scheduling.horizon_windows", "must be >= 1");
    if (j.contains("include_propagation_delay"))
        cfg.include_propagation_delay = j.at("include_propagation_delay").get<bool>();
    if (j.contains("strict_windows")) cfg.strict_windows = j.at("strict_windows").get<bool>();
    return cfg;
}

} // namespace

ScenarioFile parse_scenario(const json& j) {
    if (!j.is_object()) throw BadInputError("scenario: top level must be a JSON object");
    check_format_version(j, "scenario");
    ScenarioFile scenario;
    if (j.contains("constellation")) scenario.constellation = parse_constellation(j.at("constellation"));
    if (j.contains("sites")) scenario.sites = parse_sites(j.at("sites"));
    scenario.task = parse_task(require(j, "task", ""));
    if (j.contains("scheduling")) scenario.scheduling = parse_scheduling(j.at("scheduling"));
    return scenario;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw BadInputError("scenario " + path + ": " + e.what());
    }
    return parse_scenario(j);
}

ModelSpec resolve_model(const TaskTemplate& task) {
    if (task.model_inline) return *task.model_inline;
    const ModelSpec* spec = find_model(task.model_name);
    if (spec == nullptr) throw BadInputError("unknown model name: " + task.model_name);
    return *spec;
}

FLTask make_task(const ScenarioFile& scenario, std::optional<int> client_count,
                 const std::optional<ModelSpec>& model_override) {
    FLTask task;
    task.server_site = scenario.task.server_site;
    task.model = model_override ? *model_override : resolve_model(scenario.task);

    std::size_t count = scenario.task.client_sites.size();
    if (client_count) {
        if (*client_count < 1 ||
            static_cast<std::size_t>(*client_count) > scenario.task.client_sites.size())
            throw BadInputError("client count " + std::to_string(*client_count) +
                                " exceeds the scenario's client sites");
        count = static_cast<std::size_t>(*client_count);
    }
    for (std::size_t i = 0; i < count; ++i) {
        const std::string& site = scenario.task.client_sites[i];
        double multiplier = 1.0;
        for (const auto& [name, value] : scenario.task.multipliers)
            if (name == site) multiplier = value;
        task.clients.push_back({site, site, multiplier});
    }
    validate_task(task);
    return task;
}

ScheduleOptions make_schedule_options(const ScenarioFile& scenario) {
    ScheduleOptions options;
    options.channel.mode = scenario.scheduling.channel;
    options.path_metric = scenario.scheduling.path_metric;
    options.include_propagation_delay = scenario.scheduling.include_propagation_delay;
    options.strict_windows = scenario.scheduling.strict_windows;
    return options;
}

TemporalGraph build_temporal_graph(const ScenarioFile& scenario,
                                   std::optional<std::uint64_t> seed_override) {
    if (!scenario.constellation)
        throw BadInputError("scenario has no constellation block; cannot generate a graph");
    ConstellationConfig config = *scenario.constellation;
    if (seed_override) config.rng_seed = *seed_override;
    validate_sites(scenario.sites);

    const std::vector<SatelliteElement> elements = walker_shell(config);
    const NodeTablePtr nodes = constellation_node_table(elements, scenario.sites);

    TemporalGraph tg;
    tg.window_length_s = scenario.scheduling.window_length_s;
    tg.nodes = nodes;
    tg.snapshots.reserve(static_cast<std::size_t>(scenario.scheduling.horizon_windows));
    for (int w = 0; w < scenario.scheduling.horizon_windows; ++w) {
        const WindowConnectivity conn = build_connectivity(config, elements, scenario.sites, *nodes,
                                                           w, tg.window_length_s);
        tg.snapshots.push_back(assign_bandwidths(conn, nodes, config.bandwidth_dist, config.rng_seed));
    }
    return tg;
}

json scenario_to_json(const ScenarioFile& scenario) {
    json j;
    j["format_version"] = scenario_format_version;
    if (scenario.constellation) {
        const ConstellationConfig& c = *scenario.constellation;
        j["constellation"] = {
            {"num_satellites", c.num_satellites},
            {"num_planes", c.num_planes},
            {"altitude_km", c.altitude_km},
            {"inclination_deg", c.inclination_deg},
            {"isl_pattern", "grid_plus"},
            {"elevation_mask_deg", c.elevation_mask_deg},
            {"bandwidth_dist", {{"min_mbps", c.bandwidth_dist.min_mbps},
                                {"max_mbps", c.bandwidth_dist.max_mbps}}},
            {"rng_seed", c.rng_seed},
            {"ground_attachment",
             c.ground_attachment == GroundAttachment::best_visible ? "best" : "all"},
        };
    }
    json sites = json::array();
    for (const GroundSite& s : scenario.sites)
        sites.push_back({{"name", s.name},
                         {"lat", s.latitude_deg},
                         {"lon", s.longitude_deg},
                         {"role", s.role == SiteRole::server ? "server" : "client"}});
    j["sites"] = std::move(sites);

    json task;
    if (scenario.task.model_inline) {
        task["model"] = {{"name", scenario.task.model_inline->name},
                         {"size_mb", scenario.task.model_inline->size_mb},
                         {"training_time_s", scenario.task.model_inline->training_time_s}};
    } else {
        task["model"] = scenario.task.model_name;
    }
    task["server_site"] = scenario.task.server_site;
    task["client_sites"] = scenario.task.client_sites;
    if (!scenario.task.multipliers.empty()) {
        json m = json::object();
        for (const auto& [name, value] : scenario.task.multipliers) m[name] = value;
        task["multipliers"] = std::move(m);
    }
    j["task"] = std::move(task);

    j["scheduling"] = {
        {"channel", channel_mode_name(scenario.scheduling.channel)},
        {"path_metric", path_metric_name(scenario.scheduling.path_metric)},
        {"window_length_s", scenario.scheduling.window_length_s},
        {"horizon_windows", scenario.scheduling.horizon_windows},
        {"include_propagation_delay", scenario.scheduling.include_propagation_delay},
        {"strict_windows", scenario.scheduling.strict_windows},
    };
    return j;
}

std::string scenario_hash_hex(const ScenarioFile& scenario) {
    const std::uint64_t h = fnv1a64(scenario_to_json(scenario).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace fedsched
