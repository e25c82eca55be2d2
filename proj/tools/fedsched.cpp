#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fedsched/errors.hpp"
#include "fedsched/experiment.hpp"
#include "fedsched/gantt.hpp"
#include "fedsched/scenario.hpp"
#include "fedsched/scheduler.hpp"
#include "fedsched/serialize.hpp"
#include "fedsched/version.hpp"

namespace {

using namespace fedsched;

struct SeedOpt {
    std::optional<std::uint64_t> value;
};

void cmd_generate(const std::string& scenario_path, const std::string& out_path,
                  const SeedOpt& seed) {
    const ScenarioFile scenario = load_scenario(scenario_path);
    if (!scenario.constellation)
        throw BadInputError("scenario field 'constellation': missing (required by generate)");
    if (scenario.sites.empty())
        throw BadInputError("scenario field 'sites': missing (required by generate)");
    const TemporalGraph tg = build_temporal_graph(scenario, seed.value);
    write_temporal_graph(tg, out_path);
    for (const SnapshotGraph& snap : tg.snapshots)
        std::printf("window %d: %zu nodes, %zu edges\n", snap.window_index, snap.node_count(),
                    snap.edges.size());
    std::printf("wrote %s (%zu windows)\n", out_path.c_str(), tg.snapshots.size());
}

void cmd_schedule(const std::string& graph_path, const std::string& scenario_path,
                  const std::string& policy_str, double t0, const std::string& out_prefix,
                  const SeedOpt& seed) {
    const TemporalGraph tg = read_temporal_graph(graph_path);
    const ScenarioFile scenario = load_scenario(scenario_path);
    const FLTask task = make_task(scenario);
    ScheduleOptions options = make_schedule_options(scenario);
    options.record_link_loads = false;

    RoundSchedule schedule;
    if (policy_str == "on_demand")
        schedule = schedule_on_demand(tg, task, options, t0);
    else if (policy_str == "statistical_multiplexing")
        schedule = schedule_multiplexed(tg, task, options, t0);
    else if (policy_str == "oracle_optimal")
        schedule = oracle_schedule(tg, task, options, t0);
    else
        throw BadInputError("unknown policy: " + policy_str);

    ScheduleMeta meta;
    meta.seed = seed.value ? *seed.value
                           : (scenario.constellation ? scenario.constellation->rng_seed : 0);
    meta.config_hash = scenario_hash_hex(scenario);

    write_text_file(out_prefix + ".csv", schedule_to_csv(schedule, tg));
    write_text_file(out_prefix + ".json", schedule_to_json(schedule, tg, meta).dump(1) + "\n");

    double dist_total = 0.0, train_total = 0.0, upload_total = 0.0;
    for (const PhaseInterval& iv : schedule.intervals) {
        const double d = iv.end_s - iv.start_s;
        if (iv.phase == Phase::distribute) dist_total += d;
        if (iv.phase == Phase::train) train_total += d;
        if (iv.phase == Phase::upload) upload_total += d;
    }
    std::printf("policy=%s makespan_s=%s distribute_total_s=%s train_total_s=%s upload_total_s=%s\n",
                policy_name(schedule.policy), format_double(schedule.makespan_s).c_str(),
                format_double(dist_total).c_str(), format_double(train_total).c_str(),
                format_double(upload_total).c_str());
}

void cmd_sweep(const std::string& plan_path, const std::string& out_dir, int jobs, int max_seeds) {
    ExperimentPlan plan = load_plan(plan_path);
    if (max_seeds > 0 && static_cast<std::size_t>(max_seeds) < plan.seeds.size())
        plan.seeds.resize(static_cast<std::size_t>(max_seeds));

    const SweepResult result = run_sweep(plan, jobs);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    write_text_file(out_dir + "/results.csv", sweep_rows_csv(result));
    write_text_file(out_dir + "/summary.json", sweep_summary_json(result).dump(1) + "\n");

    std::printf("rows=%zu failures=%zu\n", result.rows.size(), result.failures.size());
    const bool has_both =
        std::count(result.policies.begin(), result.policies.end(), Policy::on_demand) > 0 &&
        std::count(result.policies.begin(), result.policies.end(),
                   Policy::statistical_multiplexing) > 0;
    if (has_both) std::fputs(reduction_report(result).c_str(), stdout);
}

void cmd_gantt(const std::string& schedule_path, const std::string& out_path) {
    const GanttView view = read_gantt_view(schedule_path);
    write_text_file(out_path, render_gantt_svg(view));
    std::printf("wrote %s (%zu clients)\n", out_path.c_str(),
                [&] {
                    std::vector<std::string> ids;
                    for (const auto& iv : view.intervals)
                        if (std::find(ids.begin(), ids.end(), iv.client_id) == ids.end())
                            ids.push_back(iv.client_id);
                    return ids.size();
                }());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated-learning round scheduling over LEO constellations"};
    app.set_version_flag("--version", fedsched::tool_version);
    app.require_subcommand(1);

    SeedOpt seed;
    std::uint64_t seed_raw = 0;

    auto* generate = app.add_subcommand("generate", "Build the temporal graph for a scenario");
    std::string gen_scenario, gen_out;
    generate->add_option("scenario", gen_scenario, "scenario JSON file")->required();
    generate->add_option("-o,--out", gen_out, "output temporal-graph JSON")->required();
    generate->add_option("--seed", seed_raw, "override the scenario rng_seed")
        ->each([&](const std::string&) { seed.value = seed_raw; });

    auto* schedule = app.add_subcommand("schedule", "Schedule one round on a generated graph");
    std::string sch_graph, sch_scenario, sch_policy = "on_demand", sch_prefix;
    double sch_t0 = 0.0;
    schedule->add_option("--graph", sch_graph, "temporal-graph JSON")->required();
    schedule->add_option("--scenario", sch_scenario, "scenario JSON file")->required();
    schedule->add_option("--policy", sch_policy,
                         "on_demand|statistical_multiplexing|oracle_optimal");
    schedule->add_option("--t0", sch_t0, "round start time in seconds");
    schedule->add_option("-o,--out", sch_prefix, "output prefix (.csv/.json)")->required();
    schedule->add_option("--seed", seed_raw, "seed recorded in the output metadata")
        ->each([&](const std::string&) { seed.value = seed_raw; });

    auto* sweep = app.add_subcommand("sweep", "Run an experiment plan");
    std::string sw_plan, sw_out;
    int sw_jobs = 1, sw_max_seeds = 0;
    sweep->add_option("plan", sw_plan, "plan JSON file")->required();
    sweep->add_option("-o,--out", sw_out, "output directory")->required();
    sweep->add_option("--jobs", sw_jobs, "parallel workers (per seed)");
    sweep->add_option("--max-seeds", sw_max_seeds, "truncate the plan's seed list (smoke runs)");

    auto* gantt = app.add_subcommand("gantt", "Render a schedule JSON as an SVG Gantt chart");
    std::string ga_schedule, ga_out;
    gantt->add_option("schedule", ga_schedule, "schedule JSON file")->required();
    gantt->add_option("-o,--out", ga_out, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        std::fprintf(stderr, "ERROR[bad_input]: %s\n", e.what());
        return static_cast<int>(fedsched::ErrorCode::bad_input);
    }

    try {
        if (generate->parsed()) cmd_generate(gen_scenario, gen_out, seed);
        if (schedule->parsed()) cmd_schedule(sch_graph, sch_scenario, sch_policy, sch_t0, sch_prefix, seed);
        if (sweep->parsed()) cmd_sweep(sw_plan, sw_out, sw_jobs, sw_max_seeds);
        if (gantt->parsed()) cmd_gantt(ga_schedule, ga_out);
    } catch (const fedsched::Error& e) {
        std::fprintf(stderr, "ERROR[%s]: %s\n", e.code_name(), e.what());
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERROR[bad_input]: %s\n", e.what());
        return static_cast<int>(fedsched::ErrorCode::bad_input);
    }
    return 0;
}
