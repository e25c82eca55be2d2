#include "fedsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fedsched/errors.hpp"
#include "fedsched/rng.hpp"
#include "fedsched/serialize.hpp"
#include "fedsched/version.hpp"

namespace fedsched {

using nlohmann::json;

namespace {

constexpr int plan_format_version = 1;

Policy policy_from_string(const std::string& s) {
    if (s == "on_demand") return Policy::on_demand;
    if (s == "statistical_multiplexing") return Policy::statistical_multiplexing;
    if (s == "oracle_optimal") return Policy::oracle_optimal;
    throw BadInputError("unknown policy: " + s);
}

} // namespace

std::string ExperimentPlan::sweep_label(std::size_t i) const {
    return sweep_type == SweepType::client_count ? std::to_string(client_counts[i])
                                                 : model_names[i];
}

ExperimentPlan parse_plan(const json& j) {
    if (!j.is_object()) throw BadInputError("plan: top level must be a JSON object");
    if (j.contains("format_version") && j.at("format_version").get<int>() != plan_format_version)
        throw BadInputError("plan: unsupported format_version");

    ExperimentPlan plan;
    if (!j.contains("scenario")) throw BadInputError("plan field 'scenario': missing");
    plan.scenario = parse_scenario(j.at("scenario"));

    if (!j.contains("sweep")) throw BadInputError("plan field 'sweep': missing");
    const json& sweep = j.at("sweep");
    const std::string type = sweep.at("type").get<std::string>();
    const json& values = sweep.at("values");
    if (!values.is_array() || values.empty())
        throw BadInputError("plan field 'sweep.values': must be a non-empty array");
    if (type == "client_count") {
        plan.sweep_type = SweepType::client_count;
        for (const json& v : values) {
            const int count = v.get<int>();
            if (count < 1 || static_cast<std::size_t>(count) > plan.scenario.task.client_sites.size())
                throw BadInputError("plan: client count " + std::to_string(count) +
                                    " exceeds the scenario's client sites");
            plan.client_counts.push_back(count);
        }
    } else if (type == "model") {
        plan.sweep_type = SweepType::model;
        for (const json& v : values) {
            const std::string name = v.get<std::string>();
            if (find_model(name) == nullptr) throw BadInputError("plan: unknown model " + name);
            plan.model_names.push_back(name);
        }
    } else {
        throw BadInputError("plan field 'sweep.type': must be 'client_count' or 'model'");
    }

    if (!j.contains("policies")) throw BadInputError("plan field 'policies': missing");
    for (const json& p : j.at("policies")) plan.policies.push_back(policy_from_string(p.get<std::string>()));
    if (plan.policies.empty()) throw BadInputError("plan: policies must be non-empty");

    if (!j.contains("seeds")) throw BadInputError("plan field 'seeds': missing");
    std::set<std::uint64_t> seen;
    for (const json& s : j.at("seeds")) {
        const auto seed = s.get<std::uint64_t>();
        if (!seen.insert(seed).second)
            throw BadInputError("plan: duplicate seed " + std::to_string(seed));
        plan.seeds.push_back(seed);
    }
    if (plan.seeds.empty()) throw BadInputError("plan: seeds must be non-empty");
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open plan file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw BadInputError("plan " + path + ": " + e.what());
    }
    return parse_plan(j);
}

json plan_to_json(const ExperimentPlan& plan) {
    json j;
    j["format_version"] = plan_format_version;
    j["scenario"] = scenario_to_json(plan.scenario);
    json values = json::array();
    if (plan.sweep_type == SweepType::client_count)
        for (int c : plan.client_counts) values.push_back(c);
    else
        for (const std::string& m : plan.model_names) values.push_back(m);
    j["sweep"] = {{"type", plan.sweep_type == SweepType::client_count ? "client_count" : "model"},
                  {"values", std::move(values)}};
    json policies = json::array();
    for (Policy p : plan.policies) policies.push_back(policy_name(p));
    j["policies"] = std::move(policies);
    j["seeds"] = plan.seeds;
    return j;
}

std::string plan_hash_hex(const ExperimentPlan& plan) {
    const std::uint64_t h = fnv1a64(plan_to_json(plan).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

RoundSchedule run_policy(Policy policy, const TemporalGraph& tg, const FLTask& task,
                         const ScheduleOptions& options) {
    switch (policy) {
        case Policy::on_demand: return schedule_on_demand(tg, task, options, 0.0);
        case Policy::statistical_multiplexing: return schedule_multiplexed(tg, task, options, 0.0);
        case Policy::oracle_optimal: return oracle_schedule(tg, task, options, 0.0);
    }
    throw BadInputError("unknown policy");
}

} // namespace

SweepResult run_sweep(const ExperimentPlan& plan, int jobs) {
    if (jobs < 1) jobs = 1;
    if (!plan.scenario.constellation)
        throw BadInputError("plan scenario has no constellation block");

    SweepResult result;
    result.sweep_type = plan.sweep_type;
    result.policies = plan.policies;
    result.plan_hash = plan_hash_hex(plan);
    for (std::size_t i = 0; i < plan.sweep_size(); ++i)
        result.sweep_labels.push_back(plan.sweep_label(i));

    // Geometry is seed-independent: build the per-window connectivity once.
    const ConstellationConfig& config = *plan.scenario.constellation;
    const std::vector<SatelliteElement> elements = walker_shell(config);
    const NodeTablePtr nodes = constellation_node_table(elements, plan.scenario.sites);
    const int windows = plan.scenario.scheduling.horizon_windows;
    const double window_length = plan.scenario.scheduling.window_length_s;
    std::vector<WindowConnectivity> connectivity;
    connectivity.reserve(static_cast<std::size_t>(windows));
    for (int w = 0; w < windows; ++w)
        connectivity.push_back(
            build_connectivity(config, elements, plan.scenario.sites, *nodes, w, window_length));

    const ScheduleOptions options = make_schedule_options(plan.scenario);
    const std::size_t n_values = plan.sweep_size();
    const std::size_t n_policies = plan.policies.size();
    const std::size_t n_seeds = plan.seeds.size();

    // Tasks are seed-independent too.
    std::vector<FLTask> tasks;
    for (std::size_t v = 0; v < n_values; ++v) {
        if (plan.sweep_type == SweepType::client_count) {
            tasks.push_back(make_task(plan.scenario, plan.client_counts[v]));
        } else {
            const ModelSpec* model = find_model(plan.model_names[v]);
            tasks.push_back(make_task(plan.scenario, std::nullopt, *model));
        }
    }

    struct CellOutcome {
        bool ok = false;
        double makespan_s = 0.0;
        std::string code;
        std::string message;
    };
    std::vector<CellOutcome> outcomes(n_values * n_policies * n_seeds);
    const auto slot = [&](std::size_t v, std::size_t p, std::size_t s) {
        return (v * n_policies + p) * n_seeds + s;
    };

    std::atomic<std::size_t> next_seed{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t s = next_seed.fetch_add(1);
            if (s >= n_seeds) return;
            TemporalGraph tg;
            tg.window_length_s = window_length;
            tg.nodes = nodes;
            tg.snapshots.reserve(connectivity.size());
            for (const WindowConnectivity& conn : connectivity)
                tg.snapshots.push_back(
                    assign_bandwidths(conn, nodes, config.bandwidth_dist, plan.seeds[s]));
            for (std::size_t v = 0; v < n_values; ++v) {
                for (std::size_t p = 0; p < n_policies; ++p) {
                    CellOutcome& out = outcomes[slot(v, p, s)];
                    try {
                        out.makespan_s = run_policy(plan.policies[p], tg, tasks[v], options).makespan_s;
                        out.ok = true;
                    } catch (const Error& e) {
                        out.code = e.code_name();
                        out.message = e.what();
                    }
                }
            }
        }
    };

    if (jobs == 1 || n_seeds == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), n_seeds);
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t v = 0; v < n_values; ++v) {
        for (std::size_t p = 0; p < n_policies; ++p) {
            for (std::size_t s = 0; s < n_seeds; ++s) {
                const CellOutcome& out = outcomes[slot(v, p, s)];
                if (out.ok) {
                    result.rows.push_back({result.sweep_labels[v], plan.policies[p], plan.seeds[s],
                                           out.makespan_s});
                } else {
                    result.failures.push_back({result.sweep_labels[v], plan.policies[p],
                                               plan.seeds[s], out.code, out.message});
                }
            }
        }
    }

    for (std::size_t v = 0; v < n_values; ++v) {
        for (std::size_t p = 0; p < n_policies; ++p) {
            CellSummary summary;
            summary.sweep_value = result.sweep_labels[v];
            summary.policy = plan.policies[p];
            double sum = 0.0;
            std::vector<double> samples;
            for (std::size_t s = 0; s < n_seeds; ++s) {
                const CellOutcome& out = outcomes[slot(v, p, s)];
                if (!out.ok) continue;
                samples.push_back(out.makespan_s);
                sum += out.makespan_s;
            }
            summary.n = static_cast<int>(samples.size());
            if (!samples.empty()) {
                summary.mean_makespan_s = sum / static_cast<double>(samples.size());
                if (samples.size() > 1) {
                    double sq = 0.0;
                    for (double x : samples) {
                        const double d = x - summary.mean_makespan_s;
                        sq += d * d;
                    }
                    summary.std_makespan_s = std::sqrt(sq / static_cast<double>(samples.size() - 1));
                }
            }
            result.summaries.push_back(summary);
        }
    }

    const auto summary_of = [&](const std::string& value, Policy policy) -> const CellSummary* {
        for (const CellSummary& s : result.summaries)
            if (s.sweep_value == value && s.policy == policy) return &s;
        return nullptr;
    };
    const bool have_both =
        std::count(plan.policies.begin(), plan.policies.end(), Policy::on_demand) > 0 &&
        std::count(plan.policies.begin(), plan.policies.end(), Policy::statistical_multiplexing) > 0;
    if (have_both) {
        for (const std::string& value : result.sweep_labels) {
            const CellSummary* od = summary_of(value, Policy::on_demand);
            const CellSummary* mux = summary_of(value, Policy::statistical_multiplexing);
            if (od == nullptr || mux == nullptr || od->n == 0 || mux->n == 0) continue;
            ReductionRow row;
            row.sweep_value = value;
            row.multiplexed_mean_s = mux->mean_makespan_s;
            row.on_demand_mean_s = od->mean_makespan_s;
            row.absolute_s = mux->mean_makespan_s - od->mean_makespan_s;
            row.relative = row.absolute_s / mux->mean_makespan_s;
            row.n = std::min(od->n, mux->n);
            result.reductions.push_back(std::move(row));
        }
    }
    return result;
}

std::string reduction_report(const SweepResult& result) {
    const bool has_od = std::count(result.policies.begin(), result.policies.end(),
                                   Policy::on_demand) > 0;
    const bool has_mux = std::count(result.policies.begin(), result.policies.end(),
                                    Policy::statistical_multiplexing) > 0;
    if (!has_od || !has_mux)
        throw BadInputError(
            "reduction report needs both on_demand and statistical_multiplexing results");

    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %5s %18s %18s %14s %12s\n", "sweep_value", "n",
                  "multiplexed_mean", "on_demand_mean", "abs_reduction", "rel_reduction");
    out << line;
    for (const ReductionRow& row : result.reductions) {
        std::snprintf(line, sizeof(line), "%-16s %5d %16.3f s %16.3f s %12.3f s %11.2f%%\n",
                      row.sweep_value.c_str(), row.n, row.multiplexed_mean_s, row.on_demand_mean_s,
                      row.absolute_s, row.relative * 100.0);
        out << line;
    }
    return out.str();
}

std::string sweep_rows_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "# plan_hash=" << result.plan_hash << "\n";
    out << "# tool_version=" << tool_version << "\n";
    out << "sweep_value,policy,seed,makespan_s\n";
    for (const SweepRow& row : result.rows)
        out << row.sweep_value << ',' << policy_name(row.policy) << ',' << row.seed << ','
            << format_double(row.makespan_s) << '\n';
    return out.str();
}

json sweep_summary_json(const SweepResult& result) {
    json j;
    j["format_version"] = plan_format_version;
    j["tool_version"] = tool_version;
    j["plan_hash"] = result.plan_hash;
    j["sweep_type"] = result.sweep_type == SweepType::client_count ? "client_count" : "model";
    json cells = json::array();
    for (const CellSummary& s : result.summaries)
        cells.push_back({{"sweep_value", s.sweep_value},
                         {"policy", policy_name(s.policy)},
                         {"n", s.n},
                         {"mean_makespan_s", s.mean_makespan_s},
                         {"std_makespan_s", s.std_makespan_s}});
    j["cells"] = std::move(cells);
    json reductions = json::array();
    for (const ReductionRow& r : result.reductions)
        reductions.push_back({{"sweep_value", r.sweep_value},
                              {"multiplexed_mean_s", r.multiplexed_mean_s},
                              {"on_demand_mean_s", r.on_demand_mean_s},
                              {"absolute_reduction_s", r.absolute_s},
                              {"relative_reduction", r.relative},
                              {"n", r.n}});
    j["reductions"] = std::move(reductions);
    json failures = json::array();
    for (const CellFailure& f : result.failures)
        failures.push_back({{"sweep_value", f.sweep_value},
                            {"policy", policy_name(f.policy)},
                            {"seed", f.seed},
                            {"code", f.code},
                            {"message", f.message}});
    j["failures"] = std::move(failures);
    return j;
}

} // namespace fedsched
