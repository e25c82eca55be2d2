#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fedsched/scenario.hpp"
#include "fedsched/scheduler.hpp"

namespace fedsched {

enum class SweepType { client_count, model };

struct ExperimentPlan {
    ScenarioFile scenario;
    SweepType sweep_type = SweepType::client_count;
    std::vector<int> client_counts;        // client_count sweep
    std::vector<std::string> model_names;  // model sweep
    std::vector<Policy> policies;
    std::vector<std::uint64_t> seeds;

    std::size_t sweep_size() const {
        return sweep_type == SweepType::client_count ? client_counts.size() : model_names.size();
    }
    std::string sweep_label(std::size_t i) const;
};

ExperimentPlan parse_plan(const nlohmann::json& j);
ExperimentPlan load_plan(const std::string& path);
nlohmann::json plan_to_json(const ExperimentPlan& plan);
std::string plan_hash_hex(const ExperimentPlan& plan);

struct SweepRow {
    std::string sweep_value;
    Policy policy;
    std::uint64_t seed;
    double makespan_s;
};

struct CellFailure {
    std::string sweep_value;
    Policy policy;
    std::uint64_t seed;
    std::string code;
    std::string message;
};

struct CellSummary {
    std::string sweep_value;
    Policy policy;
    int n = 0;
    double mean_makespan_s = 0.0;
    double std_makespan_s = 0.0; // sample standard deviation
};

struct ReductionRow {
    std::string sweep_value;
    double multiplexed_mean_s = 0.0;
    double on_demand_mean_s = 0.0;
    double absolute_s = 0.0;
    double relative = 0.0; // (multiplexed - on_demand) / multiplexed
    int n = 0;             // per-policy sample count behind the means
};

struct SweepResult {
    SweepType sweep_type = SweepType::client_count;
    std::vector<std::string> sweep_labels; // in plan order
    std::vector<Policy> policies;
    std::string plan_hash;
    std::vector<SweepRow> rows;           // canonical (sweep, policy, seed) order
    std::vector<CellFailure> failures;
    std::vector<CellSummary> summaries;
    std::vector<ReductionRow> reductions; // present when both policies ran
};

/// Runs the plan grid; per-cell errors are recorded as failures, not thrown.
/// jobs > 1 parallelizes across seeds; the output is identical for any jobs.
SweepResult run_sweep(const ExperimentPlan& plan, int jobs = 1);

/// Plain-text reduction table; throws BadInput when a policy is missing.
std::string reduction_report(const SweepResult& result);

std::string sweep_rows_csv(const SweepResult& result);
nlohmann::json sweep_summary_json(const SweepResult& result);

} // namespace fedsched
