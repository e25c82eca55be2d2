#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedsched/fl_task.hpp"
#include "fedsched/temporal_graph.hpp"

namespace fedsched {

enum class Phase { distribute, train, upload };
enum class Policy { on_demand, statistical_multiplexing, oracle_optimal };
enum class ChannelMode { per_direction, joint };

struct ChannelModel {
    ChannelMode mode = ChannelMode::per_direction;
};

/// One piecewise-constant stretch of a fluid flow.
struct RateSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    double rate_mbps = 0.0;
};

struct PhaseInterval {
    std::string client_id;
    Phase phase = Phase::distribute;
    double start_s = 0.0;
    double end_s = 0.0;
    std::optional<RoutePath> path;            // distribute/upload only
    std::optional<double> mean_rate_mbps;     // multiplexed transfers
    std::vector<RateSegment> segments;        // multiplexed transfers
};

/// Rate sum observed on one directed link at one allocation epoch, against
/// the capacity the allocator used there. Recorded only on request.
struct LinkLoadSample {
    double time_s = 0.0;
    std::int32_t from = 0;
    std::int32_t to = 0;
    double capacity_mbps = 0.0;
    double rate_sum_mbps = 0.0;
};

struct RoundSchedule {
    Policy policy = Policy::on_demand;
    ChannelMode channel = ChannelMode::per_direction;
    PathMetric path_metric = PathMetric::widest;
    bool propagation_delay_included = false;
    double round_start_s = 0.0;
    double makespan_s = 0.0;
    std::vector<PhaseInterval> intervals; // sorted by (client_id, phase)
    int window_overruns = 0;              // transmissions spilling past their pinned window
    std::vector<LinkLoadSample> link_loads;
};

struct ScheduleOptions {
    ChannelModel channel{};
    PathMetric path_metric = PathMetric::widest;
    bool include_propagation_delay = false;
    bool strict_windows = false;    // error instead of warn on window overruns
    bool record_link_loads = false; // multiplexed policy only
};

/// Serial on-demand policy: downloads sorted ascending by transmission time
/// occupy an exclusive server resource; training starts at each distribute
/// end; uploads are served first-finish-first-upload. Throws NoRoute or
/// OutOfHorizon.
RoundSchedule schedule_on_demand(const TemporalGraph& tg, const FLTask& task,
                                 const ScheduleOptions& options, double t0);

/// Fluid statistical-multiplexing baseline: all downloads start at t0 and
/// share links max-min fairly; uploads join as trainings finish. Rates are
/// recomputed at every flow arrival, departure and window boundary.
RoundSchedule schedule_multiplexed(const TemporalGraph& tg, const FLTask& task,
                                   const ScheduleOptions& options, double t0);

/// Exhaustive enumeration of download x upload orders under the serial
/// channel model. Guarded to at most 8 clients; throws Guard above that.
RoundSchedule oracle_schedule(const TemporalGraph& tg, const FLTask& task,
                              const ScheduleOptions& options, double t0);

struct FlowSpec {
    std::string flow_id;
    RoutePath path;
};

/// Progressive-filling max-min allocation over directed links. Result is
/// aligned with the input span and independent of its order.
std::vector<double> max_min_rates(const SnapshotGraph& snapshot, std::span<const FlowSpec> flows);

enum class ViolationKind {
    missing_interval,
    duration_mismatch, // Eqs. for phase durations
    bits_mismatch,     // fluid transfer did not deliver the model payload
    precedence,        // training before receive, or upload before training end
    channel_conflict,  // serial exclusivity broken
    makespan_mismatch,
    path_inconsistent, // recorded bottleneck is not the min over its edges
};

struct Violation {
    ViolationKind kind;
    Phase phase = Phase::distribute;
    std::string client_id;
    std::string detail;
};

/// Checks duration/precedence/exclusivity/makespan consistency of a complete
/// schedule; violations are data, not errors. Time tolerance 1e-9 s.
std::vector<Violation> validate(const RoundSchedule& schedule, const FLTask& task,
                                const TemporalGraph& tg);

const char* phase_name(Phase phase);
const char* policy_name(Policy policy);
const char* channel_mode_name(ChannelMode mode);
const char* path_metric_name(PathMetric metric);
const char* violation_kind_name(ViolationKind kind);

} // namespace fedsched
