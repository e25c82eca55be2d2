#include "fedsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>

#include "fedsched/errors.hpp"
#include "fedsched/log.hpp"

namespace fedsched {

namespace {

constexpr double time_tol = 1e-9;      // seconds
constexpr double completion_bits_tol = 0.5;

/// Memoizes routes per (window, src, dst); exact because a snapshot fully
/// determines the deterministic route.
class RouteCache {
public:
    RouteCache(const TemporalGraph& tg, PathMetric metric) : tg_(tg), metric_(metric) {}

    const RoutePath& at_time(double time_s, std::int32_t src, std::int32_t dst) {
        const SnapshotGraph& snap = tg_.snapshot_at(time_s);
        const Key key{snap.window_index, src, dst};
        auto it = memo_.find(key);
        if (it == memo_.end()) it = memo_.emplace(key, route(snap, src, dst, metric_)).first;
        return it->second;
    }

private:
    using Key = std::tuple<int, std::int32_t, std::int32_t>;
    const TemporalGraph& tg_;
    PathMetric metric_;
    std::map<Key, RoutePath> memo_;
};

std::int32_t resolve_site(const SnapshotGraph& snap, const std::string& site_id) {
    const auto idx = snap.find_node(site_id);
    if (!idx) throw BadInputError("site not present in the temporal graph: " + site_id);
    return *idx;
}

struct SerialPlan {
    std::size_t client_pos = 0; // position in task.clients
    std::string client_id;
    std::int32_t site = -1;
    RoutePath dl_path;
    double dl_time_s = 0.0;
    double train_time_s = 0.0;
};

/// Download paths and times for every client, computed on the snapshot at
/// t0. Throws NoRoute naming every unreachable client.
std::vector<SerialPlan> build_plans(const TemporalGraph& tg, const FLTask& task, double t0,
                                    std::int32_t server_idx, RouteCache& routes) {
    const SnapshotGraph& snap0 = tg.snapshot_at(t0);
    std::vector<SerialPlan> plans;
    std::string unreachable;
    for (std::size_t i = 0; i < task.clients.size(); ++i) {
        const ClientSpec& client = task.clients[i];
        SerialPlan plan;
        plan.client_pos = i;
        plan.client_id = client.client_id;
        plan.site = resolve_site(snap0, client.site_id);
        try {
            plan.dl_path = routes.at_time(t0, server_idx, plan.site);
        } catch (const NoRouteError&) {
            if (!unreachable.empty()) unreachable += ", ";
            unreachable += client.client_id;
            continue;
        }
        plan.dl_time_s = transmission_time_s(task.model.size_mb, plan.dl_path.bottleneck_mbps);
        plan.train_time_s = task.model.training_time_s * client.training_multiplier;
        plans.push_back(std::move(plan));
    }
    if (!unreachable.empty())
        throw NoRouteError("clients unreachable from server at round start: " + unreachable);
    return plans;
}

double window_end_s(const TemporalGraph& tg, int window_index) {
    return (window_index + 1) * tg.window_length_s;
}

/// Counts (or rejects, in strict mode) a transmission spilling past the
/// window its path was computed on.
void note_overrun(const TemporalGraph& tg, const ScheduleOptions& options, int pinned_window,
                  double end_s, const std::string& client_id, Phase phase, int& overruns) {
    if (end_s <= window_end_s(tg, pinned_window) + time_tol) return;
    ++overruns;
    log_info("transmission for client " + client_id + " (" + phase_name(phase) +
             ") overruns window " + std::to_string(pinned_window));
    if (options.strict_windows)
        throw OutOfHorizonError("strict windows: transmission for client " + client_id +
                                " overruns window " + std::to_string(pinned_window));
}

void check_horizon(const TemporalGraph& tg, double t0, double makespan_s) {
    if (t0 + makespan_s > tg.horizon_s() + time_tol)
        throw OutOfHorizonError("schedule ends at " + std::to_string(t0 + makespan_s) +
                                " s, beyond the temporal-graph horizon of " +
                                std::to_string(tg.horizon_s()) + " s");
}

void sort_intervals(std::vector<PhaseInterval>& intervals) {
    std::sort(intervals.begin(), intervals.end(), [](const PhaseInterval& a, const PhaseInterval& b) {
        return std::tie(a.client_id, a.phase) < std::tie(b.client_id, b.phase);
    });
}

/// Serial-exclusive evaluation shared by the on-demand policy and the
/// oracle: downloads back to back in dl_order from t0; uploads served one at
/// a time in ul_order (or first-finish-first-upload when ul_order is null).
RoundSchedule evaluate_serial(const TemporalGraph& tg, const FLTask& task,
                              const ScheduleOptions& options, double t0,
                              std::int32_t server_idx, const std::vector<SerialPlan>& plans,
                              std::span<const std::size_t> dl_order,
                              const std::vector<std::size_t>* ul_order, RouteCache& routes,
                              Policy policy) {
    RoundSchedule schedule;
    schedule.policy = policy;
    schedule.channel = options.channel.mode;
    schedule.path_metric = options.path_metric;
    schedule.propagation_delay_included = options.include_propagation_delay;
    schedule.round_start_s = t0;

    const std::size_t n = plans.size();
    std::vector<double> dl_start(n), dl_end(n), train_start(n), train_end(n);

    double cursor = t0;
    for (std::size_t k : dl_order) {
        dl_start[k] = cursor;
        dl_end[k] = cursor + plans[k].dl_time_s;
        cursor = dl_end[k];
        note_overrun(tg, options, plans[k].dl_path.window_index, dl_end[k], plans[k].client_id,
                     Phase::distribute, schedule.window_overruns);
    }
    const double downloads_done = cursor;

    for (std::size_t k = 0; k < n; ++k) {
        train_start[k] = dl_end[k];
        if (options.include_propagation_delay)
            train_start[k] += plans[k].dl_path.total_delay_ms / 1000.0;
        train_end[k] = train_start[k] + plans[k].train_time_s;
    }

    std::vector<std::size_t> upload_order;
    if (ul_order != nullptr) {
        upload_order = *ul_order;
    } else {
        // First-finish, first-upload; ties by client id.
        upload_order.resize(n);
        for (std::size_t k = 0; k < n; ++k) upload_order[k] = k;
        std::sort(upload_order.begin(), upload_order.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(train_end[a], plans[a].client_id) <
                   std::tie(train_end[b], plans[b].client_id);
        });
    }

    std::vector<double> ul_start(n), ul_end(n);
    std::vector<RoutePath> ul_path(n);
    double channel_free = options.channel.mode == ChannelMode::joint ? downloads_done : t0;
    double makespan_end = t0;
    for (std::size_t j : upload_order) {
        const double start = std::max(train_end[j], channel_free);
        const RoutePath& path = routes.at_time(start, plans[j].site, server_idx);
        const double duration = transmission_time_s(task.model.size_mb, path.bottleneck_mbps);
        ul_start[j] = start;
        ul_end[j] = start + duration;
        ul_path[j] = path;
        channel_free = ul_end[j];
        note_overrun(tg, options, path.window_index, ul_end[j], plans[j].client_id, Phase::upload,
                     schedule.window_overruns);
        double finished = ul_end[j];
        if (options.include_propagation_delay) finished += path.total_delay_ms / 1000.0;
        makespan_end = std::max(makespan_end, finished);
    }

    schedule.makespan_s = makespan_end - t0;
    check_horizon(tg, t0, schedule.makespan_s);

    schedule.intervals.reserve(3 * n);
    for (std::size_t k = 0; k < n; ++k) {
        schedule.intervals.push_back(
            {plans[k].client_id, Phase::distribute, dl_start[k], dl_end[k], plans[k].dl_path,
             std::nullopt, {}});
        schedule.intervals.push_back({plans[k].client_id, Phase::train, train_start[k],
                                      train_end[k], std::nullopt, std::nullopt, {}});
        schedule.intervals.push_back(
            {plans[k].client_id, Phase::upload, ul_start[k], ul_end[k], ul_path[k], std::nullopt, {}});
    }
    sort_intervals(schedule.intervals);
    return schedule;
}

std::vector<std::size_t> ascending_download_order(const std::vector<SerialPlan>& plans) {
    std::vector<std::size_t> order(plans.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(plans[a].dl_time_s, plans[a].client_id) <
               std::tie(plans[b].dl_time_s, plans[b].client_id);
    });
    return order;
}

} // namespace

RoundSchedule schedule_on_demand(const TemporalGraph& tg, const FLTask& task,
                                 const ScheduleOptions& options, double t0) {
    validate_task(task);
    RouteCache routes(tg, options.path_metric);
    const std::int32_t server_idx = resolve_site(tg.snapshot_at(t0), task.server_site);
    const std::vector<SerialPlan> plans = build_plans(tg, task, t0, server_idx, routes);
    const std::vector<std::size_t> order = ascending_download_order(plans);
    return evaluate_serial(tg, task, options, t0, server_idx, plans, order, nullptr, routes,
                           Policy::on_demand);
}

RoundSchedule oracle_schedule(const TemporalGraph& tg, const FLTask& task,
                              const ScheduleOptions& options, double t0) {
    validate_task(task);
    if (task.clients.size() > 8)
        throw GuardError("oracle_optimal enumerates at most 8 clients, got " +
                         std::to_string(task.clients.size()));
    RouteCache routes(tg, options.path_metric);
    const std::int32_t server_idx = resolve_site(tg.snapshot_at(t0), task.server_site);
    std::vector<SerialPlan> plans = build_plans(tg, task, t0, server_idx, routes);

    // Enumerate in client-id order so ties resolve to the lexicographically
    // smallest (download order, upload order) pair.
    std::sort(plans.begin(), plans.end(),
              [](const SerialPlan& a, const SerialPlan& b) { return a.client_id < b.client_id; });
    const std::size_t n = plans.size();
    std::vector<std::size_t> base(n);
    for (std::size_t k = 0; k < n; ++k) base[k] = k;

    RoundSchedule best;
    bool have_best = false;
    std::exception_ptr last_failure;
    std::vector<std::size_t> dl_order = base;
    do {
        std::vector<std::size_t> ul_order = base;
        do {
            try {
                RoundSchedule candidate = evaluate_serial(tg, task, options, t0, server_idx, plans,
                                                          dl_order, &ul_order, routes,
                                                          Policy::oracle_optimal);
                if (!have_best || candidate.makespan_s < best.makespan_s) {
                    best = std::move(candidate);
                    have_best = true;
                }
            } catch (const Error&) {
                // An order pair can push an upload past the horizon or into a
                // window with no route; infeasible pairs just drop out.
                last_failure = std::current_exception();
            }
        } while (std::next_permutation(ul_order.begin(), ul_order.end()));
    } while (std::next_permutation(dl_order.begin(), dl_order.end()));
    if (!have_best) std::rethrow_exception(last_failure);
    return best;
}

std::vector<double> max_min_rates(const SnapshotGraph& snapshot, std::span<const FlowSpec> flows) {
    // Canonical processing order: sort by flow id so the allocation is
    // independent of the caller's ordering.
    std::vector<std::size_t> order(flows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return flows[a].flow_id < flows[b].flow_id;
    });

    const auto n_nodes = static_cast<std::int64_t>(snapshot.node_count());
    struct Link {
        double capacity = 0.0;
        std::vector<std::size_t> flow_slots; // positions in `order`
    };
    std::map<std::int64_t, Link> links;
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
        const FlowSpec& flow = flows[order[slot]];
        const RoutePath& path = flow.path;
        for (std::size_t e = 0; e < path.edges.size(); ++e) {
            const std::int64_t key =
                static_cast<std::int64_t>(path.nodes[e]) * n_nodes + path.nodes[e + 1];
            Link& link = links[key];
            link.capacity = path.edges[e].bandwidth_mbps;
            link.flow_slots.push_back(slot);
        }
    }

    std::vector<double> rate(order.size(), 0.0);
    std::vector<bool> frozen(order.size(), false);
    std::size_t remaining = order.size();
    double level = 0.0;
    while (remaining > 0) {
        double next_level = std::numeric_limits<double>::infinity();
        for (const auto& [key, link] : links) {
            double frozen_sum = 0.0;
            std::size_t unfrozen = 0;
            for (std::size_t slot : link.flow_slots) {
                if (frozen[slot])
                    frozen_sum += rate[slot];
                else
                    ++unfrozen;
            }
            if (unfrozen == 0) continue;
            const double candidate = (link.capacity - frozen_sum) / static_cast<double>(unfrozen);
            next_level = std::min(next_level, candidate);
        }
        next_level = std::max(next_level, level);
        const double freeze_tol = 1e-12 * std::max(1.0, next_level);

        // Freeze every unfrozen flow crossing a link that saturates at this level.
        bool froze_any = false;
        for (const auto& [key, link] : links) {
            double frozen_sum = 0.0;
            std::size_t unfrozen = 0;
            for (std::size_t slot : link.flow_slots) {
                if (frozen[slot])
                    frozen_sum += rate[slot];
                else
                    ++unfrozen;
            }
            if (unfrozen == 0) continue;
            const double candidate = (link.capacity - frozen_sum) / static_cast<double>(unfrozen);
            if (candidate <= next_level + freeze_tol) {
                for (std::size_t slot : link.flow_slots) {
                    if (!frozen[slot]) {
                        frozen[slot] = true;
                        rate[slot] = next_level;
                        --remaining;
                        froze_any = true;
                    }
                }
            }
        }
        level = next_level;
        if (!froze_any) { // defensive; cannot happen with positive capacities
            for (std::size_t slot = 0; slot < order.size(); ++slot) {
                if (!frozen[slot]) {
                    frozen[slot] = true;
                    rate[slot] = level;
                    --remaining;
                }
            }
        }
    }

    std::vector<double> result(flows.size(), 0.0);
    for (std::size_t slot = 0; slot < order.size(); ++slot) result[order[slot]] = rate[slot];
    return result;
}

namespace {

/// Live fluid flow in the multiplexed simulation.
struct FluidFlow {
    std::size_t plan_idx = 0;
    Phase phase = Phase::distribute;
    std::string flow_id;
    RoutePath path;
    double start_s = 0.0;
    double remaining_bits = 0.0;
    double rate_mbps = 0.0;
    bool overran = false;
    std::vector<RateSegment> segments;

    void extend_segment(double from_s, double to_s) {
        if (to_s <= from_s) return;
        if (!segments.empty() && segments.back().rate_mbps == rate_mbps &&
            segments.back().end_s == from_s) {
            segments.back().end_s = to_s;
        } else {
            segments.push_back({from_s, to_s, rate_mbps});
        }
    }
};

struct PendingUpload {
    double ready_s = 0.0;
    std::size_t plan_idx = 0;
};

} // namespace

RoundSchedule schedule_multiplexed(const TemporalGraph& tg, const FLTask& task,
                                   const ScheduleOptions& options, double t0) {
    validate_task(task);
    RouteCache routes(tg, options.path_metric);
    const SnapshotGraph& snap0 = tg.snapshot_at(t0);
    const std::int32_t server_idx = resolve_site(snap0, task.server_site);
    const std::vector<SerialPlan> plans = build_plans(tg, task, t0, server_idx, routes);
    const double payload_bits = model_bits(task.model.size_mb);
    const auto n_nodes = static_cast<std::int64_t>(snap0.node_count());

    RoundSchedule schedule;
    schedule.policy = Policy::statistical_multiplexing;
    schedule.channel = options.channel.mode;
    schedule.path_metric = options.path_metric;
    schedule.propagation_delay_included = options.include_propagation_delay;
    schedule.round_start_s = t0;

    const std::size_t n = plans.size();
    std::vector<PhaseInterval> dist_iv(n), train_iv(n), upload_iv(n);

    std::vector<FluidFlow> active;
    active.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        FluidFlow flow;
        flow.plan_idx = k;
        flow.phase = Phase::distribute;
        flow.flow_id = "dl:" + plans[k].client_id;
        flow.path = plans[k].dl_path;
        flow.start_s = t0;
        flow.remaining_bits = payload_bits;
        active.push_back(std::move(flow));
    }

    std::vector<PendingUpload> pending; // kept sorted by (ready, client id)
    auto pending_less = [&](const PendingUpload& a, const PendingUpload& b) {
        return std::tie(a.ready_s, plans[a.plan_idx].client_id) <
               std::tie(b.ready_s, plans[b.plan_idx].client_id);
    };

    // Per-window capacity lookup, built lazily.
    std::map<int, std::map<std::int64_t, double>> window_caps;
    auto caps_for_window = [&](int window_index) -> const std::map<std::int64_t, double>& {
        auto it = window_caps.find(window_index);
        if (it == window_caps.end()) {
            std::map<std::int64_t, double> caps;
            for (const EdgeRec& e : tg.snapshots[static_cast<std::size_t>(window_index)].edges) {
                caps[static_cast<std::int64_t>(e.u) * n_nodes + e.v] = e.bandwidth_mbps;
                caps[static_cast<std::int64_t>(e.v) * n_nodes + e.u] = e.bandwidth_mbps;
            }
            it = window_caps.emplace(window_index, std::move(caps)).first;
        }
        return it->second;
    };

    // Max-min allocation over the currently active flows, capacities from the
    // snapshot containing `now`. Paths stay pinned to their start snapshot; a
    // pinned edge missing from the current window keeps its pinned bandwidth.
    auto recompute_rates = [&](double now) {
        const SnapshotGraph& snap = tg.snapshot_at(now); // throws OutOfHorizon when beyond
        const auto& caps = caps_for_window(snap.window_index);

        std::vector<std::size_t> order(active.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return active[a].flow_id < active[b].flow_id;
        });

        struct Link {
            double capacity = 0.0;
            double pin_start = std::numeric_limits<double>::infinity();
            bool current = false;
            std::vector<std::size_t> slots;
        };
        std::map<std::int64_t, Link> links;
        for (std::size_t slot = 0; slot < order.size(); ++slot) {
            const FluidFlow& flow = active[order[slot]];
            for (std::size_t e = 0; e < flow.path.edges.size(); ++e) {
                const std::int64_t key =
                    static_cast<std::int64_t>(flow.path.nodes[e]) * n_nodes + flow.path.nodes[e + 1];
                Link& link = links[key];
                link.slots.push_back(slot);
                const auto cap_it = caps.find(key);
                if (cap_it != caps.end()) {
                    link.capacity = cap_it->second;
                    link.current = true;
                } else if (!link.current && flow.start_s < link.pin_start) {
                    // Fallback: bandwidth pinned at the earliest flow's start.
                    link.pin_start = flow.start_s;
                    link.capacity = flow.path.edges[e].bandwidth_mbps;
                }
            }
        }

        std::vector<double> rate(order.size(), 0.0);
        std::vector<bool> frozen(order.size(), false);
        std::size_t remaining = order.size();
        double level = 0.0;
        while (remaining > 0) {
            double next_level = std::numeric_limits<double>::infinity();
            for (const auto& [key, link] : links) {
                double frozen_sum = 0.0;
                std::size_t unfrozen = 0;
                for (std::size_t slot : link.slots) {
                    if (frozen[slot])
                        frozen_sum += rate[slot];
                    else
                        ++unfrozen;
                }
                if (unfrozen == 0) continue;
                next_level =
                    std::min(next_level, (link.capacity - frozen_sum) / static_cast<double>(unfrozen));
            }
            next_level = std::max(next_level, level);
            const double freeze_tol = 1e-12 * std::max(1.0, next_level);
            bool froze_any = false;
            for (const auto& [key, link] : links) {
                double frozen_sum = 0.0;
                std::size_t unfrozen = 0;
                for (std::size_t slot : link.slots) {
                    if (frozen[slot])
                        frozen_sum += rate[slot];
                    else
                        ++unfrozen;
                }
                if (unfrozen == 0) continue;
                const double candidate =
                    (link.capacity - frozen_sum) / static_cast<double>(unfrozen);
                if (candidate <= next_level + freeze_tol) {
                    for (std::size_t slot : link.slots) {
                        if (!frozen[slot]) {
                            frozen[slot] = true;
                            rate[slot] = next_level;
                            --remaining;
                            froze_any = true;
                        }
                    }
                }
            }
            level = next_level;
            if (!froze_any) {
                for (std::size_t slot = 0; slot < order.size(); ++slot)
                    if (!frozen[slot]) {
                        frozen[slot] = true;
                        rate[slot] = level;
                        --remaining;
                    }
            }
        }
        for (std::size_t slot = 0; slot < order.size(); ++slot)
            active[order[slot]].rate_mbps = rate[slot];

        if (options.record_link_loads) {
            for (const auto& [key, link] : links) {
                double sum = 0.0;
                for (std::size_t slot : link.slots) sum += rate[slot];
                schedule.link_loads.push_back({now, static_cast<std::int32_t>(key / n_nodes),
                                               static_cast<std::int32_t>(key % n_nodes),
                                               link.capacity, sum});
            }
        }
    };

    auto finish_flow = [&](FluidFlow& flow, double now) {
        const std::size_t k = flow.plan_idx;
        PhaseInterval iv;
        iv.client_id = plans[k].client_id;
        iv.phase = flow.phase;
        iv.start_s = flow.start_s;
        iv.end_s = now;
        iv.path = flow.path;
        const double duration = now - flow.start_s;
        iv.mean_rate_mbps = duration > 0.0 ? payload_bits / 1e6 / duration : 0.0;
        iv.segments = std::move(flow.segments);
        if (flow.phase == Phase::distribute) {
            dist_iv[k] = std::move(iv);
            double train_start = now;
            if (options.include_propagation_delay) train_start += flow.path.total_delay_ms / 1000.0;
            const double train_end = train_start + plans[k].train_time_s;
            train_iv[k] = {plans[k].client_id, Phase::train, train_start, train_end,
                           std::nullopt,        std::nullopt, {}};
            pending.push_back({train_end, k});
            std::sort(pending.begin(), pending.end(), pending_less);
        } else {
            upload_iv[k] = std::move(iv);
        }
    };

    auto start_uploads_due = [&](double now) {
        while (!pending.empty() && pending.front().ready_s <= now + time_tol) {
            const std::size_t k = pending.front().plan_idx;
            pending.erase(pending.begin());
            FluidFlow flow;
            flow.plan_idx = k;
            flow.phase = Phase::upload;
            flow.flow_id = "ul:" + plans[k].client_id;
            flow.path = routes.at_time(now, plans[k].site, server_idx);
            flow.start_s = now;
            flow.remaining_bits = payload_bits;
            active.push_back(std::move(flow));
        }
    };

    double now = t0;
    if (!active.empty()) recompute_rates(now);
    while (!active.empty() || !pending.empty()) {
        if (active.empty()) {
            now = pending.front().ready_s;
            start_uploads_due(now);
            recompute_rates(now);
            continue;
        }

        double next_completion = std::numeric_limits<double>::infinity();
        for (const FluidFlow& flow : active)
            next_completion =
                std::min(next_completion, now + flow.remaining_bits / (flow.rate_mbps * 1e6));
        double next_event = next_completion;
        if (!pending.empty()) next_event = std::min(next_event, pending.front().ready_s);
        const double boundary =
            (std::floor(now / tg.window_length_s) + 1.0) * tg.window_length_s;
        next_event = std::min(next_event, boundary);

        // Advance all flows to the event epoch.
        for (FluidFlow& flow : active) {
            flow.remaining_bits -= flow.rate_mbps * 1e6 * (next_event - now);
            flow.extend_segment(now, next_event);
        }
        now = next_event;

        bool window_crossed = now >= boundary - time_tol;
        for (auto it = active.begin(); it != active.end();) {
            if (it->remaining_bits <= completion_bits_tol) {
                finish_flow(*it, now);
                it = active.erase(it);
            } else {
                if (window_crossed && !it->overran) {
                    it->overran = true;
                    ++schedule.window_overruns;
                    log_info("fluid transfer " + it->flow_id + " crosses a window boundary");
                    if (options.strict_windows)
                        throw OutOfHorizonError("strict windows: fluid transfer " + it->flow_id +
                                                " crosses a window boundary");
                }
                ++it;
            }
        }
        start_uploads_due(now);
        if (!active.empty()) recompute_rates(now);
    }

    double makespan_end = t0;
    for (std::size_t k = 0; k < n; ++k) {
        double finished = upload_iv[k].end_s;
        if (options.include_propagation_delay && upload_iv[k].path)
            finished += upload_iv[k].path->total_delay_ms / 1000.0;
        makespan_end = std::max(makespan_end, finished);
    }
    schedule.makespan_s = makespan_end - t0;
    check_horizon(tg, t0, schedule.makespan_s);

    schedule.intervals.reserve(3 * n);
    for (std::size_t k = 0; k < n; ++k) {
        schedule.intervals.push_back(std::move(dist_iv[k]));
        schedule.intervals.push_back(std::move(train_iv[k]));
        schedule.intervals.push_back(std::move(upload_iv[k]));
    }
    sort_intervals(schedule.intervals);
    return schedule;
}

namespace {

bool serial_policy(Policy policy) {
    return policy == Policy::on_demand || policy == Policy::oracle_optimal;
}

void check_transfer_interval(const RoundSchedule& schedule, const FLTask& task,
                             const PhaseInterval& iv, std::vector<Violation>& out) {
    if (!iv.path) {
        out.push_back({ViolationKind::missing_interval, iv.phase, iv.client_id,
                       "transfer interval carries no path"});
        return;
    }
    const double recomputed = bottleneck(iv.path->edges);
    if (recomputed != iv.path->bottleneck_mbps) {
        out.push_back({ViolationKind::path_inconsistent, iv.phase, iv.client_id,
                       "stored bottleneck differs from min over edges"});
    }
    const double duration = iv.end_s - iv.start_s;
    if (serial_policy(schedule.policy)) {
        const double expected = transmission_time_s(task.model.size_mb, iv.path->bottleneck_mbps);
        if (std::abs(duration - expected) > time_tol)
            out.push_back({ViolationKind::duration_mismatch, iv.phase, iv.client_id,
                           "duration " + std::to_string(duration) + " s, expected " +
                               std::to_string(expected) + " s"});
    } else {
        // Fluid transfer: the delivered payload must match the model size.
        const double expected_bits = model_bits(task.model.size_mb);
        double delivered = 0.0;
        if (!iv.segments.empty()) {
            double cursor = iv.start_s;
            bool contiguous = true;
            for (const RateSegment& seg : iv.segments) {
                if (std::abs(seg.start_s - cursor) > time_tol) contiguous = false;
                delivered += seg.rate_mbps * 1e6 * (seg.end_s - seg.start_s);
                cursor = seg.end_s;
            }
            if (!contiguous || std::abs(cursor - iv.end_s) > time_tol)
                out.push_back({ViolationKind::bits_mismatch, iv.phase, iv.client_id,
                               "rate segments do not tile the interval"});
        } else if (iv.mean_rate_mbps) {
            delivered = *iv.mean_rate_mbps * 1e6 * duration;
        }
        const double tol = std::max(1.0, 1e-6 * expected_bits);
        if (std::abs(delivered - expected_bits) > tol)
            out.push_back({ViolationKind::bits_mismatch, iv.phase, iv.client_id,
                           "delivered " + std::to_string(delivered) + " bits, expected " +
                               std::to_string(expected_bits)});
    }
}

void check_exclusive(const std::vector<const PhaseInterval*>& intervals, Phase phase,
                     std::vector<Violation>& out) {
    std::vector<const PhaseInterval*> sorted = intervals;
    std::sort(sorted.begin(), sorted.end(), [](const PhaseInterval* a, const PhaseInterval* b) {
        return std::tie(a->start_s, a->client_id) < std::tie(b->start_s, b->client_id);
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->start_s < sorted[i - 1]->end_s - time_tol)
            out.push_back({ViolationKind::channel_conflict, phase, sorted[i]->client_id,
                           "overlaps transfer of client " + sorted[i - 1]->client_id});
    }
}

} // namespace

std::vector<Violation> validate(const RoundSchedule& schedule, const FLTask& task,
                                const TemporalGraph& tg) {
    (void)tg;
    std::vector<Violation> out;

    std::map<std::pair<std::string, Phase>, const PhaseInterval*> by_key;
    for (const PhaseInterval& iv : schedule.intervals) {
        if (!by_key.emplace(std::make_pair(iv.client_id, iv.phase), &iv).second)
            out.push_back({ViolationKind::missing_interval, iv.phase, iv.client_id,
                           "duplicate interval"});
        if (iv.end_s < iv.start_s - time_tol || iv.start_s < schedule.round_start_s - time_tol)
            out.push_back({ViolationKind::precedence, iv.phase, iv.client_id,
                           "interval runs backwards or precedes the round start"});
    }

    std::vector<const PhaseInterval*> downloads, uploads;
    double makespan_end = schedule.round_start_s;
    for (const ClientSpec& client : task.clients) {
        const PhaseInterval* phases[3] = {nullptr, nullptr, nullptr};
        bool complete = true;
        for (Phase phase : {Phase::distribute, Phase::train, Phase::upload}) {
            auto it = by_key.find({client.client_id, phase});
            if (it == by_key.end()) {
                out.push_back({ViolationKind::missing_interval, phase, client.client_id,
                               "interval absent"});
                complete = false;
            } else {
                phases[static_cast<int>(phase)] = it->second;
            }
        }
        if (!complete) continue;
        const PhaseInterval& dist = *phases[0];
        const PhaseInterval& train = *phases[1];
        const PhaseInterval& upload = *phases[2];

        check_transfer_interval(schedule, task, dist, out);
        check_transfer_interval(schedule, task, upload, out);

        const double expected_train = task.model.training_time_s * client.training_multiplier;
        if (std::abs((train.end_s - train.start_s) - expected_train) > time_tol)
            out.push_back({ViolationKind::duration_mismatch, Phase::train, client.client_id,
                           "training duration differs from the task model"});

        double receive_done = dist.end_s;
        if (schedule.propagation_delay_included && dist.path)
            receive_done += dist.path->total_delay_ms / 1000.0;
        if (train.start_s < receive_done - time_tol)
            out.push_back({ViolationKind::precedence, Phase::train, client.client_id,
                           "training starts before the model is received"});
        if (upload.start_s < train.end_s - time_tol)
            out.push_back({ViolationKind::precedence, Phase::upload, client.client_id,
                           "upload starts before training ends"});

        double finished = upload.end_s;
        if (schedule.propagation_delay_included && upload.path)
            finished += upload.path->total_delay_ms / 1000.0;
        makespan_end = std::max(makespan_end, finished);

        downloads.push_back(&dist);
        uploads.push_back(&upload);
    }

    if (serial_policy(schedule.policy)) {
        check_exclusive(downloads, Phase::distribute, out);
        check_exclusive(uploads, Phase::upload, out);
        if (schedule.channel == ChannelMode::joint) {
            std::vector<const PhaseInterval*> all = downloads;
            all.insert(all.end(), uploads.begin(), uploads.end());
            check_exclusive(all, Phase::upload, out);
        }
    }

    if (std::abs(schedule.makespan_s - (makespan_end - schedule.round_start_s)) > time_tol)
        out.push_back({ViolationKind::makespan_mismatch, Phase::upload, "",
                       "stored makespan differs from the latest aggregation completion"});
    return out;
}

const char* phase_name(Phase phase) {
    switch (phase) {
        case Phase::distribute: return "distribute";
        case Phase::train: return "train";
        case Phase::upload: return "upload";
    }
    return "unknown";
}

const char* policy_name(Policy policy) {
    switch (policy) {
        case Policy::on_demand: return "on_demand";
        case Policy::statistical_multiplexing: return "statistical_multiplexing";
        case Policy::oracle_optimal: return "oracle_optimal";
    }
    return "unknown";
}

const char* channel_mode_name(ChannelMode mode) {
    return mode == ChannelMode::per_direction ? "per_direction" : "joint";
}

const char* path_metric_name(PathMetric metric) {
    return metric == PathMetric::widest ? "widest" : "min_delay";
}

const char* violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::missing_interval: return "missing_interval";
        case ViolationKind::duration_mismatch: return "duration_mismatch";
        case ViolationKind::bits_mismatch: return "bits_mismatch";
        case ViolationKind::precedence: return "precedence";
        case ViolationKind::channel_conflict: return "channel_conflict";
        case ViolationKind::makespan_mismatch: return "makespan_mismatch";
        case ViolationKind::path_inconsistent: return "path_inconsistent";
    }
    return "unknown";
}

} // namespace fedsched
