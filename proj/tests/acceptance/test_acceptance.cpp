#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fedsched/experiment.hpp"
#include "fedsched/gantt.hpp"
#include "fedsched/scenario.hpp"
#include "fedsched/scheduler.hpp"
#include "fedsched/serialize.hpp"
#include "test_helpers.hpp"

using namespace fedsched;
using namespace fedsched::testing;
namespace fs = std::filesystem;

namespace {

/// Collects sub-checks for one acceptance criterion and prints a single
/// PASS/FAIL line; the doctest assertion keeps ctest honest.
class Criterion {
public:
    Criterion(const char* id, const char* name) : id_(id), name_(name) {}

    void expect(bool condition, const std::string& detail) {
        if (condition) return;
        ok_ = false;
        if (notes_.size() < 8) notes_.push_back(detail);
    }

    void note(const std::string& line) { infos_.push_back(line); }

    bool finish() {
        std::printf("[ACCEPT] %s %s: %s\n", id_, name_, ok_ ? "PASS" : "FAIL");
        for (const std::string& info : infos_) std::printf("         %s\n", info.c_str());
        for (const std::string& note : notes_) std::printf("         failed: %s\n", note.c_str());
        std::fflush(stdout);
        return ok_;
    }

private:
    const char* id_;
    const char* name_;
    bool ok_ = true;
    std::vector<std::string> notes_;
    std::vector<std::string> infos_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string scenario_dir() {
    const char* dir = std::getenv("FEDSCHED_SCENARIO_DIR");
    REQUIRE(dir != nullptr);
    return dir;
}

fs::path tmp_dir() {
    const char* tmp = std::getenv("FEDSCHED_TEST_TMP");
    REQUIRE(tmp != nullptr);
    fs::path dir = fs::path(tmp) / "acceptance";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j)
                if (v[j] < v[i]) r[i] += 1.0;
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mean = (n - 1.0) / 2.0;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean) * (rx[i] - mean);
        dy += (ry[i] - mean) * (ry[i] - mean);
    }
    return num / std::sqrt(dx * dy);
}

const ReductionRow* reduction_of(const SweepResult& result, const std::string& value) {
    for (const ReductionRow& row : result.reductions)
        if (row.sweep_value == value) return &row;
    return nullptr;
}

const CellSummary* summary_of(const SweepResult& result, const std::string& value, Policy policy) {
    for (const CellSummary& s : result.summaries)
        if (s.sweep_value == value && s.policy == policy) return &s;
    return nullptr;
}

// Shared between criteria 4 and 5 so the ten-minute budget is spent once.
struct FigResults {
    SweepResult fig5;
    SweepResult fig6;
    double runtime_s = 0.0;
};

const FigResults& fig_results() {
    static const FigResults results = [] {
        FigResults r;
        const auto start = std::chrono::steady_clock::now();
        r.fig5 = run_sweep(load_plan(scenario_dir() + "/fig5.json"), 2);
        r.fig6 = run_sweep(load_plan(scenario_dir() + "/fig6.json"), 2);
        r.runtime_s = seconds_since(start);
        return r;
    }();
    return results;
}

} // namespace

TEST_CASE("criterion 1: constraint validity over fuzzed instances") {
    Criterion criterion("C1", "constraint-validity");
    const auto start = std::chrono::steady_clock::now();
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const FuzzInstance instance = make_fuzz_instance(seed);
        const RoundSchedule od =
            schedule_on_demand(instance.tg, instance.task, instance.options, 0.0);
        const RoundSchedule mux =
            schedule_multiplexed(instance.tg, instance.task, instance.options, 0.0);
        const auto od_violations = validate(od, instance.task, instance.tg);
        const auto mux_violations = validate(mux, instance.task, instance.tg);
        criterion.expect(od_violations.empty(),
                         "on_demand violations at fuzz seed " + std::to_string(seed));
        criterion.expect(mux_violations.empty(),
                         "multiplexed violations at fuzz seed " + std::to_string(seed));
        ++checked;
    }
    const double elapsed = seconds_since(start);
    criterion.note("instances=" + std::to_string(checked) +
                   " runtime_s=" + std::to_string(elapsed));
    criterion.expect(elapsed < 30.0, "runtime exceeded 30 s");
    CHECK(criterion.finish());
}

TEST_CASE("criterion 2: oracle dominance and homogeneous optimality") {
    Criterion criterion("C2", "oracle-dominance");
    double gap_sum = 0.0;
    int gap_count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const FuzzInstance instance = make_fuzz_instance(hash_combine(0x0a11ce, seed), 5);
        const RoundSchedule od =
            schedule_on_demand(instance.tg, instance.task, instance.options, 0.0);
        const RoundSchedule oracle =
            oracle_schedule(instance.tg, instance.task, instance.options, 0.0);
        criterion.expect(od.makespan_s >= oracle.makespan_s,
                         "on-demand beat the oracle at fuzz seed " + std::to_string(seed));
        if (oracle.makespan_s > 0.0) {
            gap_sum += (od.makespan_s - oracle.makespan_s) / oracle.makespan_s;
            ++gap_count;
        }
    }
    // Homogeneous instances: identical download, upload and training times.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SplitMix rng(hash_combine(0x0b0b, seed));
        const int n_clients = static_cast<int>(rng.uniform_int(2, 5));
        ToyGraph graph;
        graph.node("server").node("hub", NodeKind::satellite);
        graph.edge("server", "hub", rng.uniform(5.0, 20.0));
        FuzzInstance instance;
        instance.task.server_site = "server";
        instance.task.model = {"homog", rng.uniform(1.0, 40.0), rng.uniform(5.0, 200.0)};
        const double branch = rng.uniform(25.0, 60.0);
        for (int c = 0; c < n_clients; ++c) {
            const std::string id = "c" + std::to_string(c);
            graph.node(id).edge("hub", id, branch);
            instance.task.clients.push_back({id, id, 1.0});
        }
        instance.tg = graph.temporal(1, 1e7);
        const RoundSchedule od =
            schedule_on_demand(instance.tg, instance.task, instance.options, 0.0);
        const RoundSchedule oracle =
            oracle_schedule(instance.tg, instance.task, instance.options, 0.0);
        criterion.expect(od.makespan_s == oracle.makespan_s,
                         "homogeneous tie missed at seed " + std::to_string(seed));
    }
    criterion.note("mean on-demand-vs-oracle gap = " +
                   std::to_string(100.0 * gap_sum / std::max(gap_count, 1)) + "% (informational)");
    CHECK(criterion.finish());
}

TEST_CASE("criterion 3: shared-bottleneck dominance") {
    Criterion criterion("C3", "shared-bottleneck-dominance");
    int held = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const FuzzInstance instance = make_shared_bottleneck_instance(seed);
        const RoundSchedule od =
            schedule_on_demand(instance.tg, instance.task, instance.options, 0.0);
        const RoundSchedule mux =
            schedule_multiplexed(instance.tg, instance.task, instance.options, 0.0);
        const bool dominated = od.makespan_s <= mux.makespan_s + 1e-9;
        criterion.expect(dominated, "on-demand lost at seed " + std::to_string(seed) + " (od=" +
                                        std::to_string(od.makespan_s) + ", mux=" +
                                        std::to_string(mux.makespan_s) + ")");
        if (dominated) ++held;
    }
    criterion.note("dominance held in " + std::to_string(held) + "/500 instances");
    CHECK(criterion.finish());
}

TEST_CASE("criterion 4: paper-scale reduction reproduction") {
    Criterion criterion("C4", "paper-scale-reductions");
    const FigResults& figs = fig_results();

    criterion.expect(figs.fig5.failures.empty(),
                     "fig5 produced " + std::to_string(figs.fig5.failures.size()) + " failed cells");
    for (const std::string& label : figs.fig5.sweep_labels) {
        if (std::stoi(label) < 4) continue;
        const ReductionRow* row = reduction_of(figs.fig5, label);
        criterion.expect(row != nullptr, "fig5 missing reduction for " + label + " clients");
        if (row == nullptr) continue;
        criterion.note("fig5 clients=" + label + " reduction=" +
                       std::to_string(row->relative * 100.0) + "%");
        criterion.expect(row->relative >= 0.10 && row->relative <= 0.50,
                         "fig5 clients=" + label + " reduction " +
                             std::to_string(row->relative * 100.0) + "% outside [10%, 50%]");
    }

    criterion.expect(figs.fig6.failures.empty(),
                     "fig6 produced " + std::to_string(figs.fig6.failures.size()) + " failed cells");
    std::vector<double> sizes, reductions;
    for (const std::string& label : figs.fig6.sweep_labels) {
        const ReductionRow* row = reduction_of(figs.fig6, label);
        criterion.expect(row != nullptr, "fig6 missing reduction for " + label);
        if (row == nullptr) continue;
        criterion.note("fig6 model=" + label + " reduction=" +
                       std::to_string(row->relative * 100.0) + "%");
        criterion.expect(row->relative >= 0.08 && row->relative <= 0.30,
                         "fig6 model=" + label + " reduction " +
                             std::to_string(row->relative * 100.0) + "% outside [8%, 30%]");
        sizes.push_back(find_model(label)->size_mb);
        reductions.push_back(row->relative);
    }
    if (sizes.size() >= 2) {
        const double rho = spearman(sizes, reductions);
        criterion.note("fig6 Spearman(reduction, size) = " + std::to_string(rho));
        criterion.expect(rho > 0.0, "fig6 reduction does not trend upward with model size");
    }
    criterion.note("combined fig5+fig6 runtime_s=" + std::to_string(figs.runtime_s));
    criterion.expect(figs.runtime_s < 600.0, "fig plans exceeded the 10 minute budget");
    CHECK(criterion.finish());
}

TEST_CASE("criterion 5: monotone makespan shapes") {
    Criterion criterion("C5", "monotone-shapes");
    const FigResults& figs = fig_results();
    for (Policy policy : {Policy::on_demand, Policy::statistical_multiplexing}) {
        double prev = -1.0;
        for (const std::string& label : figs.fig5.sweep_labels) {
            const CellSummary* cell = summary_of(figs.fig5, label, policy);
            criterion.expect(cell != nullptr && cell->n > 0, "fig5 missing cell " + label);
            if (cell == nullptr) continue;
            criterion.expect(cell->mean_makespan_s > prev,
                             std::string(policy_name(policy)) + " fig5 mean not increasing at " +
                                 label + " clients");
            prev = cell->mean_makespan_s;
        }
        prev = -1.0;
        for (const std::string& label : figs.fig6.sweep_labels) {
            const CellSummary* cell = summary_of(figs.fig6, label, policy);
            criterion.expect(cell != nullptr && cell->n > 0, "fig6 missing cell " + label);
            if (cell == nullptr) continue;
            criterion.expect(cell->mean_makespan_s > prev,
                             std::string(policy_name(policy)) + " fig6 mean not increasing at " +
                                 label);
            prev = cell->mean_makespan_s;
        }
    }
    CHECK(criterion.finish());
}

TEST_CASE("criterion 6: scheduling performance and client-count scaling") {
    Criterion criterion("C6", "complexity-scale");

    // One on-demand round on a 1,000-satellite snapshot with 12 clients.
    const ScenarioFile scenario = [&] {
        ExperimentPlan plan = load_plan(scenario_dir() + "/fig5.json");
        ScenarioFile s = plan.scenario;
        s.scheduling.horizon_windows = 40;
        return s;
    }();
    const TemporalGraph tg = build_temporal_graph(scenario);
    const FLTask task = make_task(scenario);
    const ScheduleOptions options = make_schedule_options(scenario);
    schedule_on_demand(tg, task, options, 0.0); // warm-up
    const auto start = std::chrono::steady_clock::now();
    const RoundSchedule round = schedule_on_demand(tg, task, options, 0.0);
    const double round_s = seconds_since(start);
    criterion.note("12-client on-demand round on 1000-satellite snapshot: " +
                   std::to_string(round_s * 1e3) + " ms, makespan " +
                   std::to_string(round.makespan_s) + " s");
    criterion.expect(round_s < 1.0, "round took " + std::to_string(round_s) + " s (>= 1 s)");

    // Growth in client count on a fixed synthetic graph: a 40x40 grid with
    // the server in one corner and 32 clients spread over the far rows.
    ToyGraph grid;
    SplitMix rng(0x6421);
    const int side = 40;
    const auto name = [&](int r, int c) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "g%02d-%02d", r, c);
        return std::string(buf);
    };
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) grid.node(name(r, c));
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            if (c + 1 < side) grid.edge(name(r, c), name(r, c + 1), rng.uniform(10.0, 30.0));
            if (r + 1 < side) grid.edge(name(r, c), name(r + 1, c), rng.uniform(10.0, 30.0));
        }
    FuzzInstance synth;
    synth.tg = grid.temporal(1, 1e7);
    synth.task.server_site = name(0, 0);
    synth.task.model = {"synthetic", 10.0, 30.0};
    for (int c = 0; c < 32; ++c)
        synth.task.clients.push_back({"c" + std::to_string(100 + c),
                                      name(side - 1 - (c % 4), 1 + c), 1.0});

    std::vector<double> log_c, log_t;
    for (int count : {2, 4, 8, 16, 32}) {
        FLTask sub = synth.task;
        sub.clients.resize(count);
        double best = 1e9;
        for (int rep = 0; rep < 15; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            schedule_on_demand(synth.tg, sub, synth.options, 0.0);
            best = std::min(best, seconds_since(t0));
        }
        log_c.push_back(std::log(static_cast<double>(count)));
        log_t.push_back(std::log(best));
        criterion.note("clients=" + std::to_string(count) + " best_ms=" +
                       std::to_string(best * 1e3));
    }
    const double n = static_cast<double>(log_c.size());
    const double mean_x = std::accumulate(log_c.begin(), log_c.end(), 0.0) / n;
    const double mean_y = std::accumulate(log_t.begin(), log_t.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < log_c.size(); ++i) {
        num += (log_c[i] - mean_x) * (log_t[i] - mean_y);
        den += (log_c[i] - mean_x) * (log_c[i] - mean_x);
    }
    const double slope = num / den;
    criterion.note("log-log slope = " + std::to_string(slope));
    criterion.expect(slope < 1.5, "client-count scaling slope " + std::to_string(slope) + " >= 1.5");
    CHECK(criterion.finish());
}

TEST_CASE("criterion 7: byte-identical outputs across runs") {
    Criterion criterion("C7", "byte-determinism");
    const char* bin = std::getenv("FEDSCHED_BIN");
    REQUIRE(bin != nullptr);
    const fs::path dir = tmp_dir();

    // Compact constellation scenario for the generate step.
    const std::string scenario_text = R"({
      "format_version": 1,
      "constellation": {
        "num_satellites": 200, "num_planes": 10, "altitude_km": 1200.0,
        "inclination_deg": 53.0, "elevation_mask_deg": 10.0,
        "bandwidth_dist": {"min_mbps": 10.0, "max_mbps": 30.0},
        "rng_seed": 31, "ground_attachment": "best"
      },
      "sites": [
        {"name": "srv", "lat": 1.35, "lon": 103.82, "role": "server"},
        {"name": "cli", "lat": -23.55, "lon": -46.63, "role": "client"}
      ],
      "task": {"model": {"name": "tiny", "size_mb": 2.0, "training_time_s": 5.0},
               "server_site": "srv", "client_sites": ["cli"]},
      "scheduling": {"path_metric": "min_delay", "window_length_s": 10.0,
                     "horizon_windows": 6}
    })";
    const fs::path scenario_path = dir / "det_scenario.json";
    {
        std::ofstream out(scenario_path);
        out << scenario_text;
    }
    const auto run = [&](const std::string& args) {
        const std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>/dev/null";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };

    criterion.expect(run("generate " + scenario_path.string() + " -o " +
                         (dir / "det_a.json").string()) == 0,
                     "generate run 1 failed");
    criterion.expect(run("generate " + scenario_path.string() + " -o " +
                         (dir / "det_b.json").string()) == 0,
                     "generate run 2 failed");
    criterion.expect(slurp(dir / "det_a.json") == slurp(dir / "det_b.json"),
                     "temporal-graph files differ between runs");

    for (const char* policy : {"on_demand", "statistical_multiplexing"}) {
        const std::string base = std::string("schedule --graph ") + (dir / "det_a.json").string() +
                                 " --scenario " + scenario_path.string() + " --policy " + policy;
        criterion.expect(run(base + " -o " + (dir / "det_s1").string()) == 0,
                         std::string(policy) + " run 1 failed");
        criterion.expect(run(base + " -o " + (dir / "det_s2").string()) == 0,
                         std::string(policy) + " run 2 failed");
        criterion.expect(slurp(dir / "det_s1.json") == slurp(dir / "det_s2.json"),
                         std::string(policy) + " schedule JSONs differ");
        criterion.expect(slurp(dir / "det_s1.csv") == slurp(dir / "det_s2.csv"),
                         std::string(policy) + " schedule CSVs differ");
    }

    criterion.expect(run("gantt " + (dir / "det_s1.json").string() + " -o " +
                         (dir / "det_g1.svg").string()) == 0,
                     "gantt run 1 failed");
    criterion.expect(run("gantt " + (dir / "det_s1.json").string() + " -o " +
                         (dir / "det_g2.svg").string()) == 0,
                     "gantt run 2 failed");
    criterion.expect(slurp(dir / "det_g1.svg") == slurp(dir / "det_g2.svg"),
                     "SVG outputs differ between runs");
    CHECK(criterion.finish());
}

TEST_CASE("criterion 8: numerical conservation of fluid flows") {
    Criterion criterion("C8", "numerical-conservation");
    int flows_checked = 0;
    long long samples_checked = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const FuzzInstance instance = make_fuzz_instance(seed);
        ScheduleOptions options = instance.options;
        options.record_link_loads = true;
        const RoundSchedule mux =
            schedule_multiplexed(instance.tg, instance.task, options, 0.0);
        const double expected_bits = model_bits(instance.task.model.size_mb);
        for (const PhaseInterval& iv : mux.intervals) {
            if (iv.phase == Phase::train) continue;
            double delivered = 0.0;
            for (const RateSegment& seg : iv.segments)
                delivered += seg.rate_mbps * 1e6 * (seg.end_s - seg.start_s);
            criterion.expect(std::abs(delivered - expected_bits) <= 1e-6 * expected_bits,
                             "flow bits off at fuzz seed " + std::to_string(seed) + " client " +
                                 iv.client_id);
            ++flows_checked;
        }
        for (const LinkLoadSample& sample : mux.link_loads) {
            criterion.expect(sample.rate_sum_mbps <= sample.capacity_mbps + 1e-9,
                             "link overcommitted at fuzz seed " + std::to_string(seed));
            ++samples_checked;
        }
    }
    criterion.note("flows=" + std::to_string(flows_checked) +
                   " link-samples=" + std::to_string(samples_checked));
    CHECK(criterion.finish());
}
