#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedsched/geometry.hpp"
#include "fedsched/temporal_graph.hpp"

namespace fedsched {

struct SatelliteElement {
    std::string id;
    double altitude_km = 550.0;
    double inclination_deg = 53.0;
    int plane_index = 0;
    int slot_index = 0;
    double raan_deg = 0.0;
    double phase_deg = 0.0; // argument of latitude at epoch 0
};

enum class SiteRole { server, client };

struct GroundSite {
    std::string id; // node identifier; lower-case name
    std::string name;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    SiteRole role = SiteRole::client;
};

enum class IslPattern { grid_plus };

/// Which satellite-to-ground links enter a snapshot: every visible pair, or
/// only the highest-elevation satellite per site (single-terminal model).
enum class GroundAttachment { all_visible, best_visible };

struct BandwidthDist {
    double min_mbps = 10.0;
    double max_mbps = 30.0;
};

struct ConstellationConfig {
    int num_satellites = 1000;
    int num_planes = 25;
    double altitude_km = 550.0;
    double inclination_deg = 53.0;
    IslPattern isl_pattern = IslPattern::grid_plus;
    double elevation_mask_deg = 25.0;
    BandwidthDist bandwidth_dist{};
    std::uint64_t rng_seed = 1;
    GroundAttachment ground_attachment = GroundAttachment::all_visible;
};

/// Throws BadInput when a field violates its documented range.
void validate_config(const ConstellationConfig& config);
void validate_sites(std::span<const GroundSite> sites);
void validate_elements(std::span<const SatelliteElement> elements);

/// Walker-delta shell: num_planes planes of num_satellites/num_planes slots,
/// RAAN spread over 360 degrees, phasing factor 1.
std::vector<SatelliteElement> walker_shell(const ConstellationConfig& config);

/// Circular-orbit positions at epoch_s, Earth-fixed frame.
std::vector<std::pair<std::string, Vec3>> propagate(std::span<const SatelliteElement> elements,
                                                    double epoch_s);

/// True iff the satellite stands at or above the site's elevation mask.
bool visible(const Vec3& sat_ecef_km, const GroundSite& site, double elevation_mask_deg);

/// Geometry-only connectivity of one window: which edges exist and how long
/// they are. Independent of the bandwidth seed, so sweeps can reuse it.
struct ConnEdge {
    std::int32_t u = 0;
    std::int32_t v = 0;
    double distance_km = 0.0;
};

struct WindowConnectivity {
    int window_index = 0;
    double window_start_s = 0.0;
    double window_length_s = 0.0;
    std::vector<ConnEdge> edges;
};

NodeTablePtr constellation_node_table(std::span<const SatelliteElement> elements,
                                      std::span<const GroundSite> sites);

WindowConnectivity build_connectivity(const ConstellationConfig& config,
                                      std::span<const SatelliteElement> elements,
                                      std::span<const GroundSite> sites,
                                      const NodeTable& nodes,
                                      int window_index, double window_length_s);

/// Draw per-edge bandwidths with the keyed generator. The stream depends only
/// on (seed, window_index, edge endpoints), never on construction order.
SnapshotGraph assign_bandwidths(const WindowConnectivity& connectivity, const NodeTablePtr& nodes,
                                const BandwidthDist& dist, std::uint64_t seed);

SnapshotGraph build_snapshot(const ConstellationConfig& config,
                             std::span<const SatelliteElement> elements,
                             std::span<const GroundSite> sites,
                             int window_index, double window_length_s);

} // namespace fedsched
