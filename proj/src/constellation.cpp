#include "fedsched/constellation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "fedsched/errors.hpp"
#include "fedsched/rng.hpp"

namespace fedsched {

namespace {

std::string satellite_id(int plane, int slot) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sat-%03d-%03d", plane, slot);
    return buf;
}

std::uint64_t edge_draw_key(std::uint64_t seed, int window_index, const std::string& id_a,
                            const std::string& id_b) {
    // Canonical endpoint order keeps the draw independent of construction order.
    const std::string& lo = id_a < id_b ? id_a : id_b;
    const std::string& hi = id_a < id_b ? id_b : id_a;
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(window_index));
    h = hash_combine(h, fnv1a64(lo));
    h = hash_combine(h, fnv1a64(hi));
    return h;
}

} // namespace

void validate_config(const ConstellationConfig& config) {
    if (config.num_satellites <= 0) throw BadInputError("constellation: num_satellites must be positive");
    if (config.num_planes <= 0) throw BadInputError("constellation: num_planes must be positive");
    if (config.num_satellites % config.num_planes != 0)
        throw BadInputError("constellation: num_satellites must be divisible by num_planes");
    if (config.altitude_km < 300.0 || config.altitude_km > 2000.0)
        throw BadInputError("constellation: altitude_km outside the LEO band [300, 2000]");
    if (config.inclination_deg < 0.0 || config.inclination_deg > 180.0)
        throw BadInputError("constellation: inclination_deg outside [0, 180]");
    if (config.bandwidth_dist.min_mbps <= 0.0 ||
        config.bandwidth_dist.min_mbps > config.bandwidth_dist.max_mbps)
        throw BadInputError("constellation: need 0 < min_mbps <= max_mbps");
}

void validate_sites(std::span<const GroundSite> sites) {
    int servers = 0;
    std::set<std::string> ids;
    for (const GroundSite& s : sites) {
        if (s.id.empty()) throw BadInputError("site with empty id");
        if (!ids.insert(s.id).second) throw BadInputError("duplicate site id: " + s.id);
        if (s.latitude_deg < -90.0 || s.latitude_deg > 90.0)
            throw BadInputError("site " + s.id + ": latitude outside [-90, 90]");
        if (s.longitude_deg < -180.0 || s.longitude_deg > 180.0)
            throw BadInputError("site " + s.id + ": longitude outside [-180, 180]");
        if (s.role == SiteRole::server) ++servers;
    }
    if (!sites.empty() && servers != 1)
        throw BadInputError("scenario must name exactly one server site, found " +
                            std::to_string(servers));
}

void validate_elements(std::span<const SatelliteElement> elements) {
    std::set<std::pair<int, int>> seen;
    for (const SatelliteElement& e : elements) {
        if (e.altitude_km < 300.0 || e.altitude_km > 2000.0)
            throw BadInputError("satellite " + e.id + ": altitude outside [300, 2000] km");
        if (e.inclination_deg < 0.0 || e.inclination_deg > 180.0)
            throw BadInputError("satellite " + e.id + ": inclination outside [0, 180]");
        if (e.raan_deg < 0.0 || e.raan_deg >= 360.0 || e.phase_deg < 0.0 || e.phase_deg >= 360.0)
            throw BadInputError("satellite " + e.id + ": raan/phase outside [0, 360)");
        if (!seen.insert({e.plane_index, e.slot_index}).second)
            throw BadInputError("satellite " + e.id + ": duplicate (plane, slot)");
    }
}

std::vector<SatelliteElement> walker_shell(const ConstellationConfig& config) {
    validate_config(config);
    const int planes = config.num_planes;
    const int slots = config.num_satellites / config.num_planes;
    const double phasing_deg = 360.0 / static_cast<double>(config.num_satellites); // F = 1

    std::vector<SatelliteElement> elements;
    elements.reserve(static_cast<std::size_t>(config.num_satellites));
    for (int p = 0; p < planes; ++p) {
        for (int s = 0; s < slots; ++s) {
            SatelliteElement e;
            e.id = satellite_id(p, s);
            e.altitude_km = config.altitude_km;
            e.inclination_deg = config.inclination_deg;
            e.plane_index = p;
            e.slot_index = s;
            e.raan_deg = 360.0 * p / planes;
            double phase = 360.0 * s / slots + phasing_deg * p;
            if (phase >= 360.0) phase -= 360.0;
            e.phase_deg = phase;
            elements.push_back(std::move(e));
        }
    }
    return elements;
}

std::vector<std::pair<std::string, Vec3>> propagate(std::span<const SatelliteElement> elements,
                                                    double epoch_s) {
    if (epoch_s < 0.0) throw BadInputError("propagate: negative epoch");
    std::vector<std::pair<std::string, Vec3>> positions;
    positions.reserve(elements.size());
    for (const SatelliteElement& e : elements) {
        const double a = earth_radius_km + e.altitude_km;
        positions.emplace_back(
            e.id, orbital_position_ecef_km(a, e.inclination_deg, e.raan_deg, e.phase_deg, epoch_s));
    }
    return positions;
}

bool visible(const Vec3& sat_ecef_km, const GroundSite& site, double elevation_mask_deg) {
    const Vec3 site_pos = site_ecef_km(site.latitude_deg, site.longitude_deg);
    return elevation_deg(sat_ecef_km, site_pos) >= elevation_mask_deg;
}

NodeTablePtr constellation_node_table(std::span<const SatelliteElement> elements,
                                      std::span<const GroundSite> sites) {
    std::vector<NodeInfo> nodes;
    nodes.reserve(elements.size() + sites.size());
    for (const SatelliteElement& e : elements)
        nodes.push_back({e.id, NodeKind::satellite, e.id});
    for (const GroundSite& s : sites) nodes.push_back({s.id, NodeKind::site, s.name});
    return make_node_table(std::move(nodes));
}

WindowConnectivity build_connectivity(const ConstellationConfig& config,
                                      std::span<const SatelliteElement> elements,
                                      std::span<const GroundSite> sites,
                                      const NodeTable& nodes,
                                      int window_index, double window_length_s) {
    if (window_index < 0) throw BadInputError("build_connectivity: negative window index");
    const double epoch = window_index * window_length_s;

    std::map<std::string, std::int32_t> index_of;
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(nodes.size()); ++i)
        index_of[nodes[i].id] = i;

    std::vector<Vec3> position(nodes.size());
    std::map<std::pair<int, int>, std::int32_t> by_plane_slot;
    for (const SatelliteElement& e : elements) {
        const double a = earth_radius_km + e.altitude_km;
        const std::int32_t idx = index_of.at(e.id);
        position[idx] = orbital_position_ecef_km(a, e.inclination_deg, e.raan_deg, e.phase_deg, epoch);
        by_plane_slot[{e.plane_index, e.slot_index}] = idx;
    }
    std::vector<std::int32_t> site_index;
    for (const GroundSite& s : sites) {
        const std::int32_t idx = index_of.at(s.id);
        position[idx] = site_ecef_km(s.latitude_deg, s.longitude_deg);
        site_index.push_back(idx);
    }

    WindowConnectivity conn;
    conn.window_index = window_index;
    conn.window_start_s = epoch;
    conn.window_length_s = window_length_s;

    std::set<std::pair<std::int32_t, std::int32_t>> pairs;
    auto add_edge = [&](std::int32_t a, std::int32_t b) {
        if (a == b) return;
        const auto key = std::minmax(a, b);
        if (!pairs.insert(key).second) return;
        conn.edges.push_back({key.first, key.second, (position[a] - position[b]).norm()});
    };

    // Grid-plus ISLs: ring neighbor within the plane, same slot in the next
    // plane (with wrap), kept only when the chord clears the Earth's limb.
    const int planes = config.num_planes;
    const int slots = config.num_satellites / config.num_planes;
    for (const SatelliteElement& e : elements) {
        const std::int32_t self = by_plane_slot.at({e.plane_index, e.slot_index});
        const auto intra = by_plane_slot.find({e.plane_index, (e.slot_index + 1) % slots});
        if (intra != by_plane_slot.end() &&
            line_of_sight(position[self], position[intra->second]))
            add_edge(self, intra->second);
        const auto inter = by_plane_slot.find({(e.plane_index + 1) % planes, e.slot_index});
        if (inter != by_plane_slot.end() &&
            line_of_sight(position[self], position[inter->second]))
            add_edge(self, inter->second);
    }

    // Ground links.
    for (std::size_t s = 0; s < sites.size(); ++s) {
        const std::int32_t sidx = site_index[s];
        const Vec3& spos = position[sidx];
        if (config.ground_attachment == GroundAttachment::best_visible) {
            std::int32_t best = -1;
            double best_el = -90.0;
            for (const SatelliteElement& e : elements) {
                const std::int32_t idx = index_of.at(e.id);
                const double el = elevation_deg(position[idx], spos);
                if (el >= config.elevation_mask_deg &&
                    (el > best_el || (el == best_el && (best < 0 || idx < best)))) {
                    best = idx;
                    best_el = el;
                }
            }
            if (best >= 0) add_edge(sidx, best);
        } else {
            for (const SatelliteElement& e : elements) {
                const std::int32_t idx = index_of.at(e.id);
                if (elevation_deg(position[idx], spos) >= config.elevation_mask_deg)
                    add_edge(sidx, idx);
            }
        }
    }

    std::sort(conn.edges.begin(), conn.edges.end(), [](const ConnEdge& a, const ConnEdge& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    return conn;
}

SnapshotGraph assign_bandwidths(const WindowConnectivity& connectivity, const NodeTablePtr& nodes,
                                const BandwidthDist& dist, std::uint64_t seed) {
    SnapshotGraph snapshot;
    snapshot.window_index = connectivity.window_index;
    snapshot.window_start_s = connectivity.window_start_s;
    snapshot.window_length_s = connectivity.window_length_s;
    snapshot.nodes = nodes;
    snapshot.edges.reserve(connectivity.edges.size());
    for (const ConnEdge& e : connectivity.edges) {
        const std::uint64_t key =
            edge_draw_key(seed, connectivity.window_index, (*nodes)[e.u].id, (*nodes)[e.v].id);
        const double bw =
            dist.min_mbps + unit_double(key) * (dist.max_mbps - dist.min_mbps);
        const double delay_ms = e.distance_km / light_speed_km_s * 1000.0;
        snapshot.edges.push_back({e.u, e.v, bw, delay_ms});
    }
    return snapshot;
}

SnapshotGraph build_snapshot(const ConstellationConfig& config,
                             std::span<const SatelliteElement> elements,
                             std::span<const GroundSite> sites,
                             int window_index, double window_length_s) {
    validate_config(config);
    validate_sites(sites);
    const NodeTablePtr nodes = constellation_node_table(elements, sites);
    const WindowConnectivity conn =
        build_connectivity(config, elements, sites, *nodes, window_index, window_length_s);
    return assign_bandwidths(conn, nodes, config.bandwidth_dist, config.rng_seed);
}

} // namespace fedsched
