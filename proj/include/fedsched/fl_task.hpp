#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fedsched {

struct ModelSpec {
    std::string name;
    double size_mb = 0.0;         // 1 MB = 10^6 bytes
    double training_time_s = 0.0; // baseline local training duration
};

struct ClientSpec {
    std::string client_id;
    std::string site_id;               // ground-site node the client sits on
    double training_multiplier = 1.0;  // scales the model's baseline training time
};

struct FLTask {
    std::string server_site;
    std::vector<ClientSpec> clients; // ordered, distinct ids, none on the server site
    ModelSpec model;
};

/// The five evaluation models, ascending by size.
const std::vector<ModelSpec>& model_catalog();

/// Catalog lookup by name; nullptr when unknown.
const ModelSpec* find_model(std::string_view name);

/// Seconds to push size_mb over a path with the given bottleneck.
/// 1 MB = 8x10^6 bits, 1 Mbps = 10^6 bits/s. Throws BadInput on
/// non-positive bandwidth or negative size.
double transmission_time_s(double size_mb, double bottleneck_mbps);

/// Model payload in bits.
inline double model_bits(double size_mb) { return size_mb * 8.0e6; }

/// Effective training time of one client; throws BadInput on unknown id.
double training_time_s(const FLTask& task, std::string_view client_id);

void validate_task(const FLTask& task);

} // namespace fedsched
