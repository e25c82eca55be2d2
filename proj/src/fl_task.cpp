#include "fedsched/fl_task.hpp"

#include <algorithm>
#include <set>

#include "fedsched/errors.hpp"

namespace fedsched {

const std::vector<ModelSpec>& model_catalog() {
    static const std::vector<ModelSpec> catalog = {
        {"LeNet-5", 0.3, 25.0},
        {"MobileNetV2", 13.4, 180.0},
        {"EfficientNet-B0", 20.3, 300.0},
        {"ResNet-18", 44.7, 480.0},
        {"ResNet-34", 83.6, 950.0},
    };
    return catalog;
}

const ModelSpec* find_model(std::string_view name) {
    for (const ModelSpec& m : model_catalog())
        if (m.name == name) return &m;
    return nullptr;
}

double transmission_time_s(double size_mb, double bottleneck_mbps) {
    if (bottleneck_mbps <= 0.0) throw BadInputError("transmission over non-positive bandwidth");
    if (size_mb < 0.0) throw BadInputError("negative model size");
    return size_mb * 8.0 / bottleneck_mbps;
}

double training_time_s(const FLTask& task, std::string_view client_id) {
    for (const ClientSpec& c : task.clients)
        if (c.client_id == client_id) return task.model.training_time_s * c.training_multiplier;
    throw BadInputError("unknown client id: " + std::string(client_id));
}

void validate_task(const FLTask& task) {
    if (task.server_site.empty()) throw BadInputError("task: missing server site");
    if (task.clients.empty()) throw BadInputError("task: client list is empty");
    if (task.model.size_mb <= 0.0) throw BadInputError("task: model size must be positive");
    if (task.model.training_time_s <= 0.0)
        throw BadInputError("task: training time must be positive");
    std::set<std::string> ids;
    for (const ClientSpec& c : task.clients) {
        if (!ids.insert(c.client_id).second)
            throw BadInputError("task: duplicate client id " + c.client_id);
        if (c.site_id == task.server_site)
            throw BadInputError("task: client " + c.client_id + " sits on the server site");
        if (c.training_multiplier < 0.0)
            throw BadInputError("task: negative training multiplier for " + c.client_id);
    }
}

} // namespace fedsched
