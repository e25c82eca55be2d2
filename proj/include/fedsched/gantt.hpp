#pragma once

#include <string>

#include "fedsched/serialize.hpp"

namespace fedsched {

/// Deterministic SVG 1.1 Gantt chart: one lane per client (sorted by id),
/// one bar per phase, a time axis and a makespan marker.
std::string render_gantt_svg(const GanttView& view);

} // namespace fedsched
