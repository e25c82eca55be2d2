#include "fedsched/gantt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace fedsched {

namespace {

constexpr double canvas_width = 900.0;
constexpr double margin_left = 140.0;
constexpr double margin_right = 30.0;
constexpr double margin_top = 50.0;
constexpr double margin_bottom = 46.0;
constexpr double lane_height = 24.0;
constexpr double lane_gap = 10.0;

/// Largest 1/2/5 x 10^k step that yields at most ~7 ticks.
double nice_step(double span) {
    if (span <= 0.0) return 1.0;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double mult : {1.0, 2.0, 5.0}) {
        if (raw <= mult * mag) return mult * mag;
    }
    return 10.0 * mag;
}

} // namespace

std::string render_gantt_svg(const GanttView& view) {
    std::vector<std::string> clients;
    for (const GanttIntervalView& iv : view.intervals)
        if (std::find(clients.begin(), clients.end(), iv.client_id) == clients.end())
            clients.push_back(iv.client_id);
    std::sort(clients.begin(), clients.end());
    std::map<std::string, std::size_t> lane_of;
    for (std::size_t i = 0; i < clients.size(); ++i) lane_of[clients[i]] = i;

    const double span = std::max(view.makespan_s, 1e-9);
    const double plot_w = canvas_width - margin_left - margin_right;
    const double scale = plot_w / span;
    const double height =
        margin_top + clients.size() * (lane_height + lane_gap) - lane_gap + margin_bottom;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << format_double(canvas_width) << "\" height=\"" << format_double(height)
        << "\" viewBox=\"0 0 " << format_double(canvas_width) << ' ' << format_double(height)
        << "\">\n";
    svg << "<style>\n"
           ".distribute{fill:#4c8eda;}\n"
           ".train{fill:#e0a430;}\n"
           ".upload{fill:#58a866;}\n"
           ".axis{stroke:#333333;stroke-width:1;}\n"
           ".grid{stroke:#cccccc;stroke-width:0.5;}\n"
           ".marker{stroke:#c0392b;stroke-width:1;stroke-dasharray:4 3;}\n"
           "text{font-family:monospace;font-size:12px;fill:#222222;}\n"
           "</style>\n";
    svg << "<text x=\"" << format_double(margin_left) << "\" y=\"20\">" << view.policy
        << " schedule, makespan " << format_double(view.makespan_s) << " s</text>\n";

    // Legend.
    const char* legend_classes[3] = {"distribute", "train", "upload"};
    double legend_x = margin_left;
    for (const char* cls : legend_classes) {
        svg << "<rect class=\"" << cls << "\" x=\"" << format_double(legend_x)
            << "\" y=\"28\" width=\"12\" height=\"12\"/>\n";
        svg << "<text x=\"" << format_double(legend_x + 16.0) << "\" y=\"38\">" << cls
            << "</text>\n";
        legend_x += 130.0;
    }

    const double axis_y = height - margin_bottom + 6.0;
    const double step = nice_step(span);
    for (double tick = 0.0; tick <= span + 1e-9; tick += step) {
        const double x = margin_left + tick * scale;
        svg << "<line class=\"grid\" x1=\"" << format_double(x) << "\" y1=\""
            << format_double(margin_top) << "\" x2=\"" << format_double(x) << "\" y2=\""
            << format_double(axis_y - 6.0) << "\"/>\n";
        svg << "<text x=\"" << format_double(x) << "\" y=\"" << format_double(axis_y + 14.0)
            << "\" text-anchor=\"middle\">" << format_double(tick) << "</text>\n";
    }
    svg << "<line class=\"axis\" x1=\"" << format_double(margin_left) << "\" y1=\""
        << format_double(axis_y - 6.0) << "\" x2=\"" << format_double(margin_left + plot_w)
        << "\" y2=\"" << format_double(axis_y - 6.0) << "\"/>\n";

    for (std::size_t i = 0; i < clients.size(); ++i) {
        const double y = margin_top + i * (lane_height + lane_gap);
        svg << "<text x=\"8\" y=\"" << format_double(y + lane_height - 8.0) << "\">" << clients[i]
            << "</text>\n";
    }

    // Bars, in (client, phase) order.
    std::vector<GanttIntervalView> sorted = view.intervals;
    std::sort(sorted.begin(), sorted.end(),
              [](const GanttIntervalView& a, const GanttIntervalView& b) {
                  return std::tie(a.client_id, a.phase) < std::tie(b.client_id, b.phase);
              });
    for (const GanttIntervalView& iv : sorted) {
        const double y = margin_top + lane_of[iv.client_id] * (lane_height + lane_gap);
        const double x = margin_left + (iv.start_s - view.round_start_s) * scale;
        const double w = (iv.end_s - iv.start_s) * scale;
        svg << "<rect class=\"" << phase_name(iv.phase) << "\" x=\"" << format_double(x)
            << "\" y=\"" << format_double(y) << "\" width=\"" << format_double(w)
            << "\" height=\"" << format_double(lane_height) << "\"/>\n";
    }

    const double marker_x = margin_left + span * scale;
    svg << "<line class=\"marker\" x1=\"" << format_double(marker_x) << "\" y1=\""
        << format_double(margin_top) << "\" x2=\"" << format_double(marker_x) << "\" y2=\""
        << format_double(axis_y - 6.0) << "\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace fedsched
