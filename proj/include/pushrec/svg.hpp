#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pushrec/segment.hpp"
#include "pushrec/stats.hpp"
#include "pushrec/trial.hpp"

namespace pushrec::svg {

// Minimal deterministic SVG plotting: fixed canvas, data-space mapping,
// polylines, markers and reference lines. Elements carry CSS classes so
// generated plots are machine-checkable.

struct Series {
    std::string name;
    std::string css_class;  // "observed" | "fitted" | ...
    std::vector<double> x;
    std::vector<double> y;
};

struct Marker {
    double x = 0.0;
    double y = 0.0;
    std::string css_class;  // "breakpoint" | scatter classes
};

// Straight line in data coordinates, clipped to the plot range.
struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    std::string css_class;  // "boundary"
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<Marker> markers;
    std::vector<Line> lines;
    // extra (x, y) points the data window must cover, e.g. so reference
    // lines stay visible
    std::vector<std::pair<double, double>> bound_hints;
};

void write_figure(const Figure& figure, const std::filesystem::path& path);

// Sibling CSV carrying every plotted series for external tooling.
void write_series_csv(const std::vector<Series>& series, const std::filesystem::path& path);

// Position-acceleration or velocity-acceleration projection with the
// observed trajectory, an optional prediction curve and breakpoint markers.
enum class Projection { PositionAcceleration, VelocityAcceleration };
Figure trajectory_figure(const Trial& trial, Projection projection,
                         const Vector* predicted_acceleration = nullptr,
                         const std::vector<Index>* breakpoints = nullptr);

// Initial-state scatter with the stable-region boundary lines.
Figure scatter_figure(const std::vector<Trial>& trials, const stats::StableRegion& region = {});

}  // namespace pushrec::svg
