#include "pushrec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace pushrec::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

struct Bounds {
    double xmin = std::numeric_limits<double>::max();
    double xmax = std::numeric_limits<double>::lowest();
    double ymin = std::numeric_limits<double>::max();
    double ymax = std::numeric_limits<double>::lowest();

    void include(double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    void pad() {
        const double dx = xmax - xmin;
        const double dy = ymax - ymin;
        const double px = dx > 0.0 ? 0.05 * dx : 1.0;
        const double py = dy > 0.0 ? 0.05 * dy : 1.0;
        xmin -= px;
        xmax += px;
        ymin -= py;
        ymax += py;
    }
};

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

class Mapper {
  public:
    explicit Mapper(const Bounds& b) : b_(b) {}
    double x(double v) const {
        return kMargin + (v - b_.xmin) / (b_.xmax - b_.xmin) * (kWidth - 2 * kMargin);
    }
    double y(double v) const {
        return kHeight - kMargin - (v - b_.ymin) / (b_.ymax - b_.ymin) * (kHeight - 2 * kMargin);
    }

  private:
    Bounds b_;
};

constexpr const char* kStyle =
    ".observed{fill:none;stroke:#1f77b4;stroke-width:1.5}"
    ".fitted{fill:none;stroke:#d62728;stroke-width:1.5;stroke-dasharray:5 3}"
    ".breakpoint{fill:#000;stroke:#fff;stroke-width:1}"
    ".boundary{stroke:#555;stroke-width:1;stroke-dasharray:6 4}"
    ".axis{stroke:#000;stroke-width:1}"
    ".label{font:12px sans-serif;fill:#000}"
    ".scatter-ankle{fill:#1f77b4}.scatter-toe{fill:#2ca02c}"
    ".scatter-toe_to_step{fill:#ff7f0e}.scatter-one_step{fill:#d62728}"
    ".scatter-two_step{fill:#9467bd}";

}  // namespace

void write_figure(const Figure& figure, const std::filesystem::path& path) {
    bool has_data = !figure.markers.empty();
    for (const Series& s : figure.series) has_data = has_data || !s.x.empty();
    if (!has_data) throw EmptyInput("nothing to plot for '" + figure.title + "'");

    Bounds b;
    for (const Series& s : figure.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) b.include(s.x[i], s.y[i]);
    for (const Marker& m : figure.markers) b.include(m.x, m.y);
    for (const auto& [hx, hy] : figure.bound_hints) b.include(hx, hy);
    b.pad();
    const Mapper map(b);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<style>" << kStyle << "</style>\n";
    out << "<rect x=\"" << px(kMargin) << "\" y=\"" << px(kMargin) << "\" width=\""
        << px(kWidth - 2 * kMargin) << "\" height=\"" << px(kHeight - 2 * kMargin)
        << "\" fill=\"none\" class=\"axis\"/>\n";
    out << "<text class=\"label\" x=\"" << px(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\">"
        << figure.title << "</text>\n";
    out << "<text class=\"label\" x=\"" << px(kWidth / 2) << "\" y=\"" << px(kHeight - 12)
        << "\" text-anchor=\"middle\">" << figure.x_label << "</text>\n";
    out << "<text class=\"label\" transform=\"translate(16," << px(kHeight / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << figure.y_label << "</text>\n";
    // range annotations
    out << "<text class=\"label\" x=\"" << px(kMargin) << "\" y=\"" << px(kHeight - kMargin + 16)
        << "\">" << num(b.xmin) << "</text>\n";
    out << "<text class=\"label\" x=\"" << px(kWidth - kMargin) << "\" y=\""
        << px(kHeight - kMargin + 16) << "\" text-anchor=\"end\">" << num(b.xmax) << "</text>\n";
    out << "<text class=\"label\" x=\"" << px(kMargin - 4) << "\" y=\"" << px(kHeight - kMargin)
        << "\" text-anchor=\"end\">" << num(b.ymin) << "</text>\n";
    out << "<text class=\"label\" x=\"" << px(kMargin - 4) << "\" y=\"" << px(kMargin + 4)
        << "\" text-anchor=\"end\">" << num(b.ymax) << "</text>\n";

    for (const Line& line : figure.lines) {
        // clip y = slope x + intercept to the padded data window
        double x0 = b.xmin, x1 = b.xmax;
        if (line.slope != 0.0) {
            const double t0 = (b.ymin - line.intercept) / line.slope;
            const double t1 = (b.ymax - line.intercept) / line.slope;
            x0 = std::max(b.xmin, std::min(t0, t1));
            x1 = std::min(b.xmax, std::max(t0, t1));
            if (x0 >= x1) continue;
        }
        const double y0 = line.slope * x0 + line.intercept;
        const double y1 = line.slope * x1 + line.intercept;
        out << "<line class=\"" << line.css_class << "\" x1=\"" << px(map.x(x0)) << "\" y1=\""
            << px(map.y(y0)) << "\" x2=\"" << px(map.x(x1)) << "\" y2=\"" << px(map.y(y1))
            << "\"/>\n";
    }

    for (const Series& s : figure.series) {
        if (s.x.empty()) continue;
        out << "<polyline class=\"" << s.css_class << "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << px(map.x(s.x[i])) << ',' << px(map.y(s.y[i]));
        }
        out << "\"/>\n";
    }

    for (const Marker& m : figure.markers)
        out << "<circle class=\"" << m.css_class << "\" cx=\"" << px(map.x(m.x)) << "\" cy=\""
            << px(map.y(m.y)) << "\" r=\"4\"/>\n";

    out << "</svg>\n";
}

void write_series_csv(const std::vector<Series>& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "series,x,y\n";
    char buf[96];
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", s.name.c_str(), s.x[i], s.y[i]);
            out << buf;
        }
}

Figure trajectory_figure(const Trial& trial, Projection projection,
                         const Vector* predicted_acceleration,
                         const std::vector<Index>* breakpoints) {
    if (!trial.has_velocity() || !trial.has_acceleration())
        throw MissingKinematics("plotting needs derived kinematics");

    const bool pos = projection == Projection::PositionAcceleration;
    const Vector& xs = pos ? trial.position : trial.velocity;

    Figure fig;
    fig.title = trial.id + (pos ? " position-acceleration" : " velocity-acceleration");
    fig.x_label = pos ? "position [m]" : "velocity [m/s]";
    fig.y_label = "acceleration [m/s^2]";

    Series observed;
    observed.name = pos ? "observed_pos_acc" : "observed_vel_acc";
    observed.css_class = "observed";
    for (Index i = 0; i < trial.length(); ++i) {
        observed.x.push_back(xs(i));
        observed.y.push_back(trial.acceleration(i));
    }
    fig.series.push_back(std::move(observed));

    if (predicted_acceleration && predicted_acceleration->size() == trial.length()) {
        Series fitted;
        fitted.name = pos ? "fitted_pos_acc" : "fitted_vel_acc";
        fitted.css_class = "fitted";
        for (Index i = 0; i < trial.length(); ++i) {
            fitted.x.push_back(xs(i));
            fitted.y.push_back((*predicted_acceleration)(i));
        }
        fig.series.push_back(std::move(fitted));
    }

    if (breakpoints) {
        for (const Index b : *breakpoints) {
            if (b < 0 || b >= trial.length()) continue;
            fig.markers.push_back(Marker{xs(b), trial.acceleration(b), "breakpoint"});
        }
    }
    return fig;
}

Figure scatter_figure(const std::vector<Trial>& trials, const stats::StableRegion& region) {
    Figure fig;
    fig.title = "initial CoM states";
    fig.x_label = "initial position [m]";
    fig.y_label = "initial velocity [m/s]";
    for (const Trial& t : trials) {
        const auto [p_now, v0] = stats::initial_state(t);
        const double p0 = t.pre_shift_start.value_or(p_now);
        const std::string cls =
            t.strategy ? "scatter-" + to_string(*t.strategy) : "scatter-untagged";
        fig.markers.push_back(Marker{p0, v0, cls});
    }
    fig.lines.push_back(Line{region.slope, region.half_width, "boundary"});
    fig.lines.push_back(Line{region.slope, -region.half_width, "boundary"});
    // keep both band edges inside the data window
    double pmin = 0.0, pmax = 0.0;
    for (const Marker& m : fig.markers) {
        pmin = std::min(pmin, m.x);
        pmax = std::max(pmax, m.x);
    }
    for (const double p : {pmin, pmax}) {
        fig.bound_hints.emplace_back(p, region.slope * p + region.half_width);
        fig.bound_hints.emplace_back(p, region.slope * p - region.half_width);
    }
    return fig;
}

}  // namespace pushrec::svg
