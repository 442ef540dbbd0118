#include "pushrec/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace pushrec::report {

namespace {

std::string fixed4(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

void append_row(std::string& out, const std::vector<std::string>& cells,
                const std::vector<std::size_t>& widths) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out += cells[i];
        if (i + 1 < cells.size())
            out.append(widths[i] + 2 > cells[i].size() ? widths[i] + 2 - cells[i].size() : 2, ' ');
    }
    out += '\n';
}

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows) append_row(out, row, widths);
    return out;
}

}  // namespace

Json to_json(const fit::ControlLawSpec& spec) {
    Json j;
    j["law"] = fit::to_string(spec.terms);
    j["metric"] = fit::to_string(spec.metric);
    j["lambda"] = spec.lambda;
    if (spec.metric == fit::ErrorMetric::Polynomial)
        j["poly_derivative"] =
            spec.poly_derivative == fit::PolyDerivative::ChainRule ? "chain_rule" : "rate_powers";
    return j;
}

Json to_json(const fit::FitResult& result) {
    Json gains;
    for (std::size_t c = 0; c < result.columns.size(); ++c)
        gains[result.columns[c]] = result.gains(static_cast<Index>(c));
    Json j;
    j["label"] = result.label;
    j["gains"] = gains;
    j["rms"] = result.rms;
    j["r2"] = result.r2;
    j["n"] = result.n_samples;
    return j;
}

Json to_json(const seg::Segmentation& segmentation, const std::string& trial_id) {
    Json j;
    j["trial_id"] = trial_id;
    j["strategy"] = to_string(segmentation.strategy);
    j["breakpoints"] = segmentation.breakpoints;
    j["labels"] = segmentation.labels;
    return j;
}

Json to_json(const sim::GainSchedule& schedule) {
    Json arr = Json::array();
    for (const sim::SchedulePhase& p : schedule) {
        Json j;
        j["switch_time"] = p.switch_time;
        j["kp_over_m"] = p.gains.kp_over_m;
        j["ki_over_m"] = p.gains.ki_over_m;
        j["kd_over_m"] = p.gains.kd_over_m;
        j["p_star"] = p.reference.p_star;
        j["v_star"] = p.reference.v_star;
        arr.push_back(j);
    }
    return arr;
}

Json to_json(const std::vector<sim::Impulse>& impulses) {
    Json arr = Json::array();
    for (const sim::Impulse& imp : impulses) {
        Json j;
        j["time"] = imp.time;
        j["dv"] = imp.dv;
        arr.push_back(j);
    }
    return arr;
}

Json to_json(const sim::Archetype& archetype) {
    Json j;
    j["trial_id"] = archetype.trial.id;
    j["strategy"] = archetype.trial.strategy ? to_string(*archetype.trial.strategy) : "";
    j["start_mode"] = to_string(archetype.trial.start_mode);
    j["breakpoints"] = archetype.breakpoints;
    j["schedule"] = to_json(archetype.schedule);
    j["impulses"] = to_json(archetype.impulses);
    return j;
}

Json fit_report(const std::string& trial_id, const fit::ControlLawSpec& spec,
                const std::vector<fit::FitResult>& phases, double aggregate_rms,
                double aggregate_r2) {
    Json j;
    j["trial_id"] = trial_id;
    j["spec"] = to_json(spec);
    if (!phases.empty()) {
        j["reference"] = {{"p_star", phases.front().reference.p_star},
                          {"v_star", phases.front().reference.v_star}};
    }
    Json arr = Json::array();
    std::vector<std::string> warnings;
    for (const fit::FitResult& r : phases) {
        arr.push_back(to_json(r));
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    }
    j["phases"] = arr;
    j["aggregate"] = {{"rms", aggregate_rms}, {"r2", aggregate_r2}};
    j["warnings"] = warnings;
    return j;
}

Json to_json(const stats::GroupStats& g) {
    Json params;
    for (std::size_t i = 0; i < g.params.size(); ++i)
        params[g.params[i]] = {{"mean", g.means[i]}, {"mad", g.mads[i]}};
    Json j;
    j["group"] = g.key;
    j["n_trials"] = g.n_trials;
    j["params"] = params;
    return j;
}

Json to_json(const std::vector<stats::SelectionCell>& cells) {
    Json arr = Json::array();
    for (const stats::SelectionCell& c : cells) {
        Json j;
        j["strategy"] = to_string(c.strategy);
        j["cohort"] = to_string(c.cohort);
        j["median"] = {c.median_p, c.median_v};
        j["mad_median"] = {c.mad_p, c.mad_v};
        j["median_in_stable_region"] = stats::in_stable_region(c.median_p, c.median_v);
        j["n_trials"] = c.n_trials;
        arr.push_back(j);
    }
    return arr;
}

std::string group_stats_table(const std::vector<stats::GroupStats>& groups) {
    std::string out;
    for (const stats::GroupStats& g : groups) {
        out += "group: " + g.key + "  (n=" + std::to_string(g.n_trials) + ")\n";
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"parameter", "mean", "mad"});
        for (std::size_t i = 0; i < g.params.size(); ++i)
            rows.push_back({g.params[i], fixed4(g.means[i]), fixed4(g.mads[i])});
        out += render_table(rows);
        out += '\n';
    }
    return out;
}

std::string selection_table(const std::vector<stats::SelectionCell>& cells) {
    std::string out = "strategy selection statistics (medians / median absolute deviations)\n";
    for (const stats::Cohort cohort :
         {stats::Cohort::All, stats::Cohort::Informed, stats::Cohort::Random}) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"strategy", "median (m, m/s)", "mad (m, m/s)", "n"});
        bool any = false;
        for (const stats::SelectionCell& c : cells) {
            if (c.cohort != cohort) continue;
            any = true;
            rows.push_back({to_string(c.strategy),
                            fixed4(c.median_p) + ", " + fixed4(c.median_v),
                            fixed4(c.mad_p) + ", " + fixed4(c.mad_v),
                            std::to_string(c.n_trials)});
        }
        if (!any) continue;
        out += "\ncohort: " + to_string(cohort) + "\n" + render_table(rows);
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

void write_json(const std::filesystem::path& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

}  // namespace pushrec::report
