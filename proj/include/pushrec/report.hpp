#pragma once

#include <json.hpp>

#include "pushrec/fitlaw.hpp"
#include "pushrec/segment.hpp"
#include "pushrec/simulate.hpp"
#include "pushrec/stats.hpp"

namespace pushrec::report {

// All report emitters use ordered_json so repeated runs are byte-identical.
using Json = nlohmann::ordered_json;

Json to_json(const fit::ControlLawSpec& spec);
Json to_json(const fit::FitResult& result);
Json to_json(const seg::Segmentation& segmentation, const std::string& trial_id);
Json to_json(const sim::GainSchedule& schedule);
Json to_json(const std::vector<sim::Impulse>& impulses);
Json to_json(const sim::Archetype& archetype);

// {trial_id, spec, reference, phases, aggregate, warnings}
Json fit_report(const std::string& trial_id, const fit::ControlLawSpec& spec,
                const std::vector<fit::FitResult>& phases, double aggregate_rms,
                double aggregate_r2);

Json to_json(const stats::GroupStats& g);
Json to_json(const std::vector<stats::SelectionCell>& cells);

// Aligned plain-text tables mirroring the JSON content.
std::string group_stats_table(const std::vector<stats::GroupStats>& groups);
std::string selection_table(const std::vector<stats::SelectionCell>& cells);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace pushrec::report
