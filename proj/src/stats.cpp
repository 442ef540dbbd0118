#include "pushrec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pushrec::stats {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw EmptyInput("mean of empty set");
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double mean_abs_dev(const std::vector<double>& xs) {
    const double m = mean(xs);
    double sum = 0.0;
    for (const double x : xs) sum += std::abs(x - m);
    return sum / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw EmptyInput("median of empty set");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double median_abs_dev(const std::vector<double>& xs) {
    const double m = median(std::vector<double>(xs));
    std::vector<double> dev;
    dev.reserve(xs.size());
    for (const double x : xs) dev.push_back(std::abs(x - m));
    return median(std::move(dev));
}

std::vector<GroupStats> group_fit_stats(const std::vector<KeyedFit>& results) {
    if (results.empty()) throw EmptyGroup("no fit results to aggregate");

    std::map<std::string, std::vector<const fit::FitResult*>> groups;
    for (const KeyedFit& kf : results) groups[kf.key].push_back(&kf.result);

    std::vector<GroupStats> out;
    for (const auto& [key, members] : groups) {
        const auto& columns = members.front()->columns;
        for (const fit::FitResult* r : members)
            if (r->columns != columns)
                throw MixedSpec("group '" + key + "' mixes control-law specs");

        GroupStats g;
        g.key = key;
        g.n_trials = static_cast<int>(members.size());
        g.params = columns;
        g.params.emplace_back("rms");
        g.params.emplace_back("r2");
        for (std::size_t p = 0; p < g.params.size(); ++p) {
            std::vector<double> values;
            values.reserve(members.size());
            for (const fit::FitResult* r : members) {
                if (p < columns.size())
                    values.push_back(r->gains(static_cast<Index>(p)));
                else
                    values.push_back(g.params[p] == "rms" ? r->rms : r->r2);
            }
            g.means.push_back(mean(values));
            g.mads.push_back(mean_abs_dev(values));
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::pair<double, double> initial_state(const Trial& trial) {
    if (trial.position.size() == 0 || !trial.has_velocity())
        throw MissingKinematics("initial state needs position and velocity");
    return {trial.position(0), trial.velocity(0)};
}

bool in_stable_region(double p, double v, const StableRegion& region) {
    const double center = region.slope * p;
    return v >= center - region.half_width && v <= center + region.half_width;
}

std::string to_string(Cohort cohort) {
    switch (cohort) {
        case Cohort::All: return "all";
        case Cohort::Informed: return "informed";
        case Cohort::Random: return "random";
    }
    return "all";
}

std::vector<SelectionCell> selection_stats(const std::vector<Trial>& trials,
                                           bool include_abandoned) {
    struct Key {
        StrategyTag strategy;
        Cohort cohort;
        bool operator<(const Key& o) const {
            return strategy != o.strategy ? strategy < o.strategy : cohort < o.cohort;
        }
    };
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> cells;

    for (const Trial& t : trials) {
        if (t.abandoned && !include_abandoned) continue;
        if (!t.strategy) continue;
        const auto [p_now, v0] = initial_state(t);
        // Fig-4.7-style spread needs the start position before any origin
        // shift zeroed it.
        const double p0 = t.pre_shift_start.value_or(p_now);
        const std::vector<Cohort> cohorts = {
            Cohort::All,
            t.start_mode == StartMode::Informed ? Cohort::Informed : Cohort::Random};
        for (const Cohort c : cohorts) {
            if (c != Cohort::All && t.start_mode == StartMode::Unknown) continue;
            auto& [ps, vs] = cells[Key{*t.strategy, c}];
            ps.push_back(p0);
            vs.push_back(v0);
        }
    }

    std::vector<SelectionCell> out;
    for (const auto& [key, data] : cells) {
        SelectionCell cell;
        cell.strategy = key.strategy;
        cell.cohort = key.cohort;
        cell.median_p = median(std::vector<double>(data.first));
        cell.median_v = median(std::vector<double>(data.second));
        cell.mad_p = median_abs_dev(data.first);
        cell.mad_v = median_abs_dev(data.second);
        cell.n_trials = static_cast<int>(data.first.size());
        out.push_back(cell);
    }
    return out;
}

}  // namespace pushrec::stats
