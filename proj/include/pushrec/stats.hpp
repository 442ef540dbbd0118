#pragma once

#include <string>
#include <vector>

#include "pushrec/fitlaw.hpp"
#include "pushrec/trial.hpp"

namespace pushrec::stats {

double mean(const std::vector<double>& xs);
// Mean absolute deviation about the mean.
double mean_abs_dev(const std::vector<double>& xs);
// Even cardinality averages the two central values.
double median(std::vector<double> xs);
// Median absolute deviation about the median.
double median_abs_dev(const std::vector<double>& xs);

// Per-group location/dispersion of fitted gains and metrics.
struct GroupStats {
    std::string key;
    std::vector<std::string> params;  // gain columns, then "rms", "r2"
    std::vector<double> means;
    std::vector<double> mads;
    int n_trials = 0;
};

struct KeyedFit {
    std::string key;  // e.g. strategy or strategy+phase
    fit::FitResult result;
};

// Groups must be nonempty and carry identical column sets (MixedSpec
// otherwise). Output is sorted by key.
std::vector<GroupStats> group_fit_stats(const std::vector<KeyedFit>& results);

// First sample of (position, velocity). After shift_origin the position
// component is 0; selection statistics use the retained pre-shift start.
std::pair<double, double> initial_state(const Trial& trial);

// Band between v = slope*p - half_width and v = slope*p + half_width in the
// initial-state plane; non-stepping recovery is predicted inside it.
struct StableRegion {
    double slope = -3.0;      // 1/s
    double half_width = 0.3;  // m/s
};

// Boundary inclusive.
bool in_stable_region(double p, double v, const StableRegion& region = {});

enum class Cohort { All, Informed, Random };
std::string to_string(Cohort cohort);

struct SelectionCell {
    StrategyTag strategy;
    Cohort cohort;
    double median_p = 0.0;
    double median_v = 0.0;
    double mad_p = 0.0;
    double mad_v = 0.0;
    int n_trials = 0;
};

// Componentwise medians and median absolute deviations of the initial CoM
// state, per strategy and cohort. Abandoned trials are skipped unless
// include_abandoned; empty cohorts yield no cell.
std::vector<SelectionCell> selection_stats(const std::vector<Trial>& trials,
                                           bool include_abandoned = false);

}  // namespace pushrec::stats
