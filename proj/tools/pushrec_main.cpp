// Command-line front end for the push-recovery identification pipeline:
// simulate -> preprocess -> classify/segment -> fit/segment-fit -> stats ->
// plot, with file handoffs between stages so any stage can be swapped out.
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>
#include <vector>

#include "pushrec/fitlaw.hpp"
#include "pushrec/report.hpp"
#include "pushrec/segment.hpp"
#include "pushrec/signal.hpp"
#include "pushrec/simulate.hpp"
#include "pushrec/stats.hpp"
#include "pushrec/svg.hpp"
#include "pushrec/trial_io.hpp"

namespace fs = std::filesystem;
using namespace pushrec;
using report::Json;

namespace {

// ---------------------------------------------------------------- options

struct GlobalOptions {
    fs::path out_dir = ".";
    std::uint32_t seed = 0;
    bool include_abandoned = false;
    double lambda = 0.01;
    std::string law;     // empty -> default sweep
    std::string metric = "linear";
    bool poly_rate_powers = false;  // read (e^n)' as powers of e' instead
};

struct PreprocessOptions {
    double cutoff_hz = 30.0;
    int order = 4;
    bool single_pass = false;
    double pre_lowpass_hz = 0.0;  // optional extra pass, off by default
    bool no_shift = false;
    bool use_recorded = false;  // skip derive_kinematics
    fs::path treadmill;         // one log applied to every trial
};

signal::FilterSpec filter_spec(const PreprocessOptions& pre, double sample_rate_hz) {
    signal::FilterSpec spec;
    spec.order = pre.order;
    spec.cutoff_hz = pre.cutoff_hz;
    spec.sample_rate_hz = sample_rate_hz;
    spec.zero_phase = !pre.single_pass;
    return spec;
}

Json to_json(const GlobalOptions& g, const PreprocessOptions& pre) {
    Json j;
    j["seed"] = g.seed;
    j["include_abandoned"] = g.include_abandoned;
    j["lambda"] = g.lambda;
    j["law"] = g.law.empty() ? "sweep" : g.law;
    j["metric"] = g.metric;
    j["filter"] = {{"cutoff_hz", pre.cutoff_hz},
                   {"order", pre.order},
                   {"zero_phase", !pre.single_pass},
                   {"pre_lowpass_hz", pre.pre_lowpass_hz}};
    j["shift_origin"] = !pre.no_shift;
    j["use_recorded_kinematics"] = pre.use_recorded;
    return j;
}

// ---------------------------------------------------------------- helpers

std::vector<fs::path> list_trial_files(const fs::path& in) {
    std::vector<fs::path> files;
    if (fs::is_regular_file(in)) {
        files.push_back(in);
    } else if (fs::is_directory(in)) {
        for (const auto& entry : fs::directory_iterator(in)) {
            if (!entry.is_regular_file()) continue;
            const fs::path& p = entry.path();
            if (p.extension() != ".csv") continue;
            const std::string stem = p.stem().string();
            if (stem.size() > 10 && stem.ends_with(".treadmill")) continue;
            if (stem == "initial_states" || stem.ends_with("_series")) continue;
            files.push_back(p);
        }
    } else {
        throw Error("input path does not exist: " + in.string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw EmptyGroup("no trial CSV files under " + in.string());
    return files;
}

// Bounded worker pool; results land in index order so output is
// deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

struct TrialOutcome {
    std::string id;
    std::string error;    // empty on success
    std::string skipped;  // reason a trial was deliberately left out
    Json payload;
};

int finish(const std::vector<TrialOutcome>& outcomes) {
    int failures = 0;
    for (const TrialOutcome& o : outcomes)
        if (!o.error.empty()) {
            ++failures;
            std::cerr << o.id << ": " << o.error << "\n";
        }
    return failures == 0 ? 0 : 1;
}

Json failure_json(const std::vector<TrialOutcome>& outcomes) {
    Json arr = Json::array();
    for (const TrialOutcome& o : outcomes)
        if (!o.error.empty()) arr.push_back({{"trial_id", o.id}, {"error", o.error}});
    return arr;
}

Json skipped_json(const std::vector<TrialOutcome>& outcomes) {
    Json arr = Json::array();
    for (const TrialOutcome& o : outcomes)
        if (!o.skipped.empty()) arr.push_back({{"trial_id", o.id}, {"reason", o.skipped}});
    return arr;
}

Trial load_and_preprocess(const fs::path& file, const PreprocessOptions& pre) {
    Trial t = io::load_trial(file);
    // filter/differentiate on the full record first, so no filter edge
    // lands on the push start once the trial is trimmed
    if (pre.use_recorded) {
        if (!t.has_velocity() || !t.has_acceleration())
            throw MissingKinematics(t.id + ": recorded kinematics requested but absent");
    } else {
        const double fs_hz = 1.0 / t.dt();
        t = signal::derive_kinematics(t, filter_spec(pre, fs_hz), pre.pre_lowpass_hz);
    }
    if (!pre.treadmill.empty()) {
        t = signal::trim_to_push(t, io::load_treadmill(pre.treadmill));
    } else {
        const fs::path sidecar = file.parent_path() / (file.stem().string() + ".treadmill.csv");
        if (fs::exists(sidecar)) t = signal::trim_to_push(t, io::load_treadmill(sidecar));
    }
    if (!pre.no_shift) t = signal::shift_origin(t);
    return t;
}

std::vector<fit::ControlLawSpec> law_sweep(const GlobalOptions& g, bool segmented) {
    std::vector<fit::ControlLawSpec> specs;
    const auto add = [&](const std::string& law, fit::ErrorMetric metric) {
        fit::ControlLawSpec s;
        s.terms = fit::terms_from_string(law);
        s.metric = metric;
        s.lambda = g.lambda;
        s.poly_derivative = g.poly_rate_powers ? fit::PolyDerivative::RatePowers
                                               : fit::PolyDerivative::ChainRule;
        specs.push_back(s);
    };
    if (!g.law.empty()) {
        add(g.law, fit::metric_from_string(g.metric));
        return specs;
    }
    if (segmented) {  // the segment stage compares PD against PID
        add("pd", fit::ErrorMetric::Linear);
        add("pid", fit::ErrorMetric::Linear);
        return specs;
    }
    for (const char* law : {"p", "pi", "pd", "pid"}) add(law, fit::ErrorMetric::Linear);
    add("pd", fit::ErrorMetric::Polynomial);
    add("pd", fit::ErrorMetric::Exponential);
    return specs;
}

std::string spec_slug(const fit::ControlLawSpec& spec) {
    return fit::to_string(spec.terms) + "_" + fit::to_string(spec.metric);
}

// ---------------------------------------------------------------- commands

struct SimulateOptions {
    std::string strategy = "all";
    int n = 1;
    double duration = 3.0;
    double dt = 1e-3;
    double mass = 70.0;
    double jitter = 0.10;
};

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& opt) {
    std::vector<StrategyTag> tags;
    if (opt.strategy == "all")
        tags = {StrategyTag::Ankle, StrategyTag::Toe, StrategyTag::ToeToStep, StrategyTag::OneStep,
                StrategyTag::TwoStep};
    else
        tags = {strategy_from_string(opt.strategy)};

    sim::ArchetypeParams params;
    params.duration = opt.duration;
    params.dt = opt.dt;
    params.mass = opt.mass;
    params.jitter = opt.jitter;

    fs::create_directories(g.out_dir);
    for (const StrategyTag tag : tags) {
        for (int i = 0; i < opt.n; ++i) {
            const auto seed = static_cast<std::uint32_t>(g.seed + i);
            const sim::Archetype arch = sim::synth_archetype(tag, seed, params);
            io::save_trial(arch.trial, g.out_dir / (arch.trial.id + ".csv"));
            report::write_json(g.out_dir / (arch.trial.id + ".truth.json"),
                               report::to_json(arch));
        }
    }
    return 0;
}

int cmd_preprocess(const GlobalOptions& g, const PreprocessOptions& pre, const fs::path& in) {
    const auto files = list_trial_files(in);
    fs::create_directories(g.out_dir);
    std::vector<TrialOutcome> outcomes(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        outcomes[i].id = files[i].stem().string();
        try {
            const Trial t = load_and_preprocess(files[i], pre);
            io::save_trial(t, g.out_dir / (t.id + ".csv"));
            outcomes[i].id = t.id;
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });
    return finish(outcomes);
}

int cmd_classify(const GlobalOptions& g, const PreprocessOptions& pre,
                 const seg::ClassifierParams& params, const fs::path& in) {
    const auto files = list_trial_files(in);
    std::vector<TrialOutcome> outcomes(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        outcomes[i].id = files[i].stem().string();
        try {
            const Trial t = load_and_preprocess(files[i], pre);
            if (t.abandoned && !g.include_abandoned) {
                outcomes[i].payload = nullptr;
                return;
            }
            Json j;
            j["trial_id"] = t.id;
            j["strategy"] = to_string(seg::classify_strategy(t, params));
            j["breakpoints"] = Json::array();
            j["labels"] = Json::array();
            outcomes[i].payload = j;
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });

    Json out;
    out["config"] = to_json(g, pre);
    Json arr = Json::array();
    for (const TrialOutcome& o : outcomes)
        if (o.error.empty() && !o.payload.is_null()) arr.push_back(o.payload);
    out["trials"] = arr;
    out["failures"] = failure_json(outcomes);
    fs::create_directories(g.out_dir);
    report::write_json(g.out_dir / "classify.json", out);
    return finish(outcomes);
}

int cmd_segment(const GlobalOptions& g, const PreprocessOptions& pre, const fs::path& in) {
    const auto files = list_trial_files(in);
    std::vector<TrialOutcome> outcomes(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        outcomes[i].id = files[i].stem().string();
        try {
            const Trial t = load_and_preprocess(files[i], pre);
            if (t.abandoned && !g.include_abandoned) {
                outcomes[i].payload = nullptr;
                return;
            }
            const seg::Segmentation s = seg::segment(t);
            outcomes[i].payload = report::to_json(s, t.id);
        } catch (const UnsupportedStrategy& e) {
            outcomes[i].skipped = e.what();  // combined strategies are out of scope
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });

    Json out;
    out["config"] = to_json(g, pre);
    Json arr = Json::array();
    for (const TrialOutcome& o : outcomes)
        if (o.error.empty() && !o.payload.is_null()) arr.push_back(o.payload);
    out["trials"] = arr;
    out["skipped"] = skipped_json(outcomes);
    out["failures"] = failure_json(outcomes);
    fs::create_directories(g.out_dir);
    report::write_json(g.out_dir / "segment.json", out);
    return finish(outcomes);
}

int run_fit(const GlobalOptions& g, const PreprocessOptions& pre, const fs::path& in,
            bool segmented) {
    const auto files = list_trial_files(in);
    const auto specs = law_sweep(g, segmented);
    fs::create_directories(g.out_dir);

    struct FitOutcome {
        TrialOutcome base;
        std::vector<stats::KeyedFit> keyed;  // for the group table
    };
    std::vector<FitOutcome> outcomes(files.size());

    parallel_for(files.size(), [&](std::size_t i) {
        FitOutcome& out = outcomes[i];
        out.base.id = files[i].stem().string();
        try {
            const Trial t = load_and_preprocess(files[i], pre);
            if (t.abandoned && !g.include_abandoned) return;
            out.base.id = t.id;
            const std::string strategy = t.strategy ? to_string(*t.strategy) : "untagged";

            Json reports = Json::array();
            for (const fit::ControlLawSpec& spec : specs) {
                std::vector<fit::FitResult> phases;
                double agg_rms = 0.0, agg_r2 = 0.0;
                if (segmented) {
                    const seg::Segmentation s = seg::segment(t);
                    fit::SegmentFit sf = fit::fit_segments(t, s, spec);
                    phases = std::move(sf.phases);
                    agg_rms = sf.rms;
                    agg_r2 = sf.r2;
                } else {
                    fit::FitResult r = fit::fit_trial(t, spec);
                    agg_rms = r.rms;
                    agg_r2 = r.r2;
                    phases.push_back(std::move(r));
                }
                for (const fit::FitResult& r : phases) {
                    std::string key = strategy;
                    if (segmented) key += "/" + r.label;
                    key += "/" + spec_slug(spec);
                    out.keyed.push_back({key, r});
                }
                reports.push_back(
                    report::fit_report(t.id, spec, phases, agg_rms, agg_r2));
            }
            Json file_json;
            file_json["trial_id"] = t.id;
            file_json["strategy"] = strategy;
            file_json["config"] = to_json(g, pre);
            file_json["fits"] = reports;
            out.base.payload = file_json;
        } catch (const UnsupportedStrategy& e) {
            out.base.skipped = e.what();
        } catch (const NoMilestone& e) {
            // messy trajectories are excluded from segment fitting
            if (segmented)
                out.base.skipped = e.what();
            else
                out.base.error = e.what();
        } catch (const std::exception& e) {
            out.base.error = e.what();
        }
    });

    std::vector<TrialOutcome> bases;
    std::vector<stats::KeyedFit> keyed;
    for (FitOutcome& o : outcomes) {
        if (o.base.error.empty() && !o.base.payload.is_null()) {
            const std::string name =
                std::string(segmented ? "segment_fit_" : "fit_") + o.base.id + ".json";
            report::write_json(g.out_dir / name, o.base.payload);
            keyed.insert(keyed.end(), o.keyed.begin(), o.keyed.end());
        }
        bases.push_back(std::move(o.base));
    }

    Json summary;
    summary["config"] = to_json(g, pre);
    summary["skipped"] = skipped_json(bases);
    summary["failures"] = failure_json(bases);
    if (!keyed.empty()) {
        const auto groups = stats::group_fit_stats(keyed);
        Json garr = Json::array();
        for (const auto& grp : groups) garr.push_back(report::to_json(grp));
        summary["groups"] = garr;
        report::write_text(g.out_dir / (segmented ? "segment_fit_stats.txt" : "fit_stats.txt"),
                           report::group_stats_table(groups));
    } else {
        summary["groups"] = Json::array();
    }
    report::write_json(g.out_dir / (segmented ? "segment_fit_stats.json" : "fit_stats.json"),
                       summary);

    if (keyed.empty()) {
        std::cerr << "no trials were fitted\n";
        return 1;
    }
    return finish(bases);
}

int cmd_stats(const GlobalOptions& g, const PreprocessOptions& pre, const fs::path& in) {
    const auto files = list_trial_files(in);
    std::vector<Trial> trials(files.size());
    std::vector<TrialOutcome> outcomes(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        outcomes[i].id = files[i].stem().string();
        try {
            trials[i] = load_and_preprocess(files[i], pre);
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });

    std::vector<Trial> loaded;
    for (std::size_t i = 0; i < trials.size(); ++i)
        if (outcomes[i].error.empty()) loaded.push_back(std::move(trials[i]));
    if (loaded.empty()) {
        std::cerr << "no usable trials\n";
        return 1;
    }

    const auto cells = stats::selection_stats(loaded, g.include_abandoned);
    Json out;
    out["config"] = to_json(g, pre);
    out["selection"] = report::to_json(cells);
    out["failures"] = failure_json(outcomes);
    fs::create_directories(g.out_dir);
    report::write_json(g.out_dir / "stats.json", out);
    report::write_text(g.out_dir / "stats.txt", report::selection_table(cells));
    return finish(outcomes);
}

// Rebuilds per-phase predictions for one trial from its fit report.
Vector predicted_acceleration(const Trial& t, const Json& fit_entry) {
    fit::ControlLawSpec spec;
    spec.terms = fit::terms_from_string(fit_entry["spec"]["law"].get<std::string>());
    spec.metric = fit::metric_from_string(fit_entry["spec"]["metric"].get<std::string>());
    spec.lambda = fit_entry["spec"]["lambda"].get<double>();
    if (fit_entry["spec"].contains("poly_derivative") &&
        fit_entry["spec"]["poly_derivative"] == "rate_powers")
        spec.poly_derivative = fit::PolyDerivative::RatePowers;
    const ReferenceState ref{fit_entry["reference"]["p_star"].get<double>(),
                             fit_entry["reference"]["v_star"].get<double>()};
    const fit::DesignMatrix full = fit::build_design(t, spec, ref);

    Vector prediction(t.length());
    Index row = 0;
    for (const Json& phase : fit_entry["phases"]) {
        const auto n = phase["n"].get<Index>();
        Vector gains(static_cast<Index>(phase["gains"].size()));
        Index c = 0;
        for (const auto& [name, value] : phase["gains"].items()) {
            (void)name;
            gains(c++) = value.get<double>();
        }
        fit::DesignMatrix block;
        block.X = full.X.middleRows(row, n);
        block.target = full.target.segment(row, n);
        prediction.segment(row, n) = fit::predict(block, gains);
        row += n;
    }
    if (row != t.length())  // fit was made against a different trial length
        throw DimensionMismatch("fit report rows do not cover the trial");
    return prediction;
}

struct PlotOptions {
    fs::path fits;      // directory with fit_/segment_fit_ JSON (default: in)
    std::string which = "pd_linear";  // spec slug to plot
};

int cmd_plot(const GlobalOptions& g, const PreprocessOptions& pre, const PlotOptions& plot,
             const fs::path& in) {
    const auto files = list_trial_files(in);
    const fs::path fit_dir = plot.fits.empty() ? in : plot.fits;
    fs::create_directories(g.out_dir);

    std::vector<TrialOutcome> outcomes(files.size());
    std::vector<Trial> loaded(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        outcomes[i].id = files[i].stem().string();
        try {
            const Trial t = load_and_preprocess(files[i], pre);
            loaded[i] = t;

            // optional fit artifacts: prediction curve and breakpoints
            const Vector* prediction = nullptr;
            Vector storage;
            std::vector<Index> breakpoints;
            for (const char* prefix : {"segment_fit_", "fit_"}) {
                const fs::path fit_file = fit_dir / (prefix + t.id + ".json");
                if (!fs::exists(fit_file)) continue;
                std::ifstream fin(fit_file);
                Json j;
                fin >> j;
                for (const Json& entry : j["fits"]) {
                    const std::string slug =
                        entry["spec"]["law"].get<std::string>() + "_" +
                        entry["spec"]["metric"].get<std::string>();
                    if (slug != plot.which) continue;
                    storage = predicted_acceleration(t, entry);
                    prediction = &storage;
                    Index row = 0;
                    for (const Json& phase : entry["phases"]) {
                        row += phase["n"].get<Index>();
                        if (row < t.length()) breakpoints.push_back(row);
                    }
                    break;
                }
                if (prediction) break;
            }

            for (const auto projection :
                 {svg::Projection::PositionAcceleration, svg::Projection::VelocityAcceleration}) {
                const bool pos = projection == svg::Projection::PositionAcceleration;
                const svg::Figure fig =
                    svg::trajectory_figure(t, projection, prediction, &breakpoints);
                svg::write_figure(fig, g.out_dir /
                                           (t.id + (pos ? "_pos_acc.svg" : "_vel_acc.svg")));
                if (pos) svg::write_series_csv(fig.series,
                                               g.out_dir / (t.id + "_series.csv"));
            }
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });

    std::vector<Trial> plotted;
    for (std::size_t i = 0; i < loaded.size(); ++i)
        if (outcomes[i].error.empty()) plotted.push_back(std::move(loaded[i]));
    if (plotted.empty()) {
        std::cerr << "nothing to plot\n";
        return 1;
    }
    const svg::Figure scatter = svg::scatter_figure(plotted);
    svg::write_figure(scatter, g.out_dir / "initial_states.svg");

    std::vector<svg::Series> scatter_series(1);
    scatter_series[0].name = "initial_states";
    for (const svg::Marker& m : scatter.markers) {
        scatter_series[0].x.push_back(m.x);
        scatter_series[0].y.push_back(m.y);
    }
    svg::write_series_csv(scatter_series, g.out_dir / "initial_states.csv");
    return finish(outcomes);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"push-recovery control-law identification toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");
    // global flags may appear after the subcommand name
    app.fallthrough();

    GlobalOptions g;
    PreprocessOptions pre;
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
    app.add_flag("--include-abandoned", g.include_abandoned,
                 "process trials marked abandoned");
    app.add_option("--lambda", g.lambda, "ridge regularization constant")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--law", g.law, "control law (p, pi, pd, pid); default: full sweep");
    app.add_option("--metric", g.metric, "error metric (linear, polynomial, exponential)")
        ->capture_default_str();
    app.add_flag("--poly-rate-powers", g.poly_rate_powers,
                 "polynomial metric: use powers of the error rate for the D columns");

    const auto add_preprocess_flags = [&](CLI::App* cmd) {
        cmd->add_option("--cutoff-hz", pre.cutoff_hz, "low-pass cutoff")->capture_default_str();
        cmd->add_option("--order", pre.order, "filter order")->capture_default_str();
        cmd->add_flag("--single-pass", pre.single_pass, "forward-only filtering");
        cmd->add_option("--pre-lowpass-hz", pre.pre_lowpass_hz,
                        "extra low-pass before the main filter (0 = off)");
        cmd->add_flag("--no-shift", pre.no_shift, "keep absolute positions");
        cmd->add_flag("--use-recorded", pre.use_recorded,
                      "trust velocity/acceleration columns instead of deriving them");
        cmd->add_option("--treadmill", pre.treadmill, "treadmill log applied to all trials");
    };

    // simulate
    SimulateOptions sim_opt;
    CLI::App* simulate = app.add_subcommand("simulate", "synthesize archetype trials");
    simulate->add_option("--strategy", sim_opt.strategy,
                         "ankle|toe|toe_to_step|one_step|two_step|all")
        ->capture_default_str();
    simulate->add_option("--n", sim_opt.n, "trials per strategy")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--duration", sim_opt.duration, "trial length [s]")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--dt", sim_opt.dt, "integrator step [s]")->check(CLI::PositiveNumber);
    simulate->add_option("--mass", sim_opt.mass, "mass [kg]")->check(CLI::PositiveNumber);
    simulate->add_option("--jitter", sim_opt.jitter, "relative per-seed jitter")
        ->check(CLI::NonNegativeNumber);

    fs::path in;
    CLI::App* preprocess = app.add_subcommand("preprocess", "condition raw trials");
    preprocess->add_option("--in", in, "trial CSV or directory")->required();
    add_preprocess_flags(preprocess);

    seg::ClassifierParams cls;
    CLI::App* classify = app.add_subcommand("classify", "tag strategies from features");
    classify->add_option("--in", in, "trial CSV or directory")->required();
    classify->add_option("--valley-depth", cls.valley_depth, "valley threshold [m/s^2]");
    classify->add_option("--rise-rate", cls.rise_rate, "surge threshold [m/s per s]");
    classify->add_option("--rise-window", cls.rise_window, "surge window [s]");
    add_preprocess_flags(classify);

    CLI::App* segment = app.add_subcommand("segment", "detect motion-primitive milestones");
    segment->add_option("--in", in, "trial CSV or directory")->required();
    add_preprocess_flags(segment);

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit control laws per trial");
    fit_cmd->add_option("--in", in, "trial CSV or directory")->required();
    add_preprocess_flags(fit_cmd);

    CLI::App* segment_fit =
        app.add_subcommand("segment-fit", "fit control laws per motion primitive");
    segment_fit->add_option("--in", in, "trial CSV or directory")->required();
    add_preprocess_flags(segment_fit);

    CLI::App* stats_cmd = app.add_subcommand("stats", "strategy selection statistics");
    stats_cmd->add_option("--in", in, "trial CSV or directory")->required();
    add_preprocess_flags(stats_cmd);

    PlotOptions plot_opt;
    CLI::App* plot = app.add_subcommand("plot", "emit SVG projections and scatter");
    plot->add_option("--in", in, "trial CSV or directory")->required();
    plot->add_option("--fits", plot_opt.fits, "directory with fit reports (default: --in)");
    plot->add_option("--spec", plot_opt.which, "law_metric slug to overlay")
        ->capture_default_str();
    add_preprocess_flags(plot);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(g, sim_opt);
        if (preprocess->parsed()) return cmd_preprocess(g, pre, in);
        if (classify->parsed()) return cmd_classify(g, pre, cls, in);
        if (segment->parsed()) return cmd_segment(g, pre, in);
        if (fit_cmd->parsed()) return run_fit(g, pre, in, false);
        if (segment_fit->parsed()) return run_fit(g, pre, in, true);
        if (stats_cmd->parsed()) return cmd_stats(g, pre, in);
        if (plot->parsed()) return cmd_plot(g, pre, plot_opt, in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
