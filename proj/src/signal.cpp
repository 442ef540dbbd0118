#include "pushrec/signal.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace pushrec::signal {

namespace {

// One second-order (or first-order) section in direct form II transposed.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;  // numerator
    double a1 = 0.0, a2 = 0.0;            // denominator (a0 normalized to 1)
};

// Bilinear-transformed Butterworth low-pass as a cascade of sections.
// wc = tan(pi * fc / fs) prewarps the cutoff.
std::vector<Biquad> design_butterworth(int order, double cutoff_hz, double sample_rate_hz) {
    const double wc = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    std::vector<Biquad> sections;
    sections.reserve(static_cast<std::size_t>((order + 1) / 2));
    for (int k = 0; k < order / 2; ++k) {
        // Analog pair: s^2 + 2 sin(phi) wc s + wc^2, phi spread over the
        // Butterworth circle.
        const double alpha = 2.0 * std::sin(std::numbers::pi * (2 * k + 1) / (2.0 * order));
        const double d = 1.0 + alpha * wc + wc * wc;
        Biquad s;
        s.b0 = wc * wc / d;
        s.b1 = 2.0 * s.b0;
        s.b2 = s.b0;
        s.a1 = 2.0 * (wc * wc - 1.0) / d;
        s.a2 = (1.0 - alpha * wc + wc * wc) / d;
        sections.push_back(s);
    }
    if (order % 2 == 1) {
        const double d = 1.0 + wc;
        Biquad s;
        s.b0 = wc / d;
        s.b1 = s.b0;
        s.a1 = (wc - 1.0) / d;
        sections.push_back(s);
    }
    return sections;
}

// Runs the cascade over x. Each section is warm-started at the DC steady
// state for x[0], which keeps constant inputs exactly constant.
Vector run_cascade(const std::vector<Biquad>& sections, Vector x) {
    for (const Biquad& s : sections) {
        const double c = x(0);
        double z2 = (s.b2 - s.a2) * c;
        double z1 = (s.b1 - s.a1) * c + z2;
        for (Index i = 0; i < x.size(); ++i) {
            const double in = x(i);
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            x(i) = out;
        }
    }
    return x;
}

// Odd reflection: extends x by `pad` samples mirrored through each endpoint.
Vector reflect_pad(const Eigen::Ref<const Vector>& x, Index pad) {
    const Index n = x.size();
    Vector ext(n + 2 * pad);
    for (Index i = 0; i < pad; ++i) ext(i) = 2.0 * x(0) - x(pad - i);
    ext.segment(pad, n) = x;
    for (Index i = 0; i < pad; ++i) ext(pad + n + i) = 2.0 * x(n - 1) - x(n - 2 - i);
    return ext;
}

}  // namespace

void validate(const FilterSpec& spec) {
    if (spec.order < 1) throw InvalidSpec("filter order must be >= 1");
    if (!(spec.sample_rate_hz > 0.0)) throw InvalidSpec("sample rate must be positive");
    if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= spec.sample_rate_hz / 2.0)
        throw InvalidSpec("cutoff must lie in (0, Nyquist)");
}

Vector butterworth_lowpass(const Eigen::Ref<const Vector>& x, const FilterSpec& spec) {
    validate(spec);
    if (x.size() < 3 * static_cast<Index>(spec.order))
        throw TooShort("need at least 3x order samples to filter");

    const auto sections = design_butterworth(spec.order, spec.cutoff_hz, spec.sample_rate_hz);
    const Index pad = 3 * static_cast<Index>(spec.order);

    Vector ext = run_cascade(sections, reflect_pad(x, pad));
    if (spec.zero_phase) {
        ext.reverseInPlace();
        ext = run_cascade(sections, std::move(ext));
        ext.reverseInPlace();
    }
    return ext.segment(pad, x.size());
}

Vector differentiate(const Eigen::Ref<const Vector>& x, double dt) {
    const Index n = x.size();
    if (n < 3) throw TooShort("need at least 3 samples to differentiate");
    if (!(dt > 0.0)) throw InvalidSpec("dt must be positive");

    Vector d(n);
    d(0) = (-3.0 * x(0) + 4.0 * x(1) - x(2)) / (2.0 * dt);
    d.segment(1, n - 2) = (x.tail(n - 2) - x.head(n - 2)) / (2.0 * dt);
    d(n - 1) = (3.0 * x(n - 1) - 4.0 * x(n - 2) + x(n - 3)) / (2.0 * dt);
    return d;
}

Trial derive_kinematics(const Trial& trial, const FilterSpec& spec, double extra_cutoff_hz) {
    validate(trial);
    Trial out = trial;
    if (extra_cutoff_hz > 0.0) {
        FilterSpec extra = spec;
        extra.cutoff_hz = extra_cutoff_hz;
        out.position = butterworth_lowpass(out.position, extra);
    }
    out.position = butterworth_lowpass(out.position, spec);
    out.velocity = differentiate(out.position, trial.dt());
    out.acceleration = differentiate(out.velocity, trial.dt());
    return out;
}

Trial trim_to_push(const Trial& trial, const TreadmillLog& log, double speed_epsilon) {
    validate(trial);
    validate(log);

    bool was_moving = false;
    double stop_time = 0.0;
    bool found = false;
    for (Index i = 0; i < log.speed.size(); ++i) {
        if (log.speed(i) > speed_epsilon) {
            was_moving = true;
        } else if (was_moving) {
            stop_time = log.time(i);
            found = true;
            break;
        }
    }
    if (!found) throw NoStopDetected("treadmill speed never falls to zero after moving");

    Index start = -1;
    for (Index i = 0; i < trial.length(); ++i) {
        if (trial.time(i) >= stop_time - 1e-12) {
            start = i;
            break;
        }
    }
    if (start < 0 || trial.length() - start < 3)
        throw EmptyResult("treadmill stop leaves no usable trial data");
    return manual_trim(trial, start, trial.length());
}

Trial shift_origin(const Trial& trial) {
    validate(trial);
    Trial out = trial;
    if (!out.pre_shift_start) out.pre_shift_start = trial.position(0);
    out.position.array() -= trial.position(0);
    out.position(0) = 0.0;
    return out;
}

Trial manual_trim(const Trial& trial, Index start, Index end) {
    if (start < 0 || end > trial.length() || start >= end)
        throw IndexOutOfRange("trim range [" + std::to_string(start) + ", " +
                              std::to_string(end) + ") invalid for length " +
                              std::to_string(trial.length()));
    Trial out = trial;
    const Index n = end - start;
    out.time = trial.time.segment(start, n);
    out.position = trial.position.segment(start, n);
    if (trial.has_velocity()) out.velocity = trial.velocity.segment(start, n);
    if (trial.has_acceleration()) out.acceleration = trial.acceleration.segment(start, n);
    validate(out);  // rejects sub-trials shorter than 3 samples
    return out;
}

}  // namespace pushrec::signal
