#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pushrec/fitlaw.hpp"
#include "pushrec/simulate.hpp"
#include "test_support.hpp"

using namespace pushrec;
using fit::ControlLawSpec;
using fit::DesignMatrix;
using fit::ErrorMetric;

namespace {

ControlLawSpec make_spec(const std::string& law, ErrorMetric metric = ErrorMetric::Linear,
                         double lambda = 0.01) {
    ControlLawSpec spec;
    spec.terms = fit::terms_from_string(law);
    spec.metric = metric;
    spec.lambda = lambda;
    return spec;
}

// Independent ridge oracle: w = (X^T X + lambda I)^(-1) X^T y via LDLT on
// the normal equations.
Vector ridge_closed_form(const Eigen::MatrixXd& X, const Vector& y, double lambda) {
    const Eigen::MatrixXd A =
        X.transpose() * X + lambda * Eigen::MatrixXd::Identity(X.cols(), X.cols());
    return A.ldlt().solve(X.transpose() * y);
}

// The duration default gives the slow mode (decay rate >= kd/2 for the
// gains used here) time to die out, so the trial's last sample lands on the
// generator's reference point and refits are exact.
Trial simulate_pd(double kp, double kd, double q0 = 0.2, double v0 = 0.5, double duration = 25.0,
                  double dt = 1e-3) {
    const sim::GainSchedule schedule = {{0.0, {kp, 0.0, kd}, {0.0, 0.0}}};
    return sim::simulate_trial(q0, v0, schedule, duration, dt);
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(fit::terms_from_string(""), InvalidSpec);
    CHECK_THROWS_AS(fit::terms_from_string("px"), InvalidSpec);
    CHECK(fit::to_string(fit::terms_from_string("dp")) == "pd");

    ControlLawSpec bad = make_spec("pid", ErrorMetric::Polynomial);
    CHECK_THROWS_AS(fit::validate(bad), InvalidSpec);
    bad = make_spec("pi", ErrorMetric::Exponential);
    CHECK_THROWS_AS(fit::validate(bad), InvalidSpec);
    bad = make_spec("pd");
    bad.lambda = -1.0;
    CHECK_THROWS_AS(fit::validate(bad), InvalidSpec);
}

TEST_CASE("build_design rows") {
    // e = 1 and e' = 1 at every sample: p = p* - 1, v = v* - 1
    Trial t = testsup::make_trial(5);
    t.position.setConstant(-1.0);
    t.velocity.setConstant(-1.0);
    t.acceleration.setConstant(0.0);
    const ReferenceState ref{0.0, 0.0};

    SUBCASE("polynomial columns at e = e' = 1") {
        const DesignMatrix d = fit::build_design(t, make_spec("pd", ErrorMetric::Polynomial), ref);
        REQUIRE(d.X.cols() == 8);
        for (int c = 0; c < 4; ++c) CHECK(d.X(0, c) == 1.0);   // e^7, e^5, e^3, e
        CHECK(d.X(0, 4) == 7.0);                               // (e^7)' = 7 e^6 e'
        CHECK(d.X(0, 5) == 5.0);
        CHECK(d.X(0, 6) == 3.0);
        CHECK(d.X(0, 7) == 1.0);
    }
    SUBCASE("rate-powers alternative uses plain powers of e'") {
        ControlLawSpec spec = make_spec("pd", ErrorMetric::Polynomial);
        spec.poly_derivative = fit::PolyDerivative::RatePowers;
        Trial t2 = t;
        t2.velocity.setConstant(-2.0);  // e' = 2
        const DesignMatrix d = fit::build_design(t2, spec, ref);
        CHECK(d.X(0, 4) == 128.0);  // 2^7
        CHECK(d.X(0, 7) == 2.0);
    }
    SUBCASE("zero errors zero the P and I columns") {
        Trial z = testsup::make_trial(5);
        z.position.setZero();
        z.velocity.setConstant(-1.0);
        const DesignMatrix d = fit::build_design(z, make_spec("pid"), ReferenceState{0.0, 0.0});
        CHECK(d.X.col(0).isZero(0.0));
        CHECK(d.X.col(1).isZero(0.0));
        CHECK(d.columns == std::vector<std::string>{"Kp", "Ki", "Kd"});
    }
    SUBCASE("exponential at zero errors gives (1, 1)") {
        Trial z = testsup::make_trial(5);
        z.position.setZero();
        z.velocity.setZero();
        const DesignMatrix d =
            fit::build_design(z, make_spec("pd", ErrorMetric::Exponential), ReferenceState{});
        CHECK(d.X(0, 0) == 1.0);
        CHECK(d.X(0, 1) == 1.0);
    }
    SUBCASE("exponential overflow guard") {
        Trial z = testsup::make_trial(5);
        z.position.setConstant(-60.0);
        z.velocity.setZero();
        CHECK_THROWS_AS(
            fit::build_design(z, make_spec("pd", ErrorMetric::Exponential), ReferenceState{}),
            NonFinite);
    }
    SUBCASE("missing kinematics") {
        Trial m = testsup::make_trial(5);
        m.acceleration.resize(0);
        CHECK_THROWS_AS(fit::build_design(m, make_spec("pd"), ref), MissingKinematics);
    }
    SUBCASE("integral column is the running sum including the current sample") {
        Trial z = testsup::make_trial(4);
        z.position << -1.0, -2.0, -3.0, -4.0;  // e = 1, 2, 3, 4
        z.velocity.setZero();
        const DesignMatrix d = fit::build_design(z, make_spec("i"), ReferenceState{}, 10.0);
        CHECK(d.X(0, 0) == 11.0);
        CHECK(d.X(1, 0) == 13.0);
        CHECK(d.X(3, 0) == 20.0);
    }
}

TEST_CASE("ridge_solve") {
    SUBCASE("lambda = 0 on a square invertible system is the exact solve") {
        DesignMatrix d;
        d.X.resize(2, 2);
        d.X << 2.0, 1.0, 1.0, 3.0;
        d.target.resize(2);
        d.target << 5.0, 10.0;
        const Vector w = fit::ridge_solve(d, 0.0);
        CHECK((d.X * w - d.target).norm() < 1e-12);
    }
    SUBCASE("identity design shrinks by 1/(1+lambda)") {
        DesignMatrix d;
        d.X = Eigen::MatrixXd::Identity(2, 2);
        d.target = Vector::Ones(2);
        const Vector w = fit::ridge_solve(d, 0.01);
        CHECK(w(0) == doctest::Approx(1.0 / 1.01).epsilon(1e-12));
        CHECK(w(1) == doctest::Approx(0.990099).epsilon(1e-6));
    }
    SUBCASE("zero target gives zero coefficients") {
        DesignMatrix d;
        d.X = Eigen::MatrixXd::Random(10, 3);
        d.target = Vector::Zero(10);
        CHECK(fit::ridge_solve(d, 0.0).norm() < 1e-14);
        CHECK(fit::ridge_solve(d, 0.5).norm() < 1e-14);
    }
    SUBCASE("rank-deficient with lambda = 0 raises") {
        DesignMatrix d;
        d.X.resize(4, 2);
        d.X.col(0) = Vector::LinSpaced(4, 1.0, 4.0);
        d.X.col(1) = 2.0 * d.X.col(0);
        d.target = Vector::Ones(4);
        CHECK_THROWS_AS(fit::ridge_solve(d, 0.0), SingularSystem);
        CHECK_NOTHROW(fit::ridge_solve(d, 0.01));
    }
}

TEST_CASE("row augmentation matches the closed form on random designs") {
    std::mt19937 gen(42);
    std::uniform_int_distribution<int> nd(10, 200), kd(1, 9);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = nd(gen);
        const int k = std::min(kd(gen), n);
        DesignMatrix d;
        d.X.resize(n, k);
        d.target.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < k; ++c) d.X(i, c) = g(gen);
            d.target(i) = g(gen);
        }
        for (const double lambda : {0.01, 1.0}) {
            const Vector augmented = fit::ridge_solve(d, lambda);
            const Vector closed = ridge_closed_form(d.X, d.target, lambda);
            CHECK((augmented - closed).norm() <= 1e-9 * std::max(1.0, closed.norm()));
        }
    }
}

TEST_CASE("coefficient norm shrinks monotonically in lambda") {
    std::mt19937 gen(5);
    std::normal_distribution<double> g(0.0, 1.0);
    DesignMatrix d;
    d.X.resize(60, 4);
    d.target.resize(60);
    for (int i = 0; i < 60; ++i) {
        for (int c = 0; c < 4; ++c) d.X(i, c) = g(gen);
        d.target(i) = g(gen);
    }
    double prev = fit::ridge_solve(d, 0.0).norm();
    for (const double lambda : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
        const double cur = fit::ridge_solve(d, lambda).norm();
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("fit_trial recovers generator gains") {
    // generator values drawn from observed toe-strategy means
    const Trial t = simulate_pd(8.3515, 2.5100);

    SUBCASE("lambda = 0 recovers exactly") {
        const fit::FitResult r = fit::fit_trial(t, make_spec("pd", ErrorMetric::Linear, 0.0));
        CHECK(r.gains(0) == doctest::Approx(8.3515).epsilon(1e-6));
        CHECK(r.gains(1) == doctest::Approx(2.5100).epsilon(1e-6));
        CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.rms < 1e-9);
        CHECK(r.warnings.empty());
    }
    SUBCASE("lambda = 0.01 shrinks each gain by less than 1%") {
        const fit::FitResult r0 = fit::fit_trial(t, make_spec("pd", ErrorMetric::Linear, 0.0));
        const fit::FitResult r = fit::fit_trial(t, make_spec("pd", ErrorMetric::Linear, 0.01));
        for (Index c = 0; c < 2; ++c) {
            const double rel = std::abs(r.gains(c) - r0.gains(c)) / std::abs(r0.gains(c));
            CHECK(rel < 0.01);
        }
    }
}

TEST_CASE("fit_trial recovers PID gains when sampling matches the integrator") {
    // With dt equal to the output step the fitter's running sum equals the
    // simulator's integral up to the dt factor absorbed into ki. The
    // integral term adds a slow mode (root near -0.14/s), hence the long
    // settling window.
    const double kp = 6.0, ki = 0.8, kd = 3.0, dt = 0.01;
    const sim::GainSchedule schedule = {{0.0, {kp, ki, kd}, {0.0, 0.0}}};
    const Trial t = sim::simulate_trial(0.15, 0.4, schedule, 160.0, dt);
    const fit::FitResult r = fit::fit_trial(t, make_spec("pid", ErrorMetric::Linear, 0.0));
    CHECK(r.gains(0) == doctest::Approx(kp).epsilon(1e-6));
    CHECK(r.gains(1) == doctest::Approx(ki * dt).epsilon(1e-6));
    CHECK(r.gains(2) == doctest::Approx(kd).epsilon(1e-6));
}

TEST_CASE("predict") {
    DesignMatrix d;
    d.X.resize(3, 2);
    d.X << 0.05, -0.2, 0.1, 0.0, 0.0, 0.3;
    d.target = Vector::Zero(3);

    SUBCASE("zero coefficients") {
        CHECK(fit::predict(d, Vector::Zero(2)).isZero(0.0));
    }
    SUBCASE("hand arithmetic") {
        Vector w(2);
        w << 8.0, 3.0;
        const Vector f = fit::predict(d, w);
        CHECK(f(0) == doctest::Approx(8.0 * 0.05 + 3.0 * (-0.2)).epsilon(1e-12));
        CHECK(f(0) == doctest::Approx(-0.2).epsilon(1e-12));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(fit::predict(d, Vector::Zero(3)), DimensionMismatch);
    }
    SUBCASE("an exact fit interpolates consistent data") {
        Vector w(2);
        w << 2.0, -1.0;
        DesignMatrix c = d;
        c.target = c.X * w;
        const Vector coeffs = fit::ridge_solve(c, 0.0);
        CHECK((fit::predict(c, coeffs) - c.target).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("rms_error") {
    Vector f(2), y(2);
    f << 1.0, 2.0;
    y << 0.0, 0.0;
    CHECK(fit::rms_error(f, f) == 0.0);
    CHECK(fit::rms_error(f, y) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK(fit::rms_error(f, y) == doctest::Approx(1.58114).epsilon(1e-5));
    const Vector shifted = y.array() + 0.7;
    CHECK(fit::rms_error(shifted, y) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK_THROWS_AS(fit::rms_error(f, Vector::Zero(3)), LengthMismatch);
    CHECK_THROWS_AS(fit::rms_error(Vector(), Vector()), EmptyInput);
}

TEST_CASE("r_squared") {
    Vector y(4);
    y << 1.0, 2.0, 3.0, 4.0;
    CHECK(fit::r_squared(y, y) == doctest::Approx(1.0).epsilon(1e-12));
    const Vector mean_pred = Vector::Constant(4, y.mean());
    CHECK(fit::r_squared(mean_pred, y) == doctest::Approx(0.0).epsilon(1e-12));

    Vector a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    CHECK(fit::r_squared(a, b) == doctest::Approx(-3.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit::r_squared(Vector::Zero(3), Vector::Constant(3, 2.0)), DegenerateTarget);
}

TEST_CASE("no bias column: pure-offset targets cannot be absorbed") {
    Trial t = testsup::make_trial(50);
    t.position.setZero();
    t.velocity.setZero();
    t.acceleration.setConstant(1.5);  // offset with zero error inputs
    const ReferenceState ref{0.0, 0.0};
    const DesignMatrix d = fit::build_design(t, make_spec("pd"), ref);
    CHECK(d.X.isZero(0.0));
    const Vector w = fit::ridge_solve(d, 0.01);
    CHECK(w.isZero(1e-14));
    CHECK_THROWS_AS(fit::r_squared(fit::predict(d, w), d.target), DegenerateTarget);
}

TEST_CASE("fit_segments") {
    const Trial t = simulate_pd(9.0, 4.0, 0.15, 0.45, 3.0);

    SUBCASE("single phase equals fit_trial") {
        seg::Segmentation s;
        s.strategy = StrategyTag::Ankle;
        s.breakpoints = {};
        s.labels = {"full"};
        const auto spec = make_spec("pd");
        const fit::FitResult whole = fit::fit_trial(t, spec);
        const fit::SegmentFit single = fit::fit_segments(t, s, spec);
        REQUIRE(single.phases.size() == 1);
        CHECK(single.phases[0].gains.isApprox(whole.gains, 0.0));
        CHECK(single.rms == doctest::Approx(whole.rms).epsilon(1e-12));
        CHECK(single.r2 == doctest::Approx(whole.r2).epsilon(1e-12));
    }

    SUBCASE("two-phase generator recovery (one-step observed gains)") {
        const sim::GainSchedule schedule = {{0.0, {13.51, 0.0, 5.30}, {0.0, 0.0}},
                                            {0.8, {7.55, 0.0, 4.43}, {0.0, 0.0}}};
        const Trial two = sim::simulate_trial(0.06, 0.45, schedule, 20.0);
        seg::Segmentation s;
        s.strategy = StrategyTag::OneStep;
        s.breakpoints = {80};
        s.labels = {"step", "lean_after_step"};
        const fit::SegmentFit fits = fit::fit_segments(two, s, make_spec("pd", ErrorMetric::Linear, 0.0));
        CHECK(fits.phases[0].gains(0) == doctest::Approx(13.51).epsilon(0.01));
        CHECK(fits.phases[0].gains(1) == doctest::Approx(5.30).epsilon(0.01));
        CHECK(fits.phases[1].gains(0) == doctest::Approx(7.55).epsilon(0.01));
        CHECK(fits.phases[1].gains(1) == doctest::Approx(4.43).epsilon(0.01));
        CHECK(fits.r2 > 0.999);
    }

    SUBCASE("aggregate formulas") {
        // phases of sizes (30, 70) with rms (0.1, 0.2):
        // sqrt((30*0.01 + 70*0.04)/100) = 0.17607
        const double agg = std::sqrt((30 * 0.01 + 70 * 0.04) / 100.0);
        CHECK(agg == doctest::Approx(0.17607).epsilon(1e-4));
    }

    SUBCASE("integral running sum is inherited across phases") {
        const double kp = 6.0, ki = 0.9, kd = 3.0, dt = 0.01;
        const sim::GainSchedule schedule = {{0.0, {kp, ki, kd}, {0.0, 0.0}}};
        const Trial pid = sim::simulate_trial(0.15, 0.4, schedule, 160.0, dt);
        seg::Segmentation s;
        s.strategy = StrategyTag::OneStep;
        s.breakpoints = {1000};  // split while the transient is still active
        s.labels = {"step", "lean_after_step"};
        const fit::SegmentFit fits = fit::fit_segments(pid, s, make_spec("pid", ErrorMetric::Linear, 0.0));
        // phase 2 only recovers the generator if its integral column starts
        // from phase 1's accumulated error; a reset would bias kp by >10%
        CHECK(fits.phases[1].gains(0) == doctest::Approx(kp).epsilon(1e-4));
        CHECK(fits.phases[1].gains(1) == doctest::Approx(ki * dt).epsilon(1e-4));
        CHECK(fits.phases[1].gains(2) == doctest::Approx(kd).epsilon(1e-4));
    }

    SUBCASE("phase shorter than the column count raises") {
        seg::Segmentation s;
        s.strategy = StrategyTag::OneStep;
        s.breakpoints = {1};
        s.labels = {"step", "lean_after_step"};
        CHECK_THROWS_AS(fit::fit_segments(t, s, make_spec("pd")), PhaseTooShort);
    }
}

TEST_CASE("segment aggregate equals the direct whole-trial formula") {
    const Trial t = simulate_pd(10.0, 3.0, 0.12, 0.5, 3.0);
    seg::Segmentation s;
    s.strategy = StrategyTag::Toe;
    s.breakpoints = {60, 170};
    s.labels = {"lift_to_tiptoe", "drop_to_sole", "lean_recover"};
    const auto spec = make_spec("p", ErrorMetric::Linear, 0.01);  // deliberately misspecified
    const fit::SegmentFit fits = fit::fit_segments(t, s, spec);

    // reassemble the per-phase predictions and apply the rms definition
    const ReferenceState ref = reference_state(t);
    const DesignMatrix full = fit::build_design(t, spec, ref);
    Vector concat(t.length());
    Index row = 0;
    std::vector<Index> bounds = {0, 60, 170, t.length()};
    for (std::size_t p = 0; p < fits.phases.size(); ++p) {
        const Index count = bounds[p + 1] - bounds[p];
        DesignMatrix block;
        block.X = full.X.middleRows(bounds[p], count);
        block.target = full.target.segment(bounds[p], count);
        concat.segment(row, count) = fit::predict(block, fits.phases[p].gains);
        row += count;
    }
    const double direct = fit::rms_error(concat, full.target);
    CHECK(std::abs(direct - fits.rms) < 1e-12);
}

TEST_CASE("polynomial metric degenerates to the linear law on linear data") {
    const Trial t = simulate_pd(8.0, 3.5, 0.15, 0.4);  // |e| <= 0.3
    CHECK(t.position.cwiseAbs().maxCoeff() <= 0.3);

    const fit::FitResult linear = fit::fit_trial(t, make_spec("pd"));
    const fit::FitResult poly = fit::fit_trial(t, make_spec("pd", ErrorMetric::Polynomial));

    const auto coeff = [&](const fit::FitResult& r, const std::string& name) {
        for (std::size_t c = 0; c < r.columns.size(); ++c)
            if (r.columns[c] == name) return r.gains(static_cast<Index>(c));
        REQUIRE(false);
        return 0.0;
    };
    CHECK(std::abs(coeff(poly, "Kp_e7")) < 1e-2);
    CHECK(std::abs(coeff(poly, "Kp_e5")) < 1e-2);
    CHECK(std::abs(coeff(poly, "Kd_e7")) < 1e-2);
    CHECK(std::abs(coeff(poly, "Kd_e5")) < 1e-2);
    CHECK(coeff(poly, "Kp_e1") == doctest::Approx(8.0).epsilon(0.02));
    CHECK(coeff(poly, "Kd_e1") == doctest::Approx(3.5).epsilon(0.02));
    CHECK(std::abs(poly.r2 - linear.r2) < 0.005);
}

TEST_CASE("exponential metric scores below the linear baseline") {
    const Trial t = simulate_pd(8.0, 3.5, 0.15, 0.4);
    const fit::FitResult linear = fit::fit_trial(t, make_spec("pd"));
    const fit::FitResult expo = fit::fit_trial(t, make_spec("pd", ErrorMetric::Exponential));
    CHECK(expo.r2 < linear.r2);
}

TEST_CASE("negative fitted gains are flagged") {
    Trial t = testsup::make_trial(50);
    for (Index i = 0; i < t.length(); ++i) t.position(i) = 0.1 * std::sin(0.3 * i);
    t.position.array() -= t.position(t.length() - 1);  // p* = 0
    t.velocity.setZero();
    t.acceleration = 2.0 * t.position;  // a = -2 (p* - p): destabilizing sign
    const fit::FitResult r = fit::fit_trial(t, make_spec("p", ErrorMetric::Linear, 0.0));
    CHECK(r.gains(0) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(!r.warnings.empty());
}
