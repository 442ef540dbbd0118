#include "pushrec/fitlaw.hpp"

#include <Eigen/QR>
#include <cmath>

namespace pushrec::fit {

namespace {

int column_count(const ControlLawSpec& spec) {
    switch (spec.metric) {
        case ErrorMetric::Linear:
            return (spec.terms.p ? 1 : 0) + (spec.terms.i ? 1 : 0) + (spec.terms.d ? 1 : 0);
        case ErrorMetric::Polynomial:
            return 4 * ((spec.terms.p ? 1 : 0) + (spec.terms.d ? 1 : 0));
        case ErrorMetric::Exponential:
            return (spec.terms.p ? 1 : 0) + (spec.terms.d ? 1 : 0);
    }
    return 0;
}

void check_negative_gains(FitResult& result) {
    for (Index c = 0; c < result.gains.size(); ++c)
        if (result.gains(c) < 0.0)
            result.warnings.push_back("negative gain " + result.columns[c] + " = " +
                                      std::to_string(result.gains(c)));
}

FitResult fit_rows(const DesignMatrix& full, Index row_begin, Index row_count,
                   const ControlLawSpec& spec, const ReferenceState& reference,
                   const std::string& label) {
    if (row_count < static_cast<Index>(full.columns.size()))
        throw PhaseTooShort("phase '" + label + "' has " + std::to_string(row_count) +
                            " samples for " + std::to_string(full.columns.size()) + " columns");
    DesignMatrix block;
    block.X = full.X.middleRows(row_begin, row_count);
    block.target = full.target.segment(row_begin, row_count);
    block.columns = full.columns;

    FitResult result;
    result.label = label;
    result.columns = block.columns;
    result.gains = ridge_solve(block, spec.lambda);
    const Vector predicted = predict(block, result.gains);
    result.rms = rms_error(predicted, block.target);
    result.r2 = r_squared(predicted, block.target);
    result.n_samples = row_count;
    result.reference = reference;
    check_negative_gains(result);
    return result;
}

}  // namespace

void validate(const ControlLawSpec& spec) {
    if (!spec.terms.p && !spec.terms.i && !spec.terms.d)
        throw InvalidSpec("control law needs at least one of P, I, D");
    if (spec.metric != ErrorMetric::Linear && spec.terms.i)
        throw InvalidSpec("polynomial/exponential metrics are defined for P and D terms only");
    if (!std::isfinite(spec.lambda) || spec.lambda < 0.0)
        throw InvalidSpec("lambda must be finite and >= 0");
}

Terms terms_from_string(const std::string& law) {
    Terms t;
    for (const char c : law) {
        switch (c) {
            case 'p': case 'P': t.p = true; break;
            case 'i': case 'I': t.i = true; break;
            case 'd': case 'D': t.d = true; break;
            default: throw InvalidSpec("unknown control law '" + law + "'");
        }
    }
    if (!t.p && !t.i && !t.d) throw InvalidSpec("empty control law");
    return t;
}

std::string to_string(const Terms& terms) {
    std::string s;
    if (terms.p) s += 'p';
    if (terms.i) s += 'i';
    if (terms.d) s += 'd';
    return s;
}

std::string to_string(ErrorMetric metric) {
    switch (metric) {
        case ErrorMetric::Linear: return "linear";
        case ErrorMetric::Polynomial: return "polynomial";
        case ErrorMetric::Exponential: return "exponential";
    }
    return "linear";
}

ErrorMetric metric_from_string(const std::string& s) {
    if (s == "linear") return ErrorMetric::Linear;
    if (s == "polynomial") return ErrorMetric::Polynomial;
    if (s == "exponential") return ErrorMetric::Exponential;
    throw InvalidSpec("unknown error metric '" + s + "'");
}

DesignMatrix build_design(const Trial& trial, const ControlLawSpec& spec,
                          const ReferenceState& reference, double initial_accumulated_error) {
    validate(spec);
    if (!trial.has_velocity() || !trial.has_acceleration())
        throw MissingKinematics("design matrix needs velocity and acceleration");

    const Index n = trial.length();
    const Vector e = reference.p_star - trial.position.array();
    const Vector edot = reference.v_star - trial.velocity.array();

    DesignMatrix d;
    d.target = trial.acceleration;
    d.X.resize(n, column_count(spec));

    Index c = 0;
    switch (spec.metric) {
        case ErrorMetric::Linear: {
            if (spec.terms.p) {
                d.X.col(c) = e;
                d.columns.push_back("Kp");
                ++c;
            }
            if (spec.terms.i) {
                Vector s(n);
                double acc = initial_accumulated_error;
                for (Index k = 0; k < n; ++k) {
                    acc += e(k);  // running sum includes the current sample
                    s(k) = acc;
                }
                d.X.col(c) = s;
                d.columns.push_back("Ki");
                ++c;
            }
            if (spec.terms.d) {
                d.X.col(c) = edot;
                d.columns.push_back("Kd");
                ++c;
            }
            break;
        }
        case ErrorMetric::Polynomial: {
            static constexpr int kPowers[4] = {7, 5, 3, 1};
            if (spec.terms.p) {
                for (const int p : kPowers) {
                    d.X.col(c++) = e.array().pow(p);
                    d.columns.push_back("Kp_e" + std::to_string(p));
                }
            }
            if (spec.terms.d) {
                for (const int p : kPowers) {
                    if (spec.poly_derivative == PolyDerivative::ChainRule)
                        d.X.col(c++) = p * e.array().pow(p - 1) * edot.array();
                    else
                        d.X.col(c++) = edot.array().pow(p);
                    d.columns.push_back("Kd_e" + std::to_string(p));
                }
            }
            break;
        }
        case ErrorMetric::Exponential: {
            if (e.array().abs().maxCoeff() > kExpErrorLimit ||
                edot.array().abs().maxCoeff() > kExpErrorLimit)
                throw NonFinite("error magnitude too large for the exponential metric");
            if (spec.terms.p) {
                d.X.col(c++) = e.array().exp();
                d.columns.push_back("Kp_exp");
            }
            if (spec.terms.d) {
                d.X.col(c++) = edot.array().exp();
                d.columns.push_back("Kd_exp");
            }
            break;
        }
    }
    if (!d.X.allFinite()) throw NonFinite("design matrix has non-finite entries");
    return d;
}

Vector ridge_solve(const DesignMatrix& design, double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw InvalidSpec("lambda must be finite and >= 0");
    const Index n = design.X.rows();
    const Index k = design.X.cols();
    if (design.target.size() != n) throw DimensionMismatch("target length != design rows");

    if (lambda == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
        if (qr.rank() < k) throw SingularSystem("rank-deficient design with lambda = 0");
        return qr.solve(design.target);
    }

    Eigen::MatrixXd aug(n + k, k);
    aug.topRows(n) = design.X;
    aug.bottomRows(k) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(k, k);
    Vector rhs = Vector::Zero(n + k);
    rhs.head(n) = design.target;
    return aug.colPivHouseholderQr().solve(rhs);
}

Vector predict(const DesignMatrix& design, const Eigen::Ref<const Vector>& coefficients) {
    if (coefficients.size() != design.X.cols())
        throw DimensionMismatch("coefficient count != design columns");
    return design.X * coefficients;
}

double rms_error(const Eigen::Ref<const Vector>& predicted,
                 const Eigen::Ref<const Vector>& observed) {
    if (predicted.size() != observed.size()) throw LengthMismatch("sequence lengths differ");
    if (predicted.size() == 0) throw EmptyInput("empty sequences");
    return std::sqrt((predicted - observed).squaredNorm() / static_cast<double>(predicted.size()));
}

double r_squared(const Eigen::Ref<const Vector>& predicted,
                 const Eigen::Ref<const Vector>& observed) {
    if (predicted.size() != observed.size()) throw LengthMismatch("sequence lengths differ");
    const Index n = observed.size();
    if (n < 2) throw EmptyInput("need at least 2 samples for R^2");
    const double mean = observed.mean();
    const double s_tot = (observed.array() - mean).matrix().squaredNorm();
    if (s_tot <= 1e-24 * static_cast<double>(n) * (1.0 + mean * mean))
        throw DegenerateTarget("target has no variance");
    const double s_res = (predicted - observed).squaredNorm();
    return 1.0 - s_res / s_tot;
}

FitResult fit_trial(const Trial& trial, const ControlLawSpec& spec) {
    const ReferenceState reference = reference_state(trial);
    const DesignMatrix design = build_design(trial, spec, reference, 0.0);
    return fit_rows(design, 0, trial.length(), spec, reference, "full");
}

SegmentFit fit_segments(const Trial& trial, const seg::Segmentation& segmentation,
                        const ControlLawSpec& spec) {
    seg::validate(segmentation, trial.length(), /*enforce_phase_count=*/false);
    const ReferenceState reference = reference_state(trial);
    // One full-trial design keeps the integral running sum continuous across
    // phase boundaries; phases fit on row blocks.
    const DesignMatrix design = build_design(trial, spec, reference, 0.0);

    std::vector<Index> bounds;
    bounds.push_back(0);
    bounds.insert(bounds.end(), segmentation.breakpoints.begin(), segmentation.breakpoints.end());
    bounds.push_back(trial.length());

    SegmentFit out;
    double weighted_sq = 0.0;
    double weighted_r2 = 0.0;
    Index total = 0;
    for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
        const Index begin = bounds[p];
        const Index count = bounds[p + 1] - begin;
        FitResult r = fit_rows(design, begin, count, spec, reference, segmentation.labels[p]);
        weighted_sq += static_cast<double>(count) * r.rms * r.rms;
        weighted_r2 += static_cast<double>(count) * r.r2;
        total += count;
        out.phases.push_back(std::move(r));
    }
    out.rms = std::sqrt(weighted_sq / static_cast<double>(total));
    out.r2 = weighted_r2 / static_cast<double>(total);
    return out;
}

}  // namespace pushrec::fit
