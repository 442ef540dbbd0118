#pragma once

#include <string>
#include <vector>

#include "pushrec/segment.hpp"
#include "pushrec/trial.hpp"

namespace pushrec::fit {

// Active controller terms; at least one must be set.
struct Terms {
    bool p = false;
    bool i = false;
    bool d = false;
};

enum class ErrorMetric { Linear, Polynomial, Exponential };

// How the time derivative of the polynomial error columns is read:
// ChainRule expands (e^n)' = n e^(n-1) e', RatePowers uses plain powers of
// e' instead. ChainRule is the default reading.
enum class PolyDerivative { ChainRule, RatePowers };

struct ControlLawSpec {
    Terms terms;
    ErrorMetric metric = ErrorMetric::Linear;
    double lambda = 0.01;
    PolyDerivative poly_derivative = PolyDerivative::ChainRule;
};

void validate(const ControlLawSpec& spec);

// "p", "pi", "pd", "pid", ... in any order of the three letters.
Terms terms_from_string(const std::string& law);
std::string to_string(const Terms& terms);
std::string to_string(ErrorMetric metric);
ErrorMetric metric_from_string(const std::string& s);

// Regressors (rows = samples) against the measured acceleration. Never
// carries a bias column.
struct DesignMatrix {
    Eigen::MatrixXd X;
    Vector target;
    std::vector<std::string> columns;
};

// Exponential-metric overflow guard on |e| and |e'|.
inline constexpr double kExpErrorLimit = 50.0;

// Builds the regression problem for one trial (or phase). The integral
// column is the plain running sum of position errors, seeded with
// `initial_accumulated_error` so later phases can inherit it.
DesignMatrix build_design(const Trial& trial, const ControlLawSpec& spec,
                          const ReferenceState& reference,
                          double initial_accumulated_error = 0.0);

// Minimizes ||X w - y||^2 + lambda ||w||^2 by appending sqrt(lambda) I rows
// and solving the augmented least squares with a QR factorization.
Vector ridge_solve(const DesignMatrix& design, double lambda);

Vector predict(const DesignMatrix& design, const Eigen::Ref<const Vector>& coefficients);

double rms_error(const Eigen::Ref<const Vector>& predicted,
                 const Eigen::Ref<const Vector>& observed);
double r_squared(const Eigen::Ref<const Vector>& predicted,
                 const Eigen::Ref<const Vector>& observed);

struct FitResult {
    std::string label = "full";
    std::vector<std::string> columns;  // gain names, in design order
    Vector gains;                      // mass-normalized coefficients
    double rms = 0.0;
    double r2 = 0.0;
    Index n_samples = 0;
    ReferenceState reference;
    std::vector<std::string> warnings;  // e.g. negative fitted gains
};

// Fits one preprocessed trial against its last sample as reference.
FitResult fit_trial(const Trial& trial, const ControlLawSpec& spec);

struct SegmentFit {
    std::vector<FitResult> phases;
    double rms = 0.0;  // sqrt(sum n_i rms_i^2 / sum n_i)
    double r2 = 0.0;   // sum n_i r2_i / sum n_i
};

// Independent per-phase fits; the integral running sum is inherited across
// phase boundaries and the reference stays the full trial's last sample.
SegmentFit fit_segments(const Trial& trial, const seg::Segmentation& segmentation,
                        const ControlLawSpec& spec);

}  // namespace pushrec::fit
