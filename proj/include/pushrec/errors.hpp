#pragma once

#include <stdexcept>
#include <string>

namespace pushrec {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- ingestion / validation ---
struct MalformedCsv : Error {
    using Error::Error;
};
struct NonUniformTimestep : Error {
    using Error::Error;
};
struct NonFiniteValue : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};

// --- signal conditioning ---
struct TooShort : Error {
    using Error::Error;
};
struct InvalidSpec : Error {
    using Error::Error;
};
struct NoStopDetected : Error {
    using Error::Error;
};
struct EmptyResult : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};

// --- segmentation ---
struct NoMilestone : Error {
    using Error::Error;
};
struct OrderViolation : Error {
    using Error::Error;
};
struct UnsupportedStrategy : Error {
    using Error::Error;
};

// --- fitting ---
struct MissingKinematics : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};
struct DegenerateTarget : Error {
    using Error::Error;
};
struct PhaseTooShort : Error {
    using Error::Error;
};

// --- statistics ---
struct EmptyGroup : Error {
    using Error::Error;
};
struct MixedSpec : Error {
    using Error::Error;
};

}  // namespace pushrec
