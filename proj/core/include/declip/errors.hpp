#pragma once

#include <stdexcept>
#include <string>

namespace declip {

// Base class for all library errors. The CLI maps these to exit code 3
// (numeric/method failure) and IoError to exit code 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFinite : Error { using Error::Error; };
struct NonSymmetric : Error { using Error::Error; };
struct BadShape : Error { using Error::Error; };
struct BadValue : Error { using Error::Error; };
struct BadLambda : Error { using Error::Error; };
struct BadCoeffs : Error { using Error::Error; };
struct NotAFrame : Error { using Error::Error; };
struct NotUnitNorm : Error { using Error::Error; };
struct NotParseval : Error { using Error::Error; };
struct NotFullSpark : Error { using Error::Error; };
struct StepOutOfRange : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };

// Violation of a mathematically guaranteed post-condition; indicates a bug
// or an input outside the guarantee's hypotheses, never normal control flow.
struct ContractViolation : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

}  // namespace declip
