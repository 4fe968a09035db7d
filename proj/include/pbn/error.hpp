#pragma once

#include <stdexcept>
#include <string>

namespace pbn {

// Every failure mode the library reports. Tests match on the code, not the
// message text.
enum class ErrorCode {
    NegativeWeight,
    NotNormalized,
    DuplicateLabel,
    LengthMismatch,
    IndexOutOfRange,
    SpaceMismatch,
    EmptyAtom,
    AtomsOverlap,
    AtomsIncomplete,
    NotARefinement,
    ZeroProbabilityCondition,
    ZeroProbabilityAtom,
    SizeOverflow,
    UndeclaredAxis,
    BadDimensionExpr,
    RowNotStochastic,
    NotAnEigenpair,
    NonZeroMeanIncrement,
    ZeroLambda,
    ZeroVector,
    TreeTooLarge,
    UnboundedTransform,
    BadProcess,
    BadRate,
    BadVolatility,
    BadGrid,
    UnknownMeanFunction,
    NotCompensatedBrownian,
    TimesNotOnGrid,
    TooFewPaths,
    DegenerateBin,
    SyntaxError,
    UnboundName,
    TypeMismatch,
    IoError,
    SchemaError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace pbn
