#include "pbn/error.hpp"

namespace pbn {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::SpaceMismatch: return "SpaceMismatch";
        case ErrorCode::EmptyAtom: return "EmptyAtom";
        case ErrorCode::AtomsOverlap: return "AtomsOverlap";
        case ErrorCode::AtomsIncomplete: return "AtomsIncomplete";
        case ErrorCode::NotARefinement: return "NotARefinement";
        case ErrorCode::ZeroProbabilityCondition: return "ZeroProbabilityCondition";
        case ErrorCode::ZeroProbabilityAtom: return "ZeroProbabilityAtom";
        case ErrorCode::SizeOverflow: return "SizeOverflow";
        case ErrorCode::UndeclaredAxis: return "UndeclaredAxis";
        case ErrorCode::BadDimensionExpr: return "BadDimensionExpr";
        case ErrorCode::RowNotStochastic: return "RowNotStochastic";
        case ErrorCode::NotAnEigenpair: return "NotAnEigenpair";
        case ErrorCode::NonZeroMeanIncrement: return "NonZeroMeanIncrement";
        case ErrorCode::ZeroLambda: return "ZeroLambda";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::TreeTooLarge: return "TreeTooLarge";
        case ErrorCode::UnboundedTransform: return "UnboundedTransform";
        case ErrorCode::BadProcess: return "BadProcess";
        case ErrorCode::BadRate: return "BadRate";
        case ErrorCode::BadVolatility: return "BadVolatility";
        case ErrorCode::BadGrid: return "BadGrid";
        case ErrorCode::UnknownMeanFunction: return "UnknownMeanFunction";
        case ErrorCode::NotCompensatedBrownian: return "NotCompensatedBrownian";
        case ErrorCode::TimesNotOnGrid: return "TimesNotOnGrid";
        case ErrorCode::TooFewPaths: return "TooFewPaths";
        case ErrorCode::DegenerateBin: return "DegenerateBin";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnboundName: return "UnboundName";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::SchemaError: return "SchemaError";
    }
    return "UnknownError";
}

}  // namespace pbn
