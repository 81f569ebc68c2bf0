#include "whsid/errors.hpp"

namespace whsid {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::EmptyDenominator: return "EmptyDenominator";
        case Errc::UnstableFilter: return "UnstableFilter";
        case Errc::StateSizeMismatch: return "StateSizeMismatch";
        case Errc::NonFiniteInput: return "NonFiniteInput";
        case Errc::BadNonlinearity: return "BadNonlinearity";
        case Errc::NonPolynomial: return "NonPolynomial";
        case Errc::EmptyGrid: return "EmptyGrid";
        case Errc::GridOutOfRange: return "GridOutOfRange";
        case Errc::BadLength: return "BadLength";
        case Errc::TooFewSegments: return "TooFewSegments";
        case Errc::NonFiniteSample: return "NonFiniteSample";
        case Errc::ZeroReferenceVariance: return "ZeroReferenceVariance";
        case Errc::TooFewPeriods: return "TooFewPeriods";
        case Errc::BadBinCount: return "BadBinCount";
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::IoError: return "IoError";
        case Errc::Internal: return "Internal";
    }
    return "UnknownError";
}

} // namespace whsid
