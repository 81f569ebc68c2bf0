#pragma once

#include <stdexcept>
#include <string>

namespace whsid {

enum class Errc {
    EmptyDenominator,
    UnstableFilter,
    StateSizeMismatch,
    NonFiniteInput,
    BadNonlinearity,
    NonPolynomial,
    EmptyGrid,
    GridOutOfRange,
    BadLength,
    TooFewSegments,
    NonFiniteSample,
    ZeroReferenceVariance,
    TooFewPeriods,
    BadBinCount,
    ParseError,
    ValidationError,
    DimensionMismatch,
    IoError,
    Internal,
};

const char* errc_name(Errc c);

/// Exception carrying a machine-checkable error code plus a human message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace whsid
