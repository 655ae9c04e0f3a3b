#pragma once

#include <stdexcept>
#include <string>

namespace bisingular {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define BISINGULAR_ERROR(Name) \
    struct Name : Error {      \
        using Error::Error;    \
    }

BISINGULAR_ERROR(UnsupportedFactor);
BISINGULAR_ERROR(NotClassical);
BISINGULAR_ERROR(NotInvertible);
BISINGULAR_ERROR(OutsideFamily);
BISINGULAR_ERROR(ClassUnsupported);
BISINGULAR_ERROR(InsufficientBand);
BISINGULAR_ERROR(AliasRisk);

#undef BISINGULAR_ERROR

struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t pos)
        : Error("parse error at " + std::to_string(pos) + ": " + msg), position(pos) {}
    std::size_t position;
};

}  // namespace bisingular
