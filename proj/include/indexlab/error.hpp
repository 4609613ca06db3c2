#pragma once

#include <stdexcept>
#include <string>

namespace indexlab {

/// Category of a failed operation. Callers switch on this rather than on
/// the concrete exception type.
enum class ErrorKind {
    parse,              // malformed input text
    validation,         // well-formed input violating a value constraint
    lookup,             // unknown column, preset or predictor
    definition,         // inconsistent index definition
    domain,             // argument outside a function's domain
    insufficient_data,  // too few observations
    degenerate,         // zero variance or degenerate range
    singular,           // rank-deficient design or non-invertible matrix
    shape,              // mismatched lengths or non-square / asymmetric input
    numerical,          // iteration failed to converge or lost definiteness
    usage               // bad CLI arguments / unknown format
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::parse: return "parse error";
        case ErrorKind::validation: return "validation error";
        case ErrorKind::lookup: return "lookup error";
        case ErrorKind::definition: return "definition error";
        case ErrorKind::domain: return "domain error";
        case ErrorKind::insufficient_data: return "insufficient data";
        case ErrorKind::degenerate: return "degenerate data";
        case ErrorKind::singular: return "singular design";
        case ErrorKind::shape: return "shape error";
        case ErrorKind::numerical: return "numerical error";
        case ErrorKind::usage: return "usage error";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace indexlab
