#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnnv {

enum class ErrorCode {
    SyntaxError,
    DivisionByZero,
    NotRepresentable,
    DimensionMismatch,
    UnquantisedNetwork,
    UnrepresentableInput,
    MissingVariable,
    WidthMismatch,
    UnboundVariable,
    ConstantTooWide,
    SearchSpaceTooLarge,
    EmptyClause,
    ClauseTooWide,
    AlphabetMismatch,
    IndexOutOfRange,
    UnsupportedRounding,
    UnsupportedOverflow,
    UnsupportedNetwork,
    ExponentWidthTooLarge,
    UnsupportedDepth,
    BackendUnavailable,
    InvalidArgument,
    Internal,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qnnv
