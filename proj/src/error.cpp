#include "qnnv/error.hpp"

namespace qnnv {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError: return "syntax_error";
    case ErrorCode::DivisionByZero: return "division_by_zero";
    case ErrorCode::NotRepresentable: return "not_representable";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::UnquantisedNetwork: return "unquantised_network";
    case ErrorCode::UnrepresentableInput: return "unrepresentable_input";
    case ErrorCode::MissingVariable: return "missing_variable";
    case ErrorCode::WidthMismatch: return "width_mismatch";
    case ErrorCode::UnboundVariable: return "unbound_variable";
    case ErrorCode::ConstantTooWide: return "constant_too_wide";
    case ErrorCode::SearchSpaceTooLarge: return "search_space_too_large";
    case ErrorCode::EmptyClause: return "empty_clause";
    case ErrorCode::ClauseTooWide: return "clause_too_wide";
    case ErrorCode::AlphabetMismatch: return "alphabet_mismatch";
    case ErrorCode::IndexOutOfRange: return "index_out_of_range";
    case ErrorCode::UnsupportedRounding: return "unsupported_rounding";
    case ErrorCode::UnsupportedOverflow: return "unsupported_overflow";
    case ErrorCode::UnsupportedNetwork: return "unsupported_network";
    case ErrorCode::ExponentWidthTooLarge: return "exponent_width_too_large";
    case ErrorCode::UnsupportedDepth: return "unsupported_depth";
    case ErrorCode::BackendUnavailable: return "backend_unavailable";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Internal: return "internal_error";
    }
    return "unknown_error";
}

}  // namespace qnnv
