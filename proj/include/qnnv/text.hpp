#pragma once

#include "qnnv/rational.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qnnv {

struct SourceLine {
    std::size_t number = 0;  // 1-based
    std::string text;        // trimmed, comment stripped
};

/// Yields non-blank lines with '#' comments removed.
class LineReader {
public:
    explicit LineReader(std::string_view text);

    std::optional<SourceLine> next();
    std::optional<SourceLine> peek();
    std::string where(const SourceLine& line) const { return "line " + std::to_string(line.number) + ": "; }

private:
    std::vector<SourceLine> lines_;
    std::size_t pos_ = 0;
};

std::string trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
long parse_count(std::string_view s, const std::string& context);
RationalVector parse_rationals(const std::vector<std::string>& tokens, const std::string& context);
/// Comma- or whitespace-separated rationals.
RationalVector parse_rational_list(std::string_view s);

}  // namespace qnnv
