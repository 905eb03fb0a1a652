#include "qnnv/text.hpp"

#include "qnnv/error.hpp"

#include <cctype>
#include <sstream>

namespace qnnv {

LineReader::LineReader(std::string_view text) {
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto t = trim(raw);
        if (!t.empty()) lines_.push_back({number, std::move(t)});
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
}

std::optional<SourceLine> LineReader::next() {
    if (pos_ >= lines_.size()) return std::nullopt;
    return lines_[pos_++];
}

std::optional<SourceLine> LineReader::peek() {
    if (pos_ >= lines_.size()) return std::nullopt;
    return lines_[pos_];
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

long parse_count(std::string_view s, const std::string& context) {
    if (s.empty() || s.size() > 9) throw Error(ErrorCode::SyntaxError, context + "expected a count, got '" + std::string(s) + "'");
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw Error(ErrorCode::SyntaxError, context + "expected a count, got '" + std::string(s) + "'");
        }
    }
    return std::stol(std::string(s));
}

RationalVector parse_rationals(const std::vector<std::string>& tokens, const std::string& context) {
    RationalVector out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        try {
            out.push_back(Rational::parse(t));
        } catch (const Error& e) {
            throw Error(e.code(), context + e.what());
        }
    }
    return out;
}

RationalVector parse_rational_list(std::string_view s) {
    std::string copy(s);
    for (char& c : copy) {
        if (c == ',') c = ' ';
    }
    return parse_rationals(split_ws(copy), "");
}

}  // namespace qnnv
