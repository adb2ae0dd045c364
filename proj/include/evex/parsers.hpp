#pragma once

/**
 * Parsers for model responses. Which one applies is determined by the
 * prompt's purpose: set-producing purposes use the bulleted-list parser,
 * boolean purposes the yes/no parser, extraction the exact-phrase parser.
 */

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "util.hpp"

namespace evex::parse {

enum class Answer { Yes, No, Unparseable };

namespace detail {

inline bool is_bullet_line(std::string_view line, size_t& content_start) {
    if (line.empty()) return false;
    if (line[0] == '-' || line[0] == '*') {
        content_start = 1;
        return true;
    }
    // UTF-8 bullet character U+2022
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xE2 &&
        static_cast<unsigned char>(line[1]) == 0x80 &&
        static_cast<unsigned char>(line[2]) == 0xA2) {
        content_start = 3;
        return true;
    }
    // "N." numbered items
    size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && line[i] == '.') {
        content_start = i + 1;
        return true;
    }
    return false;
}

inline std::string strip_trailing_punct(std::string s) {
    while (!s.empty()) {
        char c = s.back();
        if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?') s.pop_back();
        else break;
    }
    return s;
}

} // namespace detail

/// Bulleted-list parser for lexical sets: items are lowercased and
/// stripped of trailing punctuation. nullopt when no bullet line exists.
inline std::optional<std::set<std::string>> bullet_list(std::string_view response) {
    std::set<std::string> items;
    bool any_bullet = false;
    for (const auto& raw : str::split(std::string(response), '\n')) {
        const std::string line = str::trim(raw);
        size_t start = 0;
        if (!detail::is_bullet_line(line, start)) continue;
        any_bullet = true;
        std::string item = str::to_lower(
            detail::strip_trailing_punct(str::trim(line.substr(start))));
        if (!item.empty()) items.insert(item);
    }
    if (!any_bullet) return std::nullopt;
    return items;
}

/// Bulleted list preserving case and inner punctuation (used for sentence
/// spans where verbatim text matters). Only a trailing period is stripped.
inline std::optional<std::vector<std::string>> span_list(std::string_view response) {
    std::vector<std::string> spans;
    bool any_bullet = false;
    for (const auto& raw : str::split(std::string(response), '\n')) {
        const std::string line = str::trim(raw);
        size_t start = 0;
        if (!detail::is_bullet_line(line, start)) continue;
        any_bullet = true;
        std::string span = str::trim(line.substr(start));
        if (!span.empty() && span.back() == '.') span.pop_back();
        span = str::trim(span);
        if (!span.empty()) spans.push_back(span);
    }
    if (!any_bullet) return std::nullopt;
    return spans;
}

/// Boolean parser: leading yes/no word (case-insensitive), anything else
/// is unparseable. "none" does not count as "no".
inline Answer boolean(std::string_view response) {
    std::string s = str::to_lower(str::trim(response));
    size_t i = 0;
    while (i < s.size() && !std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    auto word_at = [&](std::string_view w) {
        if (s.compare(i, w.size(), w) != 0) return false;
        size_t after = i + w.size();
        return after >= s.size() || !std::isalpha(static_cast<unsigned char>(s[after]));
    };
    if (word_at("yes")) return Answer::Yes;
    if (word_at("no")) return Answer::No;
    return Answer::Unparseable;
}

/// Extractive answer: trimmed, unquoted, trailing period dropped.
/// Returns nullopt for the "none" sentinel (role absent).
inline std::optional<std::string> extractive(std::string_view response) {
    std::string s = str::trim(response);
    for (bool changed = true; changed;) {
        changed = false;
        if (!s.empty() && s.back() == '.') {
            s.pop_back();
            changed = true;
        }
        if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                              (s.front() == '\'' && s.back() == '\''))) {
            s = s.substr(1, s.size() - 2);
            changed = true;
        }
        const std::string t = str::trim(s);
        if (t.size() != s.size()) {
            s = t;
            changed = true;
        }
    }
    if (str::to_lower(s) == "none") return std::nullopt;
    return s;
}

} // namespace evex::parse
