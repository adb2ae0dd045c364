#pragma once

/**
 * English Snowball stemmer (the "Porter2" algorithm).
 *
 * Implements the published algorithm: R1/R2 regions, y-marking, the
 * exceptional-form tables, and steps 0 through 5 with longest-suffix
 * matching. Suffix tables are searched longest-first and the region
 * condition is tested on the longest match only, which is the behavior
 * of the reference implementation (a shorter suffix is never tried when
 * a longer one matched but failed its condition).
 *
 * Tokens containing characters other than ASCII letters and apostrophes
 * are returned lowercased and otherwise untouched.
 */

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "util.hpp"

namespace evex::snowball {
namespace detail {

// Vowel groupings.  After y-marking, consonant 'y' is uppercase 'Y' and
// therefore outside every grouping below.
inline bool vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}
inline bool vowel_y(char c) { return vowel(c) || c == 'y'; }

inline bool double_consonant_pair(char a, char b) {
    if (a != b) return false;
    return a == 'b' || a == 'd' || a == 'f' || a == 'g' || a == 'm' ||
           a == 'n' || a == 'p' || a == 'r' || a == 't';
}

inline bool valid_li_ending(char c) {
    return c == 'c' || c == 'd' || c == 'e' || c == 'g' || c == 'h' ||
           c == 'k' || c == 'm' || c == 'n' || c == 'r' || c == 't';
}

// First position after a non-vowel that follows a vowel, scanning from
// `from`; word length when there is none.
inline size_t region_after_vc(const std::string& w, size_t from) {
    for (size_t i = from; i > 0 && i < w.size(); ++i) {
        if (!vowel_y(w[i]) && vowel_y(w[i - 1])) return i + 1;
    }
    return w.size();
}

inline size_t r1_start(const std::string& w) {
    for (std::string_view p : {"gener", "commun", "arsen"}) {
        if (evex::str::starts_with(w, p)) return p.size();
    }
    return region_after_vc(w, 1);
}

// Short syllable at the end of the word: non-vowel, vowel, non-vowel
// other than w/x/Y; or a word-initial vowel followed by a non-vowel.
inline bool ends_short_syllable(const std::string& w) {
    size_t n = w.size();
    if (n >= 3 && !vowel_y(w[n - 3]) && vowel_y(w[n - 2]) && !vowel_y(w[n - 1]) &&
        w[n - 1] != 'w' && w[n - 1] != 'x' && w[n - 1] != 'Y') {
        return true;
    }
    return n == 2 && vowel_y(w[0]) && !vowel_y(w[1]);
}

inline bool ends_with(const std::string& w, std::string_view suf) {
    return evex::str::ends_with(w, suf);
}

// Replace `suf` by `rep` when the suffix starts at or after `region`.
inline bool replace_in(std::string& w, std::string_view suf, std::string_view rep,
                       size_t region) {
    if (!ends_with(w, suf)) return false;
    size_t pos = w.size() - suf.size();
    if (pos < region) return false;
    w.replace(pos, suf.size(), rep);
    return true;
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Longest matching suffix in `rules`, or nullptr.
inline const Rule* longest_match(const std::string& w, const Rule* rules, size_t count) {
    const Rule* best = nullptr;
    for (size_t i = 0; i < count; ++i) {
        if (ends_with(w, rules[i].suffix)) {
            if (!best || rules[i].suffix.size() > best->suffix.size()) best = &rules[i];
        }
    }
    return best;
}

inline void mark_consonant_y(std::string& w) {
    if (w[0] == 'y') w[0] = 'Y';
    for (size_t i = 1; i < w.size(); ++i) {
        if (w[i] == 'y' && vowel(w[i - 1])) w[i] = 'Y';
    }
}

inline void step0(std::string& w) {
    if (ends_with(w, "'s'")) w.erase(w.size() - 3);
    else if (ends_with(w, "'s")) w.erase(w.size() - 2);
    else if (ends_with(w, "'")) w.erase(w.size() - 1);
}

inline void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
        w.erase(w.size() - 2);
    } else if (ends_with(w, "ied") || ends_with(w, "ies")) {
        // i when preceded by more than one letter, otherwise ie
        if (w.size() > 4) w.erase(w.size() - 2);
        else w.erase(w.size() - 1);
    } else if (ends_with(w, "us") || ends_with(w, "ss")) {
        // no change
    } else if (ends_with(w, "s")) {
        // delete when a vowel occurs before the position just ahead of the s
        for (size_t i = 0; i + 2 < w.size(); ++i) {
            if (vowel_y(w[i])) {
                w.pop_back();
                break;
            }
        }
    }
}

inline void step1b(std::string& w, size_t r1) {
    if (ends_with(w, "eedly")) {
        replace_in(w, "eedly", "ee", r1);
        return;
    }
    if (ends_with(w, "eed")) {
        replace_in(w, "eed", "ee", r1);
        return;
    }
    size_t cut = 0;
    if (ends_with(w, "ingly")) cut = 5;
    else if (ends_with(w, "edly")) cut = 4;
    else if (ends_with(w, "ing")) cut = 3;
    else if (ends_with(w, "ed")) cut = 2;
    if (cut == 0) return;

    bool has_vowel = false;
    for (size_t i = 0; i + cut < w.size(); ++i) {
        if (vowel_y(w[i])) { has_vowel = true; break; }
    }
    if (!has_vowel) return;

    w.erase(w.size() - cut);
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w.push_back('e');
    } else if (w.size() >= 2 && double_consonant_pair(w[w.size() - 2], w[w.size() - 1])) {
        w.pop_back();
    } else if (r1 >= w.size() && ends_short_syllable(w)) {
        w.push_back('e');
    }
}

inline void step1c(std::string& w) {
    size_t n = w.size();
    if (n > 2 && (w[n - 1] == 'y' || w[n - 1] == 'Y') && !vowel(w[n - 2])) {
        w[n - 1] = 'i';
    }
}

inline void step2(std::string& w, size_t r1) {
    static constexpr std::array<Rule, 24> rules = {{
        {"ization", "ize"}, {"ational", "ate"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"iveness", "ive"}, {"tional", "tion"},
        {"biliti", "ble"},  {"lessli", "less"}, {"entli", "ent"},
        {"ation", "ate"},   {"alism", "al"},    {"aliti", "al"},
        {"ousli", "ous"},   {"iviti", "ive"},   {"fulli", "ful"},
        {"enci", "ence"},   {"anci", "ance"},   {"abli", "able"},
        {"izer", "ize"},    {"ator", "ate"},    {"alli", "al"},
        {"ogi", "og"},      {"bli", "ble"},     {"li", ""},
    }};
    const Rule* m = longest_match(w, rules.data(), rules.size());
    if (!m) return;
    size_t pos = w.size() - m->suffix.size();
    if (pos < r1) return;
    if (m->suffix == "ogi") {
        if (pos == 0 || w[pos - 1] != 'l') return;
    } else if (m->suffix == "li") {
        if (pos == 0 || !valid_li_ending(w[pos - 1])) return;
    }
    w.replace(pos, m->suffix.size(), m->replacement);
}

inline void step3(std::string& w, size_t r1, size_t r2) {
    static constexpr std::array<Rule, 9> rules = {{
        {"ational", "ate"}, {"tional", "tion"}, {"alize", "al"},
        {"icate", "ic"},    {"iciti", "ic"},    {"ative", ""},
        {"ical", "ic"},     {"ness", ""},       {"ful", ""},
    }};
    const Rule* m = longest_match(w, rules.data(), rules.size());
    if (!m) return;
    size_t pos = w.size() - m->suffix.size();
    if (pos < r1) return;
    if (m->suffix == "ative" && pos < r2) return;
    w.replace(pos, m->suffix.size(), m->replacement);
}

inline void step4(std::string& w, size_t r2) {
    static constexpr std::array<Rule, 18> rules = {{
        {"ement", ""}, {"ance", ""}, {"ence", ""}, {"able", ""},
        {"ible", ""},  {"ment", ""}, {"ant", ""},  {"ent", ""},
        {"ism", ""},   {"ate", ""},  {"iti", ""},  {"ous", ""},
        {"ive", ""},   {"ize", ""},  {"ion", ""},  {"al", ""},
        {"er", ""},    {"ic", ""},
    }};
    const Rule* m = longest_match(w, rules.data(), rules.size());
    if (!m) return;
    size_t pos = w.size() - m->suffix.size();
    if (pos < r2) return;
    if (m->suffix == "ion") {
        if (pos == 0 || (w[pos - 1] != 's' && w[pos - 1] != 't')) return;
    }
    w.erase(pos);
}

inline void step5(std::string& w, size_t r1, size_t r2) {
    size_t n = w.size();
    if (n == 0) return;
    if (w[n - 1] == 'e') {
        if (n - 1 >= r2) {
            w.pop_back();
        } else if (n - 1 >= r1 && !ends_short_syllable(w.substr(0, n - 1))) {
            w.pop_back();
        }
    } else if (w[n - 1] == 'l') {
        if (n - 1 >= r2 && n >= 2 && w[n - 2] == 'l') w.pop_back();
    }
}

inline const std::unordered_map<std::string, std::string>& exceptions1() {
    static const std::unordered_map<std::string, std::string> m = {
        {"skis", "ski"},     {"skies", "sky"},   {"dying", "die"},
        {"lying", "lie"},    {"tying", "tie"},   {"idly", "idl"},
        {"gently", "gentl"}, {"ugly", "ugli"},   {"early", "earli"},
        {"only", "onli"},    {"singly", "singl"},
        {"sky", "sky"},      {"news", "news"},   {"howe", "howe"},
        {"atlas", "atlas"},  {"cosmos", "cosmos"}, {"bias", "bias"},
        {"andes", "andes"},
    };
    return m;
}

inline const std::unordered_set<std::string>& exceptions2() {
    static const std::unordered_set<std::string> s = {
        "inning", "outing", "canning", "herring",
        "earring", "proceed", "exceed", "succeed",
    };
    return s;
}

} // namespace detail

/// Stem a single lowercase-able token.  Deterministic and idempotent on
/// its own outputs for ordinary English vocabulary.
inline std::string stem(std::string_view token) {
    std::string w = evex::str::to_lower(token);
    for (char c : w) {
        if (!(c >= 'a' && c <= 'z') && c != '\'') return w;
    }
    if (w.size() <= 2) return w;

    if (!w.empty() && w[0] == '\'') w.erase(0, 1);
    if (w.size() <= 2) return w;

    {
        auto it = detail::exceptions1().find(w);
        if (it != detail::exceptions1().end()) return it->second;
    }

    detail::mark_consonant_y(w);
    const size_t r1 = detail::r1_start(w);
    const size_t r2 = detail::region_after_vc(w, r1 + 1);

    detail::step0(w);
    detail::step1a(w);
    if (detail::exceptions2().count(w)) {
        // already in final form
    } else {
        detail::step1b(w, r1);
        detail::step1c(w);
        detail::step2(w, r1);
        detail::step3(w, r1, r2);
        detail::step4(w, r2);
        detail::step5(w, r1, r2);
    }
    for (char& c : w) {
        if (c == 'Y') c = 'y';
    }
    return w;
}

/// Stem every whitespace-separated token of a (possibly multiword) term,
/// rejoining with single spaces.  Single tokens reduce to stem().
inline std::string stem_phrase(std::string_view phrase) {
    auto tokens = evex::str::split(evex::str::normalize_ws(phrase), ' ');
    for (auto& t : tokens) t = stem(t);
    return evex::str::join(tokens, " ");
}

} // namespace evex::snowball
