#pragma once

/**
 * Sentence model and word tokenization.
 *
 * Tokens are maximal runs of alphanumeric characters (UTF-8 continuation
 * bytes count as letters so accented words survive); everything else,
 * including hyphens and apostrophes, is a boundary. Offsets always
 * reconstruct the surface form from the sentence text.
 */

#include <cctype>
#include <string>
#include <vector>

#include "util.hpp"

namespace evex {

struct Token {
    std::string text;   // surface form, original casing
    size_t begin = 0;   // char offset into sentence text
    size_t end = 0;     // one past the last char
};

struct Sentence {
    std::string id;        // "<doc_id>:<sent_index>"
    std::string doc_id;
    int sent_index = 0;
    std::string text;
    std::string doc_date;  // optional "YYYY-MM-DD", empty when absent
    std::vector<Token> tokens;
};

inline std::string sentence_id(const std::string& doc_id, int sent_index) {
    return doc_id + ":" + std::to_string(sent_index);
}

inline bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

inline std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        size_t begin = i;
        while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i]))) ++i;
        tokens.push_back({text.substr(begin, i - begin), begin, i});
    }
    return tokens;
}

inline Sentence make_sentence(std::string doc_id, int sent_index, std::string text,
                              std::string doc_date = "") {
    Sentence s;
    s.doc_id = std::move(doc_id);
    s.sent_index = sent_index;
    s.id = sentence_id(s.doc_id, sent_index);
    s.text = std::move(text);
    s.doc_date = std::move(doc_date);
    s.tokens = tokenize(s.text);
    return s;
}

} // namespace evex
