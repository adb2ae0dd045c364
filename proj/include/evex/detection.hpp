#pragma once

/**
 * Event detection.
 *
 * Stage 1 is pure string work: scan each sentence's tokens for trigger
 * stems (prefix matches, multiword stems as contiguous token-sequence
 * prefixes): no model queries. Stage 2 disambiguates every match with
 * one boolean vote. The naive exhaustive baseline lives here too: one
 * boolean query per (sentence, class) pair regardless of content.
 */

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gateway.hpp"
#include "lexicon.hpp"
#include "tokenizer.hpp"
#include "util.hpp"
#include "verb_morphology.hpp"

namespace evex {

// Stems shorter than this only match a token exactly; longer stems match
// as prefixes. Guards against degenerate prefixes flooding stage 2.
inline constexpr size_t kMinPrefixStemLength = 3;

struct TriggerMatch {
    std::string sentence_id;
    std::string class_id;
    std::string token;        // surface form; space-joined for multiword stems
    int token_index = 0;      // first token of the match
    std::string matched_stem;
    std::string source_term;  // provenance root: the class name or a keyword
};

struct Detection {
    std::string sentence_id;
    std::string class_id;
    std::string trigger;      // empty for the exhaustive baseline
    int token_index = -1;
    VoteResult votes;
};

namespace detail {

inline bool stem_token_matches(const std::string& stem_token, const std::string& token_lower) {
    if (stem_token.size() < kMinPrefixStemLength) return stem_token == token_lower;
    return str::starts_with(token_lower, stem_token);
}

/// Number of sentence tokens consumed when `stem` matches at `pos`, or 0.
inline size_t stem_matches_at(const std::vector<std::string>& stem_parts,
                              const std::vector<Token>& tokens,
                              const std::vector<std::string>& tokens_lower, size_t pos) {
    if (pos + stem_parts.size() > tokens.size()) return 0;
    for (size_t i = 0; i < stem_parts.size(); ++i) {
        if (!stem_token_matches(stem_parts[i], tokens_lower[pos + i])) return 0;
    }
    return stem_parts.size();
}

} // namespace detail

inline std::vector<TriggerMatch>
match_candidates(const Sentence& sentence,
                 const std::map<std::string, TriggerStemSet>& lexicons) {
    std::vector<std::string> tokens_lower;
    tokens_lower.reserve(sentence.tokens.size());
    for (const auto& t : sentence.tokens) tokens_lower.push_back(str::to_lower(t.text));

    std::vector<TriggerMatch> matches;
    for (const auto& [class_id, lexicon] : lexicons) {
        // best (longest) stem per token position for this class
        std::map<int, TriggerMatch> by_position;
        for (const auto& stem : lexicon.stems) {
            const auto parts = str::split(stem, ' ');
            for (size_t pos = 0; pos < sentence.tokens.size(); ++pos) {
                const size_t used = detail::stem_matches_at(parts, sentence.tokens, tokens_lower, pos);
                if (used == 0) continue;
                std::vector<std::string> surface;
                for (size_t i = 0; i < used; ++i) surface.push_back(sentence.tokens[pos + i].text);

                TriggerMatch m;
                m.sentence_id = sentence.id;
                m.class_id = class_id;
                m.token = str::join(surface, " ");
                m.token_index = static_cast<int>(pos);
                m.matched_stem = stem;
                auto prov = lexicon.provenance.find(stem);
                m.source_term = prov != lexicon.provenance.end() ? prov->second.source_term
                                                                 : std::string();

                auto it = by_position.find(m.token_index);
                if (it == by_position.end()) {
                    by_position.emplace(m.token_index, std::move(m));
                } else if (stem.size() > it->second.matched_stem.size() ||
                           (stem.size() == it->second.matched_stem.size() &&
                            stem < it->second.matched_stem)) {
                    it->second = std::move(m);
                }
            }
        }
        for (auto& [pos, m] : by_position) matches.push_back(std::move(m));
    }
    std::sort(matches.begin(), matches.end(), [](const TriggerMatch& a, const TriggerMatch& b) {
        if (a.token_index != b.token_index) return a.token_index < b.token_index;
        return a.class_id < b.class_id;
    });
    return matches;
}

namespace prompts {

/// "In the sentence, does '<token>' indicate '<term>'?": term is the
/// class name, or the keyword the matched stem descends from.
inline std::string disambiguation(const std::string& sentence_text, const std::string& token,
                                  const std::string& term, const std::string& definition) {
    std::string q = sentence_text + "\nIn the sentence, does '" + token + "' indicate '" +
                    term + "'";
    const std::string def = clean_definition(definition);
    if (!def.empty()) q += ", where '" + term + "' means " + def;
    q += "?";
    return q;
}

} // namespace prompts

inline std::pair<bool, VoteResult> disambiguate(Gateway& gw, const Sentence& sentence,
                                                const TriggerMatch& match,
                                                const EventClassSpec& spec,
                                                const McConfig& cfg) {
    const std::string term = match.source_term.empty() ? spec.name : match.source_term;
    const std::string text =
        prompts::disambiguation(sentence.text, match.token, term, spec.definition);
    VoteResult v = gw.mc_vote({text, Purpose::Disambiguation}, cfg);
    return {v.verdict, v};
}

struct DetectionRun {
    std::vector<Detection> detections;
    std::vector<std::string> warnings;  // per-match failures, fail-closed
};

inline DetectionRun detect(Gateway& gw, const std::vector<Sentence>& corpus,
                           const std::map<std::string, EventClassSpec>& specs,
                           const std::map<std::string, TriggerStemSet>& lexicons,
                           const McConfig& cfg, int workers = 1) {
    DetectionRun run;

    // stage 1: pure matching, no queries
    std::vector<std::pair<const Sentence*, TriggerMatch>> work;
    for (const auto& sentence : corpus) {
        for (auto& match : match_candidates(sentence, lexicons)) {
            if (!specs.count(match.class_id)) {
                run.warnings.push_back("no spec for class " + match.class_id);
                continue;
            }
            work.emplace_back(&sentence, std::move(match));
        }
    }

    // stage 2: one boolean vote per match; disambiguation order is free
    std::vector<std::optional<Detection>> results(work.size());
    std::mutex warn_mu;
    parallel_for_index(work.size(), workers, [&](size_t i) {
        const auto& [sentence, match] = work[i];
        const EventClassSpec& spec = specs.at(match.class_id);
        try {
            auto [keep, votes] = disambiguate(gw, *sentence, match, spec, cfg);
            if (keep) {
                results[i] = Detection{match.sentence_id, match.class_id, match.token,
                                       match.token_index, votes};
            }
        } catch (const BackendError& e) {
            std::lock_guard lock(warn_mu);
            run.warnings.push_back("dropped match '" + match.token + "' (" + match.class_id +
                                   ") in " + sentence->id + ": " + e.what());
        }
    });
    for (auto& d : results) {
        if (d) run.detections.push_back(std::move(*d));
    }

    std::sort(run.detections.begin(), run.detections.end(),
              [](const Detection& a, const Detection& b) {
                  if (a.sentence_id != b.sentence_id) return a.sentence_id < b.sentence_id;
                  if (a.token_index != b.token_index) return a.token_index < b.token_index;
                  return a.class_id < b.class_id;
              });
    return run;
}

// ---------------------------------------------------------------------------
// Naive exhaustive baseline
// ---------------------------------------------------------------------------

enum class NaiveVariant { About, Discusses, AboutDef, DiscussesDef };

inline std::optional<NaiveVariant> naive_variant_from_string(const std::string& s) {
    if (s == "about") return NaiveVariant::About;
    if (s == "discusses") return NaiveVariant::Discusses;
    if (s == "about+def") return NaiveVariant::AboutDef;
    if (s == "discusses+def") return NaiveVariant::DiscussesDef;
    return std::nullopt;
}

namespace prompts {

inline std::string naive_boolean(NaiveVariant variant, const EventClassSpec& spec,
                                 const std::string& sentence_text) {
    const std::string topic = verb::gerund(str::to_lower(spec.verb()));
    std::string q;
    switch (variant) {
        case NaiveVariant::About:
            q = "Is the text about " + topic + "?";
            break;
        case NaiveVariant::Discusses:
            q = "Does this text discuss " + topic + "?";
            break;
        case NaiveVariant::AboutDef:
            q = "Is the text about " + topic + ", where '" + spec.name + "' is " +
                clean_definition(spec.definition) + "?";
            break;
        case NaiveVariant::DiscussesDef:
            q = "Does this text discuss " + topic + ", where '" + spec.name + "' is " +
                clean_definition(spec.definition) + "?";
            break;
    }
    return sentence_text + "\n" + q;
}

} // namespace prompts

/// One boolean query per (sentence, class) pair: |S| x |T| prompts, each
/// sampled cfg.samples times. Baseline detections carry no trigger.
inline DetectionRun exhaustive_detect(Gateway& gw, const std::vector<Sentence>& corpus,
                                      const std::map<std::string, EventClassSpec>& specs,
                                      NaiveVariant variant, const McConfig& cfg) {
    DetectionRun run;
    for (const auto& sentence : corpus) {
        for (const auto& [class_id, spec] : specs) {
            try {
                VoteResult v = gw.mc_vote(
                    {prompts::naive_boolean(variant, spec, sentence.text), Purpose::NaiveBoolean},
                    cfg);
                if (v.verdict) run.detections.push_back({sentence.id, class_id, "", -1, v});
            } catch (const BackendError& e) {
                run.warnings.push_back("baseline query failed for " + sentence.id + "/" +
                                       class_id + ": " + e.what());
            }
        }
    }
    return run;
}

} // namespace evex
