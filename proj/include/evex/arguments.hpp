#pragma once

/**
 * Dyadic argument extraction.
 *
 * Sentences carrying detections are optionally normalized for modality
 * (hypotheticals rewritten to past tense), split into one span per event
 * instance when a class fired more than once, then queried with paired
 * agent/patient questions. An answer only counts when it is literally a
 * phrase of the queried span; instances that fail to resolve both roles
 * are dropped (actor pairs only).
 */

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "detection.hpp"
#include "gateway.hpp"
#include "lexicon.hpp"
#include "tokenizer.hpp"
#include "util.hpp"
#include "verb_morphology.hpp"

namespace evex {

struct ModalityResult {
    bool has_hypothetical = false;
    std::string normalized_text;  // equals the original when the flag is false
};

struct RoleQueries {
    std::string agent_q;    // "Who injures?"
    std::string patient_q;  // "Who is injured?"
};

struct DyadicArguments {
    std::string sentence_id;
    std::string class_id;
    std::string trigger;
    int token_index = -1;
    std::string agent;        // a1
    std::string patient;      // a2
    std::string source_span;  // the (possibly split / rewritten) text queried
    bool modality_flag = false;
};

enum class ModalityPolicy { Normalize, PastOnly, IncludeFuture };

inline std::optional<ModalityPolicy> modality_policy_from_string(const std::string& s) {
    if (s == "normalize") return ModalityPolicy::Normalize;
    if (s == "past-only" || s == "past_only") return ModalityPolicy::PastOnly;
    if (s == "include-future" || s == "include_future") return ModalityPolicy::IncludeFuture;
    return std::nullopt;
}

inline const char* to_string(ModalityPolicy p) {
    switch (p) {
        case ModalityPolicy::Normalize: return "normalize";
        case ModalityPolicy::PastOnly: return "past-only";
        case ModalityPolicy::IncludeFuture: return "include-future";
    }
    return "?";
}

namespace prompts {

inline std::string modality_check(const std::string& text) {
    return "Does the text contain hypothetical or intended (not yet realized) events? " + text;
}

inline std::string modality_rewrite(const std::string& text) {
    return "Rewrite the text so that hypothetical or intended events are stated in past "
           "tense, as if they had occurred. Output only the rewritten text.\n" +
           text;
}

inline std::string instance_split(const std::string& text, const EventClassSpec& spec,
                                  int count) {
    return "The text describes " + std::to_string(count) + " instances of '" + spec.name +
           "'. Split the text into " + std::to_string(count) +
           " spans, one per instance, in bullet points. Each span must be an exact "
           "substring of the text.\n" +
           text;
}

inline std::string extractive_qa(const std::string& span, const std::string& question,
                                 const EventClassSpec& spec) {
    std::string p = span + "\n" + question;
    const std::string def = clean_definition(spec.definition);
    if (!def.empty()) p += " where '" + spec.name + "' means " + def + ".";
    p += " Answer with an exact phrase from the text, or 'none'.";
    return p;
}

} // namespace prompts

inline bool detect_modality(Gateway& gw, const std::string& sentence_text, const McConfig& cfg) {
    return gw.mc_vote({prompts::modality_check(sentence_text), Purpose::ModalityCheck}, cfg)
        .verdict;
}

/// Single deterministic rewrite (temperature 0, first sample). An empty
/// rewrite falls back to the original text.
inline std::string normalize_modality(Gateway& gw, const std::string& sentence_text,
                                      const McConfig& cfg) {
    McConfig rewrite_cfg = cfg;
    rewrite_cfg.temperature = 0.0;
    rewrite_cfg.samples = 1;
    auto batch =
        gw.complete({prompts::modality_rewrite(sentence_text), Purpose::ModalityRewrite},
                    rewrite_cfg);
    const std::string rewritten = str::trim(batch.raw_texts.front());
    return rewritten.empty() ? sentence_text : rewritten;
}

struct SplitOutcome {
    std::vector<std::string> spans;
    std::vector<std::string> warnings;
};

/// One span per instance of the class. A single instance is the identity -
/// no query. Spans that are not substrings of the text are dropped; the
/// full text backstops any instance left without a span.
inline SplitOutcome split_instances(Gateway& gw, const std::string& sentence_text,
                                    const EventClassSpec& spec, int trigger_count,
                                    const McConfig& cfg) {
    SplitOutcome out;
    if (trigger_count <= 1) {
        out.spans.push_back(sentence_text);
        return out;
    }
    McConfig split_cfg = cfg;
    split_cfg.temperature = 0.0;
    split_cfg.samples = 1;
    auto batch = gw.complete(
        {prompts::instance_split(sentence_text, spec, trigger_count), Purpose::InstanceSplit},
        split_cfg);
    auto parsed = parse::span_list(batch.raw_texts.front());
    if (!parsed) {
        out.warnings.push_back("unparseable split for '" + spec.id + "', using full sentence");
        out.spans.assign(static_cast<size_t>(trigger_count), sentence_text);
        return out;
    }
    for (const auto& span : *parsed) {
        if (sentence_text.find(span) != std::string::npos) {
            out.spans.push_back(span);
        } else {
            out.warnings.push_back("split span not a substring, dropped: " + span);
        }
    }
    while (out.spans.size() < static_cast<size_t>(trigger_count))
        out.spans.push_back(sentence_text);
    return out;
}

/// "Who <verb>s?" / "Who is <verb>ed [preposition]?" with orthographic
/// adjustments; the irregular-forms table overrides suffixing.
inline RoleQueries build_role_queries(const EventClassSpec& spec) {
    static const std::set<std::string> prepositions = {
        "against", "with", "to", "for", "on", "at", "from", "of", "about", "into", "over"};

    auto words = str::split(str::normalize_ws(str::to_lower(spec.verb())), ' ');
    std::string preposition;
    if (words.size() >= 2 && prepositions.count(words.back())) {
        preposition = words.back();
        words.pop_back();
    }
    const std::string head = words.front();
    std::string rest;
    for (size_t i = 1; i < words.size(); ++i) rest += " " + words[i];

    RoleQueries q;
    q.agent_q = "Who " + verb::third_person(head) + rest + "?";
    q.patient_q = "Who is " + verb::past_participle(head) + rest +
                  (preposition.empty() ? "" : " " + preposition) + "?";
    return q;
}

namespace detail {

struct RoleAnswer {
    std::string span_text;   // exact substring of the span
    std::string normalized;  // casefolded, whitespace-collapsed
};

/// Plurality over validated answers with substring clustering: answers in
/// a substring relation vote together; the winner is the answer with the
/// heaviest cluster, own count, then length breaking ties.
inline std::optional<RoleAnswer> vote_role(Gateway& gw, const std::string& span,
                                           const std::string& question,
                                           const EventClassSpec& spec, Purpose purpose,
                                           const McConfig& cfg) {
    auto batch = gw.complete({prompts::extractive_qa(span, question, spec), purpose}, cfg);

    std::map<std::string, int> counts;            // normalized -> votes
    std::map<std::string, std::string> surface;   // normalized -> exact span text
    for (const auto& raw : batch.raw_texts) {
        auto answer = parse::extractive(raw);
        if (!answer || answer->empty()) continue;
        const size_t at = str::ifind(span, *answer);
        if (at == std::string::npos) continue;  // not a phrase of the text
        const std::string exact = span.substr(at, answer->size());
        const std::string normalized = str::to_lower(str::normalize_ws(exact));
        ++counts[normalized];
        surface.emplace(normalized, exact);
    }
    if (counts.empty()) return std::nullopt;

    std::string best;
    long best_weight = -1;
    int best_own = -1;
    for (const auto& [candidate, own] : counts) {
        long weight = 0;
        for (const auto& [other, votes] : counts) {
            if (candidate.find(other) != std::string::npos ||
                other.find(candidate) != std::string::npos) {
                weight += votes;
            }
        }
        const bool wins = weight > best_weight ||
                          (weight == best_weight && own > best_own) ||
                          (weight == best_weight && own == best_own &&
                           candidate.size() > best.size());
        if (wins) {
            best = candidate;
            best_weight = weight;
            best_own = own;
        }
    }
    return RoleAnswer{surface[best], best};
}

} // namespace detail

/// Paired extractive queries for one span; both roles must resolve.
inline std::optional<DyadicArguments> extract_pair(Gateway& gw, const std::string& span,
                                                   const EventClassSpec& spec,
                                                   const RoleQueries& queries,
                                                   const McConfig& cfg) {
    if (str::trim(span).empty()) throw ConfigError("cannot extract from an empty span");
    auto agent = detail::vote_role(gw, span, queries.agent_q, spec, Purpose::AgentQa, cfg);
    auto patient = detail::vote_role(gw, span, queries.patient_q, spec, Purpose::PatientQa, cfg);
    if (!agent || !patient) return std::nullopt;

    DyadicArguments pair;
    pair.class_id = spec.id;
    pair.agent = agent->span_text;
    pair.patient = patient->span_text;
    pair.source_span = span;
    return pair;
}

struct ExtractionRun {
    std::vector<DyadicArguments> pairs;
    std::vector<std::string> warnings;
};

namespace detail {

struct SentenceWork {
    const Sentence* sentence = nullptr;
    std::vector<const Detection*> detections;
};

/// Full per-sentence flow: modality policy, per-class instance splitting,
/// paired extraction. Modality work happens once per sentence and is
/// shared by all its detections.
inline void extract_for_sentence(Gateway& gw, const SentenceWork& work,
                                 const std::map<std::string, EventClassSpec>& specs,
                                 const McConfig& cfg, ModalityPolicy policy,
                                 std::vector<DyadicArguments>& pairs,
                                 std::vector<std::string>& warnings) {
    const Sentence& sentence = *work.sentence;

    bool flagged = false;
    std::string text = sentence.text;
    if (policy != ModalityPolicy::IncludeFuture) {
        try {
            flagged = detect_modality(gw, sentence.text, cfg);
        } catch (const BackendError& e) {
            warnings.push_back("modality check failed for " + sentence.id + ": " + e.what() +
                               " (proceeding unnormalized)");
            flagged = false;
        }
        if (flagged) {
            if (policy == ModalityPolicy::PastOnly) return;  // drop hypotheticals
            text = normalize_modality(gw, sentence.text, cfg);
        }
    }

    std::map<std::string, std::vector<const Detection*>> by_class;
    for (const auto* d : work.detections) by_class[d->class_id].push_back(d);

    for (auto& [class_id, class_dets] : by_class) {
        auto spec_it = specs.find(class_id);
        if (spec_it == specs.end()) {
            warnings.push_back("no spec for class " + class_id);
            continue;
        }
        const EventClassSpec& spec = spec_it->second;
        std::sort(class_dets.begin(), class_dets.end(),
                  [](const Detection* a, const Detection* b) {
                      return a->token_index < b->token_index;
                  });

        auto split = split_instances(gw, text, spec, static_cast<int>(class_dets.size()), cfg);
        warnings.insert(warnings.end(), split.warnings.begin(), split.warnings.end());

        const RoleQueries queries = build_role_queries(spec);
        for (size_t i = 0; i < class_dets.size(); ++i) {
            const std::string& span = i < split.spans.size() ? split.spans[i] : text;
            try {
                auto pair = extract_pair(gw, span, spec, queries, cfg);
                if (!pair) continue;  // kept as detection-only
                pair->sentence_id = sentence.id;
                pair->trigger = class_dets[i]->trigger;
                pair->token_index = class_dets[i]->token_index;
                pair->modality_flag = flagged;
                pairs.push_back(std::move(*pair));
            } catch (const BackendError& e) {
                warnings.push_back("extraction failed for " + sentence.id + "/" + class_id +
                                   ": " + e.what());
            }
        }
    }
}

} // namespace detail

inline ExtractionRun extract(Gateway& gw, const std::vector<Detection>& detections,
                             const std::vector<Sentence>& corpus,
                             const std::map<std::string, EventClassSpec>& specs,
                             const McConfig& cfg,
                             ModalityPolicy policy = ModalityPolicy::Normalize,
                             int workers = 1) {
    std::map<std::string, const Sentence*> by_id;
    for (const auto& s : corpus) by_id[s.id] = &s;

    ExtractionRun run;
    std::map<std::string, detail::SentenceWork> by_sentence;
    for (const auto& d : detections) {
        auto sent_it = by_id.find(d.sentence_id);
        if (sent_it == by_id.end()) {
            run.warnings.push_back("detection references unknown sentence " + d.sentence_id);
            continue;
        }
        auto& w = by_sentence[d.sentence_id];
        w.sentence = sent_it->second;
        w.detections.push_back(&d);
    }

    std::vector<const detail::SentenceWork*> work;
    work.reserve(by_sentence.size());
    for (const auto& [sid, w] : by_sentence) work.push_back(&w);

    std::vector<std::vector<DyadicArguments>> pair_chunks(work.size());
    std::vector<std::vector<std::string>> warning_chunks(work.size());
    parallel_for_index(work.size(), workers, [&](size_t i) {
        detail::extract_for_sentence(gw, *work[i], specs, cfg, policy, pair_chunks[i],
                                     warning_chunks[i]);
    });
    for (size_t i = 0; i < work.size(); ++i) {
        std::move(pair_chunks[i].begin(), pair_chunks[i].end(), std::back_inserter(run.pairs));
        run.warnings.insert(run.warnings.end(), warning_chunks[i].begin(),
                            warning_chunks[i].end());
    }

    std::sort(run.pairs.begin(), run.pairs.end(),
              [](const DyadicArguments& a, const DyadicArguments& b) {
                  if (a.sentence_id != b.sentence_id) return a.sentence_id < b.sentence_id;
                  if (a.token_index != b.token_index) return a.token_index < b.token_index;
                  return a.class_id < b.class_id;
              });
    return run;
}

} // namespace evex
