#pragma once

/**
 * Country-affiliation detection.
 *
 * Country references come from a gazetteer (longest match over token
 * sequences, covering nouns, adjectives, acronyms, misspellings, plus
 * US-institution extensions) and, for named places the gazetteer misses,
 * from geocoding capitalized location-like spans. Country identification
 * deliberately never asks the model: only the actor-to-country
 * affiliation question does, and only when span containment has not
 * already settled it.
 */

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arguments.hpp"
#include "gateway.hpp"
#include "geocoder.hpp"
#include "tokenizer.hpp"
#include "util.hpp"

namespace evex {

struct CountryGazetteer {
    // Surfaces are token sequences joined by single spaces. Surfaces
    // written with any uppercase letter in the source file (acronyms like
    // "US", "UK") match case-sensitively so pronouns such as "us" stay
    // untouched; everything else matches on lowercased tokens.
    std::map<std::string, std::string> entries;       // lowercased key -> code
    std::map<std::string, std::string> exact_entries; // case-sensitive key -> code
    std::set<std::string> us_extension_surfaces;      // keys that are US add-ons
    std::map<std::string, std::string> code_names;    // code -> display name
    size_t max_surface_words = 1;

    std::string display_name(const std::string& code) const {
        auto it = code_names.find(code);
        return it != code_names.end() ? it->second : code;
    }

    const std::string* lookup(const std::string& window_exact,
                              const std::string& window_lower) const {
        auto cs = exact_entries.find(window_exact);
        if (cs != exact_entries.end()) return &cs->second;
        auto ci = entries.find(window_lower);
        if (ci != entries.end()) return &ci->second;
        return nullptr;
    }

    /// Reverse lookup used to join geocoder output (country display names)
    /// back onto codes.
    std::optional<std::string> code_for_surface(const std::string& surface) const {
        auto it = entries.find(str::to_lower(str::normalize_ws(surface)));
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }
};

enum class MentionSource { Gazetteer, UsExtension, Geocoded };

inline const char* to_string(MentionSource s) {
    switch (s) {
        case MentionSource::Gazetteer: return "gazetteer";
        case MentionSource::UsExtension: return "us_extension";
        case MentionSource::Geocoded: return "geocoded";
    }
    return "?";
}

struct CountryMention {
    std::string sentence_id;
    std::string surface;  // original casing from the sentence
    size_t begin = 0;
    size_t end = 0;
    std::string country_code;
    MentionSource source = MentionSource::Gazetteer;
};

struct AffiliatedInstance {
    DyadicArguments pair;
    std::string h1;  // resolved label for the agent, possibly empty
    std::string h2;  // resolved label for the patient, possibly empty
    bool rebel_a1 = false;
    bool rebel_a2 = false;
    std::string doc_date;  // carried over from the sentence for bucketing
};

namespace detail {

inline void load_tsv(const std::string& path,
                     const std::function<void(const std::string&, const std::string&)>& on_row) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (str::trim(line).empty() || line[0] == '#') continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected <field>\\t<field>");
        }
        const std::string a = str::trim(line.substr(0, tab));
        const std::string b = str::trim(line.substr(tab + 1));
        if (a.empty() || b.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty field");
        }
        on_row(a, b);
    }
}

} // namespace detail

namespace detail {

inline void add_surface(CountryGazetteer& gaz, const std::string& surface,
                        const std::string& code, bool us_extension) {
    const std::string normalized = str::normalize_ws(surface);
    const std::string lowered = str::to_lower(normalized);
    const bool has_upper =
        std::any_of(normalized.begin(), normalized.end(),
                    [](unsigned char c) { return std::isupper(c); });
    if (has_upper) {
        gaz.exact_entries[normalized] = code;
    } else {
        gaz.entries[lowered] = code;
    }
    if (us_extension) gaz.us_extension_surfaces.insert(has_upper ? normalized : lowered);
    gaz.max_surface_words = std::max(gaz.max_surface_words, str::split(lowered, ' ').size());
}

} // namespace detail

inline CountryGazetteer load_gazetteer(const std::string& surfaces_tsv,
                                       const std::string& code_names_tsv,
                                       const std::string& us_extensions_tsv = "") {
    CountryGazetteer gaz;
    detail::load_tsv(surfaces_tsv, [&](const std::string& surface, const std::string& code) {
        detail::add_surface(gaz, surface, code, false);
    });
    detail::load_tsv(code_names_tsv, [&](const std::string& code, const std::string& name) {
        gaz.code_names[code] = name;
    });
    if (!us_extensions_tsv.empty()) {
        detail::load_tsv(us_extensions_tsv,
                         [&](const std::string& surface, const std::string& code) {
                             detail::add_surface(gaz, surface, code, true);
                         });
    }
    return gaz;
}

// ---------------------------------------------------------------------------
// Location tagging (pluggable; rule-based fallback bundled)
// ---------------------------------------------------------------------------

struct LocationSpan {
    size_t first_token = 0;
    size_t last_token = 0;  // inclusive
};

class LocationTagger {
public:
    virtual ~LocationTagger() = default;
    virtual std::vector<LocationSpan> locations(const Sentence& sentence) const = 0;
};

/// Capitalized token runs. Leading function words are stripped from a run
/// so that sentence case ("The", "After") never geocodes, while a proper
/// noun opening the sentence ("Paris welcomed ...") still does.
class CapitalizedRunTagger final : public LocationTagger {
public:
    std::vector<LocationSpan> locations(const Sentence& sentence) const override {
        std::vector<LocationSpan> spans;
        const auto& tokens = sentence.tokens;
        size_t i = 0;
        while (i < tokens.size()) {
            if (!capitalized(tokens[i].text)) {
                ++i;
                continue;
            }
            size_t first = i;
            while (i + 1 < tokens.size() && capitalized(tokens[i + 1].text)) ++i;
            size_t last = i;
            while (first <= last && function_word(tokens[first].text)) ++first;
            if (first <= last) spans.push_back({first, last});
            ++i;
        }
        return spans;
    }

private:
    static bool capitalized(const std::string& t) {
        return !t.empty() && t[0] >= 'A' && t[0] <= 'Z';
    }

    static bool function_word(const std::string& t) {
        static const std::set<std::string> words = {
            "the", "a",    "an",   "in",    "on",    "at",    "by",    "to",
            "of",  "for",  "with", "from",  "after", "before", "during", "when",
            "while", "as", "and",  "but",   "or",    "so",    "yet",   "if",
            "he",  "she",  "it",   "they",  "we",    "i",     "you",   "his",
            "her", "its",  "their", "our",  "this",  "that",  "these", "those",
            "there", "here", "not", "no",   "yes",   "mr",    "mrs",   "ms",
            "dr",  "however", "meanwhile", "yesterday", "today", "tomorrow"};
        return words.count(str::to_lower(t)) > 0;
    }
};

inline std::vector<CountryMention> find_country_mentions(
    const Sentence& sentence, const CountryGazetteer& gazetteer,
    Geocoder* geocoder = nullptr, const LocationTagger* tagger = nullptr,
    std::vector<std::string>* warnings = nullptr) {
    const auto& tokens = sentence.tokens;
    std::vector<std::string> lower;
    lower.reserve(tokens.size());
    for (const auto& t : tokens) lower.push_back(str::to_lower(t.text));

    std::vector<CountryMention> mentions;
    std::vector<bool> consumed(tokens.size(), false);

    // gazetteer pass: longest surface match at each position
    for (size_t i = 0; i < tokens.size(); ++i) {
        const size_t longest = std::min(gazetteer.max_surface_words, tokens.size() - i);
        for (size_t len = longest; len >= 1; --len) {
            std::vector<std::string> exact_window, lower_window;
            for (size_t k = i; k < i + len; ++k) {
                exact_window.push_back(tokens[k].text);
                lower_window.push_back(lower[k]);
            }
            const std::string exact_key = str::join(exact_window, " ");
            const std::string lower_key = str::join(lower_window, " ");
            const std::string* code = gazetteer.lookup(exact_key, lower_key);
            if (!code) continue;

            CountryMention m;
            m.sentence_id = sentence.id;
            m.begin = tokens[i].begin;
            m.end = tokens[i + len - 1].end;
            m.surface = sentence.text.substr(m.begin, m.end - m.begin);
            m.country_code = *code;
            m.source = (gazetteer.us_extension_surfaces.count(exact_key) ||
                        gazetteer.us_extension_surfaces.count(lower_key))
                           ? MentionSource::UsExtension
                           : MentionSource::Gazetteer;
            mentions.push_back(std::move(m));
            for (size_t k = i; k < i + len; ++k) consumed[k] = true;
            i += len - 1;
            break;
        }
    }

    // geocoded pass: remaining capitalized location-like spans
    if (geocoder) {
        static const CapitalizedRunTagger fallback;
        const LocationTagger& tag = tagger ? *tagger : fallback;
        for (const auto& span : tag.locations(sentence)) {
            bool overlaps = false;
            for (size_t k = span.first_token; k <= span.last_token; ++k)
                if (consumed[k]) overlaps = true;
            if (overlaps) continue;

            const size_t begin = tokens[span.first_token].begin;
            const size_t end = tokens[span.last_token].end;
            const std::string surface = sentence.text.substr(begin, end - begin);
            std::optional<std::string> country;
            try {
                country = geocoder->top_country(surface);
            } catch (const std::exception& e) {
                if (warnings)
                    warnings->push_back("geocoder failed on '" + surface + "': " + e.what() +
                                        " (geocoded pass skipped)");
                break;  // gazetteer results still stand
            }
            if (!country) continue;
            auto code = gazetteer.code_for_surface(*country);
            if (!code) continue;  // geocoder named a country outside the gazetteer

            CountryMention m;
            m.sentence_id = sentence.id;
            m.begin = begin;
            m.end = end;
            m.surface = surface;
            m.country_code = *code;
            m.source = MentionSource::Geocoded;
            mentions.push_back(std::move(m));
        }
    }

    // dedupe by (country, span), order by first occurrence
    std::sort(mentions.begin(), mentions.end(),
              [](const CountryMention& a, const CountryMention& b) {
                  if (a.begin != b.begin) return a.begin < b.begin;
                  if (a.end != b.end) return a.end < b.end;
                  return a.country_code < b.country_code;
              });
    mentions.erase(std::unique(mentions.begin(), mentions.end(),
                               [](const CountryMention& a, const CountryMention& b) {
                                   return a.begin == b.begin && a.end == b.end &&
                                          a.country_code == b.country_code;
                               }),
                   mentions.end());
    return mentions;
}

/// Token-prefix rule for rebel-group actors ("rebel...", "insurgen...").
inline bool detect_rebel_group(const std::string& actor_span) {
    for (const auto& token : tokenize(actor_span)) {
        const std::string t = str::to_lower(token.text);
        if (str::starts_with(t, "rebel") || str::starts_with(t, "insurgen")) return true;
    }
    return false;
}

namespace prompts {

inline std::string affiliation(const std::string& sentence_text, const std::string& actor,
                               const std::string& country) {
    return sentence_text + "\nIn the text, is " + actor + " affiliated with " + country + "?";
}

} // namespace prompts

/// Containment first (mention surface inside the actor span resolves with
/// zero queries); otherwise one vote per distinct candidate country in
/// first-occurrence order, first yes wins.
inline std::optional<std::string>
resolve_affiliation(Gateway& gw, const std::string& sentence_text, const std::string& actor_span,
                    const std::vector<CountryMention>& mentions,
                    const CountryGazetteer& gazetteer, const McConfig& cfg,
                    std::vector<std::string>* warnings = nullptr) {
    for (const auto& m : mentions) {
        if (str::icontains(actor_span, m.surface)) return gazetteer.display_name(m.country_code);
    }
    std::set<std::string> asked;
    for (const auto& m : mentions) {
        if (!asked.insert(m.country_code).second) continue;
        const std::string country = gazetteer.display_name(m.country_code);
        try {
            auto vote = gw.mc_vote(
                {prompts::affiliation(sentence_text, actor_span, country), Purpose::Affiliation},
                cfg);
            if (vote.verdict) return country;
        } catch (const BackendError& e) {
            if (warnings)
                warnings->push_back("affiliation query failed for '" + actor_span + "' vs " +
                                    country + ": " + e.what());
        }
    }
    return std::nullopt;
}

struct AffiliationRun {
    std::vector<AffiliatedInstance> instances;
    std::vector<std::string> warnings;
};

inline AffiliationRun affiliate(Gateway& gw, const std::vector<DyadicArguments>& pairs,
                                const std::vector<Sentence>& corpus,
                                const CountryGazetteer& gazetteer, const McConfig& cfg,
                                Geocoder* geocoder = nullptr,
                                const LocationTagger* tagger = nullptr) {
    std::map<std::string, const Sentence*> by_id;
    for (const auto& s : corpus) by_id[s.id] = &s;

    std::map<std::string, std::vector<CountryMention>> mention_cache;
    AffiliationRun run;
    for (const auto& pair : pairs) {
        auto sent_it = by_id.find(pair.sentence_id);
        if (sent_it == by_id.end()) {
            run.warnings.push_back("pair references unknown sentence " + pair.sentence_id);
            continue;
        }
        const Sentence& sentence = *sent_it->second;
        auto cached = mention_cache.find(sentence.id);
        if (cached == mention_cache.end()) {
            cached = mention_cache
                         .emplace(sentence.id, find_country_mentions(sentence, gazetteer, geocoder,
                                                                     tagger, &run.warnings))
                         .first;
        }
        const auto& mentions = cached->second;

        AffiliatedInstance inst;
        inst.pair = pair;
        inst.doc_date = sentence.doc_date;
        inst.rebel_a1 = detect_rebel_group(pair.agent);
        inst.rebel_a2 = detect_rebel_group(pair.patient);

        auto h1 = resolve_affiliation(gw, sentence.text, pair.agent, mentions, gazetteer, cfg,
                                      &run.warnings);
        auto h2 = resolve_affiliation(gw, sentence.text, pair.patient, mentions, gazetteer, cfg,
                                      &run.warnings);
        // a rebel label only exists on top of a resolved country
        if (h1) inst.h1 = *h1 + (inst.rebel_a1 ? " (rebels)" : "");
        if (h2) inst.h2 = *h2 + (inst.rebel_a2 ? " (rebels)" : "");
        run.instances.push_back(std::move(inst));
    }
    return run;
}

} // namespace evex
