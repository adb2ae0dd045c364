#pragma once

/**
 * Candidate trigger lexicons. An event class description (name,
 * definition, keywords) is expanded into surface forms: inflections,
 * noun and verb forms, and Monte Carlo synonym sets of each: then
 * stemmed and deduplicated into the class's trigger-stem set. Built once
 * per class, independent of corpus size, and serialized to JSON.
 */

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gateway.hpp"
#include "parsers.hpp"
#include "stemmer.hpp"
#include "util.hpp"

namespace evex {

struct EventClassSpec {
    std::string id;
    std::string name;        // single- or multi-word
    std::string definition;  // one sentence
    std::vector<std::string> keywords;
    std::string verb_form;   // optional, may carry a trailing preposition

    void validate() const {
        if (id.empty()) throw ConfigError("event class needs an id");
        if (name.empty()) throw ConfigError("event class '" + id + "' needs a name");
        if (definition.empty())
            throw ConfigError("event class '" + id + "' needs a definition");
    }

    /// The verb used in role questions; the name doubles as the verb when
    /// no explicit form is given.
    const std::string& verb() const { return verb_form.empty() ? name : verb_form; }
};

enum class ExpansionKind { Inflection, NounForm, VerbForm, Synonym };

inline const char* to_string(ExpansionKind k) {
    switch (k) {
        case ExpansionKind::Inflection: return "inflection";
        case ExpansionKind::NounForm: return "noun_form";
        case ExpansionKind::VerbForm: return "verb_form";
        case ExpansionKind::Synonym: return "synonym";
    }
    return "?";
}

inline ExpansionKind expansion_kind_from_string(const std::string& s) {
    if (s == "inflection") return ExpansionKind::Inflection;
    if (s == "noun_form") return ExpansionKind::NounForm;
    if (s == "verb_form") return ExpansionKind::VerbForm;
    if (s == "synonym") return ExpansionKind::Synonym;
    throw ConfigError("unknown expansion kind: " + s);
}

struct StemProvenance {
    std::string source_term;  // the class name or the keyword it came from
    ExpansionKind kind = ExpansionKind::Inflection;
};

struct TriggerStemSet {
    std::string class_id;
    std::set<std::string> stems;
    std::map<std::string, StemProvenance> provenance;  // first writer wins
    McConfig mc_used;

    void add(const std::string& surface, const std::string& source_term, ExpansionKind kind) {
        const std::string s = snowball::stem_phrase(surface);
        if (s.empty()) return;
        stems.insert(s);
        provenance.emplace(s, StemProvenance{source_term, kind});
    }
};

namespace prompts {

inline std::string clean_definition(std::string def) {
    def = str::trim(def);
    while (!def.empty() && def.back() == '.') def.pop_back();
    return def;
}

inline std::string listing(const std::string& what, const std::string& term,
                           const std::string& definition) {
    std::string p = "List " + what + " of '" + term + "' in bullet points";
    const std::string def = clean_definition(definition);
    if (!def.empty()) p += ", where '" + term + "' means " + def;
    p += ".";
    return p;
}

inline std::string synonyms(const std::string& term, const std::string& definition = "") {
    return listing("synonyms", term, definition);
}
inline std::string inflections(const std::string& term, const std::string& definition) {
    return listing("inflections", term, definition);
}
inline std::string noun_forms(const std::string& term, const std::string& definition) {
    return listing("noun forms", term, definition);
}
inline std::string verb_forms(const std::string& term, const std::string& definition) {
    return listing("verb forms", term, definition);
}

} // namespace prompts

/// All surface forms for one term: the term, its inflections, noun and
/// verb forms, and the MC-union synonym set of each of those forms.
inline std::set<std::string> expand_term(Gateway& gw, const std::string& term,
                                         const std::string& definition, const McConfig& cfg,
                                         std::map<std::string, ExpansionKind>* kinds = nullptr) {
    if (term.empty()) throw ConfigError("cannot expand an empty term");
    auto parse = [](const std::string& s) { return parse::bullet_list(s); };
    auto note = [&](const std::string& form, ExpansionKind kind) {
        if (kinds) kinds->emplace(form, kind);
    };

    const std::string base = str::to_lower(str::trim(term));
    std::set<std::string> forms{base};
    note(base, ExpansionKind::Inflection);

    auto grow = [&](Purpose purpose, const std::string& text, ExpansionKind kind) {
        auto got = gw.mc_union({text, purpose}, cfg, parse);
        for (const auto& item : got.values) {
            forms.insert(item);
            note(item, kind);
        }
    };
    grow(Purpose::Inflection, prompts::inflections(base, definition), ExpansionKind::Inflection);
    grow(Purpose::Wordform, prompts::noun_forms(base, definition), ExpansionKind::NounForm);
    grow(Purpose::Wordform, prompts::verb_forms(base, definition), ExpansionKind::VerbForm);

    std::set<std::string> out = forms;
    for (const auto& form : forms) {
        auto syn = gw.mc_union({prompts::synonyms(form, definition), Purpose::Synonym}, cfg, parse);
        for (const auto& item : syn.values) {
            out.insert(item);
            note(item, ExpansionKind::Synonym);
        }
    }
    return out;
}

inline TriggerStemSet build_trigger_set(Gateway& gw, const EventClassSpec& spec,
                                        const McConfig& cfg) {
    spec.validate();
    TriggerStemSet set;
    set.class_id = spec.id;
    set.mc_used = cfg;

    auto expand_into = [&](const std::string& source_term) {
        std::map<std::string, ExpansionKind> kinds;
        auto surfaces = expand_term(gw, source_term, spec.definition, cfg, &kinds);
        for (const auto& surface : surfaces) {
            auto it = kinds.find(surface);
            const ExpansionKind kind =
                it != kinds.end() ? it->second : ExpansionKind::Synonym;
            set.add(surface, source_term, kind);
        }
    };
    expand_into(spec.name);
    for (const auto& keyword : spec.keywords) expand_into(keyword);
    return set;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

inline std::vector<EventClassSpec> load_event_classes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open event class file " + path);
    nlohmann::json doc;
    in >> doc;
    if (!doc.is_array()) throw ConfigError(path + ": expected a JSON array of classes");
    std::vector<EventClassSpec> specs;
    for (const auto& row : doc) {
        EventClassSpec s;
        s.id = row.value("id", "");
        s.name = row.value("name", "");
        s.definition = row.value("definition", "");
        if (row.contains("keywords"))
            s.keywords = row.at("keywords").get<std::vector<std::string>>();
        s.verb_form = row.value("verb_form", "");
        s.validate();
        specs.push_back(std::move(s));
    }
    return specs;
}

inline nlohmann::json lexicon_to_json(const TriggerStemSet& set) {
    nlohmann::json prov = nlohmann::json::object();
    for (const auto& [stem, p] : set.provenance) {
        prov[stem] = {{"source", p.source_term}, {"kind", to_string(p.kind)}};
    }
    return {{"class_id", set.class_id},
            {"stems", std::vector<std::string>(set.stems.begin(), set.stems.end())},
            {"provenance", prov},
            {"mc", {{"temperature", set.mc_used.temperature}, {"samples", set.mc_used.samples}}}};
}

inline TriggerStemSet lexicon_from_json(const nlohmann::json& doc) {
    TriggerStemSet set;
    set.class_id = doc.at("class_id").get<std::string>();
    for (const auto& s : doc.at("stems")) set.stems.insert(s.get<std::string>());
    if (doc.contains("provenance")) {
        for (const auto& [stem, p] : doc.at("provenance").items()) {
            set.provenance[stem] = {p.value("source", ""),
                                    expansion_kind_from_string(p.value("kind", "synonym"))};
        }
    }
    if (doc.contains("mc")) {
        set.mc_used.temperature = doc["mc"].value("temperature", 0.0);
        set.mc_used.samples = doc["mc"].value("samples", 1);
    }
    return set;
}

inline void save_lexicon(const TriggerStemSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write lexicon " + path);
    out << lexicon_to_json(set).dump(2) << "\n";
}

inline TriggerStemSet load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon " + path);
    nlohmann::json doc;
    in >> doc;
    return lexicon_from_json(doc);
}

} // namespace evex
