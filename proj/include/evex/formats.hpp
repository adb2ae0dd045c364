#pragma once

/**
 * JSON-lines readers/writers for every pipeline artifact, so each stage
 * can consume a hand-authored upstream file that matches the schema.
 *
 *   corpus        {doc_id, sent_index, text, doc_date?}
 *   detections    {sentence_id, class, trigger, token_index, votes{yes,no,unparseable}}
 *   pairs         {sentence_id, class, trigger, token_index, a1, a2, source_span, modality_flag}
 *   affiliations  pairs fields + {h1, h2, rebel_a1, rebel_a2, doc_date?}
 *   gold          {sentence_id, class, trigger?, a1?, a2?}
 *   role map      {"<class>": {"agent_role": ..., "patient_role": ...}, ...}
 */

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "affiliation.hpp"
#include "arguments.hpp"
#include "detection.hpp"
#include "evaluation.hpp"
#include "jsonl.hpp"
#include "tokenizer.hpp"

namespace evex::io {

using json = nlohmann::json;

// --- corpus ---

inline std::vector<Sentence> load_corpus(const std::string& path) {
    std::vector<Sentence> corpus;
    for (const auto& row : jsonl::read_file(path)) {
        corpus.push_back(make_sentence(row.at("doc_id").get<std::string>(),
                                       row.at("sent_index").get<int>(),
                                       row.at("text").get<std::string>(),
                                       row.value("doc_date", "")));
    }
    return corpus;
}

// --- detections ---

inline json detection_to_json(const Detection& d) {
    return {{"sentence_id", d.sentence_id},
            {"class", d.class_id},
            {"trigger", d.trigger},
            {"token_index", d.token_index},
            {"votes",
             {{"yes", d.votes.yes}, {"no", d.votes.no}, {"unparseable", d.votes.unparseable}}}};
}

inline void save_detections(const std::vector<Detection>& detections, const std::string& path) {
    jsonl::Writer out(path);
    for (const auto& d : detections) out.row(detection_to_json(d));
}

inline std::vector<Detection> load_detections(const std::string& path) {
    std::vector<Detection> out;
    for (const auto& row : jsonl::read_file(path)) {
        Detection d;
        d.sentence_id = row.at("sentence_id").get<std::string>();
        d.class_id = row.at("class").get<std::string>();
        d.trigger = row.value("trigger", "");
        d.token_index = row.value("token_index", -1);
        if (row.contains("votes")) {
            d.votes.yes = row["votes"].value("yes", 0);
            d.votes.no = row["votes"].value("no", 0);
            d.votes.unparseable = row["votes"].value("unparseable", 0);
            d.votes.verdict = true;  // persisted detections passed their vote
        }
        out.push_back(std::move(d));
    }
    return out;
}

// --- dyadic pairs ---

inline json pair_to_json(const DyadicArguments& p) {
    return {{"sentence_id", p.sentence_id}, {"class", p.class_id},
            {"trigger", p.trigger},         {"token_index", p.token_index},
            {"a1", p.agent},                {"a2", p.patient},
            {"source_span", p.source_span}, {"modality_flag", p.modality_flag}};
}

inline DyadicArguments pair_from_json(const json& row) {
    DyadicArguments p;
    p.sentence_id = row.at("sentence_id").get<std::string>();
    p.class_id = row.at("class").get<std::string>();
    p.trigger = row.value("trigger", "");
    p.token_index = row.value("token_index", -1);
    p.agent = row.at("a1").get<std::string>();
    p.patient = row.at("a2").get<std::string>();
    p.source_span = row.value("source_span", "");
    p.modality_flag = row.value("modality_flag", false);
    return p;
}

inline void save_pairs(const std::vector<DyadicArguments>& pairs, const std::string& path) {
    jsonl::Writer out(path);
    for (const auto& p : pairs) out.row(pair_to_json(p));
}

inline std::vector<DyadicArguments> load_pairs(const std::string& path) {
    std::vector<DyadicArguments> out;
    for (const auto& row : jsonl::read_file(path)) out.push_back(pair_from_json(row));
    return out;
}

// --- affiliated instances ---

inline json affiliation_to_json(const AffiliatedInstance& a) {
    json row = pair_to_json(a.pair);
    row["h1"] = a.h1;
    row["h2"] = a.h2;
    row["rebel_a1"] = a.rebel_a1;
    row["rebel_a2"] = a.rebel_a2;
    if (!a.doc_date.empty()) row["doc_date"] = a.doc_date;
    return row;
}

inline void save_affiliations(const std::vector<AffiliatedInstance>& instances,
                              const std::string& path) {
    jsonl::Writer out(path);
    for (const auto& a : instances) out.row(affiliation_to_json(a));
}

inline std::vector<AffiliatedInstance> load_affiliations(const std::string& path) {
    std::vector<AffiliatedInstance> out;
    for (const auto& row : jsonl::read_file(path)) {
        AffiliatedInstance a;
        a.pair = pair_from_json(row);
        a.h1 = row.value("h1", "");
        a.h2 = row.value("h2", "");
        a.rebel_a1 = row.value("rebel_a1", false);
        a.rebel_a2 = row.value("rebel_a2", false);
        a.doc_date = row.value("doc_date", "");
        out.push_back(std::move(a));
    }
    return out;
}

// --- gold ---

inline std::vector<GoldAnnotation> load_gold(const std::string& path) {
    std::vector<GoldAnnotation> out;
    for (const auto& row : jsonl::read_file(path)) {
        GoldAnnotation g;
        g.sentence_id = row.at("sentence_id").get<std::string>();
        g.class_id = row.at("class").get<std::string>();
        g.trigger = row.value("trigger", "");
        g.a1 = row.value("a1", "");
        g.a2 = row.value("a2", "");
        out.push_back(std::move(g));
    }
    return out;
}

// --- role map ---

inline RoleMap load_role_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open role map " + path);
    json doc;
    in >> doc;
    if (!doc.is_object()) throw ConfigError(path + ": role map must be a JSON object");
    RoleMap map;
    for (const auto& [class_id, pair] : doc.items()) {
        map[class_id] = {pair.value("agent_role", ""), pair.value("patient_role", "")};
    }
    return map;
}

// --- response dump (for unanimity analysis) ---

inline std::vector<std::tuple<std::string, std::string, std::string>>
load_response_dump(const std::string& path) {
    std::vector<std::tuple<std::string, std::string, std::string>> rows;
    for (const auto& row : jsonl::read_file(path)) {
        rows.emplace_back(row.value("purpose", ""), row.value("prompt_hash", ""),
                          row.value("text", ""));
    }
    return rows;
}

} // namespace evex::io
