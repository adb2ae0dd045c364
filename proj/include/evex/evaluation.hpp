#pragma once

/**
 * Scoring and analysis.
 *
 * Micro-F1 for event detection (correct class in the right sentence) and
 * dyadic extraction (class plus both actors); query-efficiency ratios
 * against the hypothetical exhaustive baseline, computed from the ledger;
 * dyadic event-frequency graphs with time bucketing; and the
 * boolean-unanimity statistic over a response dump.
 */

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "affiliation.hpp"
#include "arguments.hpp"
#include "detection.hpp"
#include "gateway.hpp"
#include "parsers.hpp"
#include "util.hpp"

namespace evex {

struct GoldAnnotation {
    std::string sentence_id;
    std::string class_id;
    std::string trigger;  // optional
    std::string a1;       // optional; dyadic rows carry both actors
    std::string a2;
};

struct RolePair {
    std::string agent_role;
    std::string patient_role;
};

/// Gold role-pair -> (agent, patient) assignment per class; classes
/// absent from the map are excluded from dyadic scoring.
using RoleMap = std::map<std::string, RolePair>;

struct ClassCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

struct ScoreReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
    std::map<std::string, ClassCounts> per_class;
    long ignored_rows = 0;  // pred rows skipped (e.g. unmapped classes)
    std::vector<std::string> warnings;

    void finalize() {
        tp = fp = fn = 0;
        for (const auto& [cls, c] : per_class) {
            tp += c.tp;
            fp += c.fp;
            fn += c.fn;
        }
        precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    }
};

namespace detail {

/// Multiset-min scoring over an arbitrary key: per key,
/// TP = min(pred, gold), FP/FN from the remainders.
template <typename Key>
inline void count_multiset(const std::map<Key, std::pair<long, long>>& key_counts,
                           const std::function<std::string(const Key&)>& class_of,
                           ScoreReport& report) {
    for (const auto& [key, counts] : key_counts) {
        auto& c = report.per_class[class_of(key)];
        const long tp = std::min(counts.first, counts.second);
        c.tp += tp;
        c.fp += counts.first - tp;
        c.fn += counts.second - tp;
    }
}

} // namespace detail

inline ScoreReport score_detection(const std::vector<Detection>& pred,
                                   const std::vector<GoldAnnotation>& gold) {
    using Key = std::pair<std::string, std::string>;  // (sentence, class)
    std::map<Key, std::pair<long, long>> counts;      // pred, gold
    std::set<std::string> gold_sentences;
    for (const auto& g : gold) {
        ++counts[{g.sentence_id, g.class_id}].second;
        gold_sentences.insert(g.sentence_id);
    }
    ScoreReport report;
    for (const auto& p : pred) {
        ++counts[{p.sentence_id, p.class_id}].first;
        if (!gold_sentences.count(p.sentence_id)) {
            report.warnings.push_back("pred sentence unknown to gold: " + p.sentence_id);
        }
    }
    detail::count_multiset<Key>(counts, [](const Key& k) { return k.second; }, report);
    report.finalize();
    return report;
}

enum class ActorMatchPolicy { Exact, HeadOverlap };

namespace detail {

inline std::string normalize_actor(const std::string& s) {
    auto words = str::split(str::normalize_ws(str::to_lower(s)), ' ');
    size_t skip = 0;
    while (skip < words.size() &&
           (words[skip] == "the" || words[skip] == "a" || words[skip] == "an"))
        ++skip;
    std::vector<std::string> rest(words.begin() + static_cast<long>(skip), words.end());
    if (rest.empty()) return str::to_lower(str::normalize_ws(s));
    return str::join(rest, " ");
}

inline std::string actor_key(const std::string& s, ActorMatchPolicy policy) {
    const std::string norm = normalize_actor(s);
    if (policy == ActorMatchPolicy::Exact) return norm;
    auto words = str::split(norm, ' ');
    return words.empty() ? norm : words.back();  // head word
}

} // namespace detail

/// Dyadic scoring: a true positive needs the class and both actors right.
/// Works for both plain pairs and affiliated instances (same pair core).
inline ScoreReport score_dyadic(const std::vector<DyadicArguments>& pred,
                                const std::vector<GoldAnnotation>& gold,
                                const RoleMap& role_map,
                                ActorMatchPolicy policy = ActorMatchPolicy::Exact) {
    using Key = std::tuple<std::string, std::string, std::string, std::string>;
    std::map<Key, std::pair<long, long>> counts;

    ScoreReport report;
    for (const auto& g : gold) {
        if (!role_map.count(g.class_id)) continue;  // unmapped classes are out of scope
        ++counts[{g.sentence_id, g.class_id, detail::actor_key(g.a1, policy),
                  detail::actor_key(g.a2, policy)}]
              .second;
    }
    for (const auto& p : pred) {
        if (!role_map.count(p.class_id)) {
            ++report.ignored_rows;
            continue;
        }
        ++counts[{p.sentence_id, p.class_id, detail::actor_key(p.agent, policy),
                  detail::actor_key(p.patient, policy)}]
              .first;
    }
    detail::count_multiset<Key>(counts, [](const Key& k) { return std::get<1>(k); }, report);
    report.finalize();
    return report;
}

// ---------------------------------------------------------------------------
// Efficiency accounting
// ---------------------------------------------------------------------------

struct EfficiencyReport {
    long pipeline_draws = 0;    // boolean disambiguation draws actually made
    long exhaustive_draws = 0;  // |S| x |T| x samples
    double ratio_percent = 0.0;
    std::map<std::string, long> by_purpose;  // whole-ledger breakdown
};

inline EfficiencyReport efficiency_report(const std::vector<LedgerEntry>& ledger,
                                          long corpus_size, long class_count, long samples) {
    EfficiencyReport rep;
    for (const auto& e : ledger) {
        ++rep.by_purpose[e.purpose];
        if (e.purpose == to_string(Purpose::Disambiguation)) ++rep.pipeline_draws;
    }
    rep.exhaustive_draws = corpus_size * class_count * samples;
    rep.ratio_percent = rep.exhaustive_draws > 0
                            ? 100.0 * static_cast<double>(rep.pipeline_draws) /
                                  static_cast<double>(rep.exhaustive_draws)
                            : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Dyadic event-frequency graph
// ---------------------------------------------------------------------------

enum class TimeBucketing { Year, Month, None };

inline std::optional<TimeBucketing> bucketing_from_string(const std::string& s) {
    if (s == "year") return TimeBucketing::Year;
    if (s == "month") return TimeBucketing::Month;
    if (s == "none") return TimeBucketing::None;
    return std::nullopt;
}

struct DyadGraph {
    // (h1, h2, class, bucket) -> count; direction is agent -> patient
    std::map<std::tuple<std::string, std::string, std::string, std::string>, long> edges;
    long excluded = 0;  // instances lacking either affiliation
};

inline std::string time_bucket(const std::string& doc_date, TimeBucketing bucketing) {
    if (bucketing == TimeBucketing::None || doc_date.empty()) return "";
    if (bucketing == TimeBucketing::Year) return doc_date.substr(0, std::min<size_t>(4, doc_date.size()));
    return doc_date.substr(0, std::min<size_t>(7, doc_date.size()));
}

inline DyadGraph aggregate_graph(const std::vector<AffiliatedInstance>& instances,
                                 TimeBucketing bucketing) {
    DyadGraph graph;
    for (const auto& inst : instances) {
        if (inst.h1.empty() || inst.h2.empty()) {
            ++graph.excluded;
            continue;
        }
        ++graph.edges[{inst.h1, inst.h2, inst.pair.class_id,
                       time_bucket(inst.doc_date, bucketing)}];
    }
    return graph;
}

inline void export_edges(const DyadGraph& graph, std::ostream& out) {
    out << "h1,h2,class,bucket,count\n";
    auto csv_field = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += "\"\"";
            else quoted += c;
        }
        quoted += "\"";
        return quoted;
    };
    for (const auto& [key, count] : graph.edges) {
        out << csv_field(std::get<0>(key)) << "," << csv_field(std::get<1>(key)) << ","
            << csv_field(std::get<2>(key)) << "," << csv_field(std::get<3>(key)) << ","
            << count << "\n";
    }
}

inline void export_edges(const DyadGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write edge list " + path);
    export_edges(graph, out);
}

// ---------------------------------------------------------------------------
// Boolean unanimity over a response dump
// ---------------------------------------------------------------------------

struct UnanimityReport {
    long groups = 0;                    // boolean prompts with >= 2 samples
    double proportion_unanimous = 0.0;  // groups whose samples all agree
    std::map<int, long> minority_histogram;  // #samples differing from the mode
};

/// `rows` are (purpose, prompt_hash, text) triples from a response dump;
/// only boolean purposes participate.
inline UnanimityReport
unanimity_report(const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
    static const std::set<std::string> boolean_purposes = {
        to_string(Purpose::Disambiguation), to_string(Purpose::ModalityCheck),
        to_string(Purpose::Affiliation), to_string(Purpose::NaiveBoolean)};

    std::map<std::string, std::map<std::string, long>> tallies;  // hash -> label -> count
    for (const auto& [purpose, hash, text] : rows) {
        if (!boolean_purposes.count(purpose)) continue;
        std::string label;
        switch (parse::boolean(text)) {
            case parse::Answer::Yes: label = "yes"; break;
            case parse::Answer::No: label = "no"; break;
            case parse::Answer::Unparseable: label = "?"; break;
        }
        ++tallies[hash][label];
    }

    UnanimityReport rep;
    long unanimous = 0;
    for (const auto& [hash, by_label] : tallies) {
        long total = 0, mode = 0;
        for (const auto& [label, count] : by_label) {
            total += count;
            mode = std::max(mode, count);
        }
        if (total < 2) continue;  // unanimity is undefined for single draws
        ++rep.groups;
        const int minority = static_cast<int>(total - mode);
        ++rep.minority_histogram[minority];
        if (minority == 0) ++unanimous;
    }
    rep.proportion_unanimous =
        rep.groups > 0 ? static_cast<double>(unanimous) / static_cast<double>(rep.groups) : 0.0;
    return rep;
}

} // namespace evex
