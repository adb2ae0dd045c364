#include <catch2/catch.hpp>

#include <evex/evaluation.hpp>

#include <random>
#include <sstream>

#include "helpers.hpp"

using namespace evex;

namespace {

Detection det(const std::string& sid, const std::string& cls) {
    Detection d;
    d.sentence_id = sid;
    d.class_id = cls;
    return d;
}

GoldAnnotation gold_row(const std::string& sid, const std::string& cls,
                        const std::string& a1 = "", const std::string& a2 = "") {
    GoldAnnotation g;
    g.sentence_id = sid;
    g.class_id = cls;
    g.a1 = a1;
    g.a2 = a2;
    return g;
}

DyadicArguments pair_row(const std::string& sid, const std::string& cls, const std::string& a1,
                         const std::string& a2) {
    DyadicArguments p;
    p.sentence_id = sid;
    p.class_id = cls;
    p.agent = a1;
    p.patient = a2;
    return p;
}

/// Brute-force detection scorer: per (sentence, class) multiset min.
ScoreReport oracle_detection(const std::vector<Detection>& pred,
                             const std::vector<GoldAnnotation>& gold) {
    ScoreReport rep;
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& p : pred) keys.insert({p.sentence_id, p.class_id});
    for (const auto& g : gold) keys.insert({g.sentence_id, g.class_id});
    for (const auto& [sid, cls] : keys) {
        long np = 0, ng = 0;
        for (const auto& p : pred)
            if (p.sentence_id == sid && p.class_id == cls) ++np;
        for (const auto& g : gold)
            if (g.sentence_id == sid && g.class_id == cls) ++ng;
        auto& c = rep.per_class[cls];
        c.tp += std::min(np, ng);
        c.fp += np - std::min(np, ng);
        c.fn += ng - std::min(np, ng);
    }
    rep.finalize();
    return rep;
}

std::string oracle_norm(const std::string& s, ActorMatchPolicy policy) {
    auto words = evex::str::split(evex::str::normalize_ws(evex::str::to_lower(s)), ' ');
    while (!words.empty() && (words[0] == "the" || words[0] == "a" || words[0] == "an"))
        words.erase(words.begin());
    if (words.empty()) return evex::str::to_lower(evex::str::normalize_ws(s));
    if (policy == ActorMatchPolicy::HeadOverlap) return words.back();
    return evex::str::join(words, " ");
}

/// Brute-force dyadic scorer: greedy one-to-one matching over equal keys.
ScoreReport oracle_dyadic(const std::vector<DyadicArguments>& pred,
                          const std::vector<GoldAnnotation>& gold, const RoleMap& role_map,
                          ActorMatchPolicy policy) {
    ScoreReport rep;
    std::vector<bool> gold_used(gold.size(), false);
    for (const auto& p : pred) {
        if (!role_map.count(p.class_id)) {
            ++rep.ignored_rows;
            continue;
        }
        bool matched = false;
        for (size_t i = 0; i < gold.size(); ++i) {
            if (gold_used[i] || !role_map.count(gold[i].class_id)) continue;
            if (gold[i].sentence_id == p.sentence_id && gold[i].class_id == p.class_id &&
                oracle_norm(gold[i].a1, policy) == oracle_norm(p.agent, policy) &&
                oracle_norm(gold[i].a2, policy) == oracle_norm(p.patient, policy)) {
                gold_used[i] = true;
                matched = true;
                break;
            }
        }
        if (matched) ++rep.per_class[p.class_id].tp;
        else ++rep.per_class[p.class_id].fp;
    }
    for (size_t i = 0; i < gold.size(); ++i) {
        if (!gold_used[i] && role_map.count(gold[i].class_id))
            ++rep.per_class[gold[i].class_id].fn;
    }
    rep.finalize();
    return rep;
}

} // namespace

TEST_CASE("identical pred and gold score a perfect 1.0") {
    std::vector<GoldAnnotation> gold = {gold_row("s:0", "attack"), gold_row("s:1", "injure"),
                                        gold_row("s:1", "attack")};
    std::vector<Detection> pred = {det("s:0", "attack"), det("s:1", "injure"),
                                   det("s:1", "attack")};
    auto rep = score_detection(pred, gold);
    CHECK(rep.precision == 1.0);
    CHECK(rep.recall == 1.0);
    CHECK(rep.f1 == 1.0);
}

TEST_CASE("empty predictions score zero with F1 defined as 0") {
    auto rep = score_detection({}, {gold_row("s:0", "attack")});
    CHECK(rep.f1 == 0.0);
    CHECK(rep.fn == 1);
}

TEST_CASE("duplicate detections count against one gold at most once") {
    std::vector<GoldAnnotation> gold = {gold_row("s:0", "attack")};
    std::vector<Detection> pred = {det("s:0", "attack"), det("s:0", "attack")};
    auto rep = score_detection(pred, gold);
    CHECK(rep.tp == 1);
    CHECK(rep.fp == 1);
    CHECK(rep.fn == 0);
}

TEST_CASE("unknown pred sentence ids count as FP and warn") {
    auto rep = score_detection({det("ghost:9", "attack")}, {gold_row("s:0", "attack")});
    CHECK(rep.fp == 1);
    CHECK(rep.fn == 1);
    REQUIRE_FALSE(rep.warnings.empty());
    CHECK(rep.warnings[0].find("ghost:9") != std::string::npos);
}

TEST_CASE("detection scorer equals the brute-force oracle on random fixtures") {
    std::mt19937 rng(99);
    const std::vector<std::string> classes = {"attack", "injure", "meet", "sue"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Detection> pred;
        std::vector<GoldAnnotation> gold;
        const int np = std::uniform_int_distribution<int>(0, 12)(rng);
        const int ng = std::uniform_int_distribution<int>(0, 12)(rng);
        auto pick = [&] {
            return std::pair<std::string, std::string>{
                "s:" + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng)),
                classes[static_cast<size_t>(std::uniform_int_distribution<int>(0, 3)(rng))]};
        };
        for (int i = 0; i < np; ++i) {
            auto [sid, cls] = pick();
            pred.push_back(det(sid, cls));
        }
        for (int i = 0; i < ng; ++i) {
            auto [sid, cls] = pick();
            gold.push_back(gold_row(sid, cls));
        }
        auto fast = score_detection(pred, gold);
        auto slow = oracle_detection(pred, gold);
        REQUIRE(fast.tp == slow.tp);
        REQUIRE(fast.fp == slow.fp);
        REQUIRE(fast.fn == slow.fn);
        REQUIRE(fast.f1 == Approx(slow.f1));
    }
}

TEST_CASE("micro counts equal the per-class breakdown sums") {
    std::vector<GoldAnnotation> gold = {gold_row("s:0", "attack"), gold_row("s:1", "injure")};
    std::vector<Detection> pred = {det("s:0", "attack"), det("s:2", "meet")};
    auto rep = score_detection(pred, gold);
    long tp = 0, fp = 0, fn = 0;
    for (const auto& [cls, c] : rep.per_class) {
        tp += c.tp;
        fp += c.fp;
        fn += c.fn;
    }
    CHECK(tp == rep.tp);
    CHECK(fp == rep.fp);
    CHECK(fn == rep.fn);
}

namespace {
const RoleMap kTestRoleMap = {{"injure", {"Agent", "Victim"}},
                              {"attack", {"Attacker", "Target"}},
                              {"sue", {"Plaintiff", "Defendant"}}};
}

TEST_CASE("dyadic TP needs class and both actors; wrong a2 is FP plus FN") {
    std::vector<GoldAnnotation> gold = {
        gold_row("s:0", "injure", "customs police", "Mohsen Aminzadeh")};

    auto exact = score_dyadic({pair_row("s:0", "injure", "customs police", "Mohsen Aminzadeh")},
                              gold, kTestRoleMap);
    CHECK(exact.tp == 1);
    CHECK(exact.f1 == 1.0);

    auto wrong_a2 = score_dyadic({pair_row("s:0", "injure", "customs police", "witnesses")},
                                 gold, kTestRoleMap);
    CHECK(wrong_a2.tp == 0);
    CHECK(wrong_a2.fp == 1);
    CHECK(wrong_a2.fn == 1);
}

TEST_CASE("actor matching lowercases, strips articles, and normalizes spaces") {
    std::vector<GoldAnnotation> gold = {gold_row("s:0", "injure", "customs police", "protester")};
    auto rep = score_dyadic({pair_row("s:0", "injure", "The  Customs Police", "a Protester")},
                            gold, kTestRoleMap);
    CHECK(rep.tp == 1);
}

TEST_CASE("head-overlap policy matches on head words") {
    std::vector<GoldAnnotation> gold = {
        gold_row("s:0", "injure", "the customs police", "Mohsen Aminzadeh")};
    auto strict = score_dyadic({pair_row("s:0", "injure", "police", "Mohsen Aminzadeh")}, gold,
                               kTestRoleMap, ActorMatchPolicy::Exact);
    CHECK(strict.tp == 0);
    auto head = score_dyadic({pair_row("s:0", "injure", "police", "Aminzadeh")}, gold,
                             kTestRoleMap, ActorMatchPolicy::HeadOverlap);
    CHECK(head.tp == 1);
}

TEST_CASE("unmapped classes are excluded and counted") {
    std::vector<GoldAnnotation> gold = {gold_row("s:0", "meet", "A", "B")};
    auto rep = score_dyadic({pair_row("s:0", "meet", "A", "B")}, gold, kTestRoleMap);
    CHECK(rep.tp == 0);
    CHECK(rep.ignored_rows == 1);  // pred row for unmapped class
    CHECK(rep.fn == 0);            // unmapped gold is out of scope too
}

TEST_CASE("dyadic scorer equals the brute-force matcher on random fixtures") {
    std::mt19937 rng(1234);
    const std::vector<std::string> classes = {"injure", "attack", "sue", "meet"};
    const std::vector<std::string> actors = {"the police", "police", "rebels", "The Rebels",
                                             "a protester", "officials"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<DyadicArguments> pred;
        std::vector<GoldAnnotation> gold;
        const int np = std::uniform_int_distribution<int>(0, 10)(rng);
        const int ng = std::uniform_int_distribution<int>(0, 10)(rng);
        auto actor = [&] {
            return actors[static_cast<size_t>(
                std::uniform_int_distribution<int>(0, 5)(rng))];
        };
        auto cls = [&] {
            return classes[static_cast<size_t>(
                std::uniform_int_distribution<int>(0, 3)(rng))];
        };
        auto sid = [&] {
            return "s:" + std::to_string(std::uniform_int_distribution<int>(0, 3)(rng));
        };
        for (int i = 0; i < np; ++i) pred.push_back(pair_row(sid(), cls(), actor(), actor()));
        for (int i = 0; i < ng; ++i) gold.push_back(gold_row(sid(), cls(), actor(), actor()));

        for (auto policy : {ActorMatchPolicy::Exact, ActorMatchPolicy::HeadOverlap}) {
            auto fast = score_dyadic(pred, gold, kTestRoleMap, policy);
            auto slow = oracle_dyadic(pred, gold, kTestRoleMap, policy);
            REQUIRE(fast.tp == slow.tp);
            REQUIRE(fast.fp == slow.fp);
            REQUIRE(fast.fn == slow.fn);
        }
    }
}

TEST_CASE("gold scored against itself is always 1.0") {
    std::vector<GoldAnnotation> gold = {
        gold_row("s:0", "injure", "police", "protester"),
        gold_row("s:0", "attack", "rebels", "the base"),
        gold_row("s:3", "sue", "the firm", "its partner"),
    };
    std::vector<DyadicArguments> as_pred;
    std::vector<Detection> as_det;
    for (const auto& g : gold) {
        as_pred.push_back(pair_row(g.sentence_id, g.class_id, g.a1, g.a2));
        as_det.push_back(det(g.sentence_id, g.class_id));
    }
    CHECK(score_detection(as_det, gold).f1 == 1.0);
    CHECK(score_dyadic(as_pred, gold, kTestRoleMap).f1 == 1.0);
}

TEST_CASE("efficiency report reproduces the constructed-fixture arithmetic") {
    // 10 sentences, 5 classes, 6 matches, 3 samples
    std::vector<LedgerEntry> ledger;
    for (int match = 0; match < 6; ++match) {
        for (int s = 0; s < 3; ++s) {
            ledger.push_back({"disambiguation", "hash" + std::to_string(match), s, false, 0});
        }
    }
    auto rep = efficiency_report(ledger, 10, 5, 3);
    CHECK(rep.pipeline_draws == 18);
    CHECK(rep.exhaustive_draws == 150);
    CHECK(rep.ratio_percent == Approx(12.0));
    CHECK(rep.by_purpose.at("disambiguation") == 18);
}

TEST_CASE("zero matches is a zero-percent ratio") {
    auto rep = efficiency_report({}, 10, 5, 3);
    CHECK(rep.pipeline_draws == 0);
    CHECK(rep.ratio_percent == 0.0);
}

TEST_CASE("non-disambiguation purposes only appear in the breakdown") {
    std::vector<LedgerEntry> ledger = {{"synonym", "h", 0, false, 0},
                                       {"disambiguation", "h2", 0, false, 0},
                                       {"agent_qa", "h3", 0, false, 0}};
    auto rep = efficiency_report(ledger, 1, 1, 1);
    CHECK(rep.pipeline_draws == 1);
    CHECK(rep.by_purpose.at("synonym") == 1);
    CHECK(rep.by_purpose.at("agent_qa") == 1);
}

namespace {

AffiliatedInstance inst(const std::string& h1, const std::string& h2, const std::string& cls,
                        const std::string& date) {
    AffiliatedInstance a;
    a.pair.sentence_id = "s:0";
    a.pair.class_id = cls;
    a.h1 = h1;
    a.h2 = h2;
    a.doc_date = date;
    return a;
}

} // namespace

TEST_CASE("graph aggregation mirrors the proxy-war fixture proportions") {
    // 1987 bucket: 14 of 15 USSR aid edges go to Nicaragua (93%), 1 to the rebels
    std::vector<AffiliatedInstance> instances;
    for (int i = 0; i < 14; ++i)
        instances.push_back(inst("Soviet Union", "Nicaragua", "aid", "1987-05-01"));
    instances.push_back(inst("Soviet Union", "Nicaragua (rebels)", "aid", "1987-06-02"));
    // 1988 bucket: all USSR aid goes to Nicaragua (100%)
    for (int i = 0; i < 6; ++i)
        instances.push_back(inst("Soviet Union", "Nicaragua", "aid", "1988-03-11"));

    auto graph = aggregate_graph(instances, TimeBucketing::Year);
    const long to_gov_87 = graph.edges.at({"Soviet Union", "Nicaragua", "aid", "1987"});
    const long to_reb_87 = graph.edges.at({"Soviet Union", "Nicaragua (rebels)", "aid", "1987"});
    CHECK(to_gov_87 == 14);
    CHECK(to_reb_87 == 1);
    CHECK(static_cast<double>(to_gov_87) / (to_gov_87 + to_reb_87) == Approx(14.0 / 15.0));
    CHECK(graph.edges.at({"Soviet Union", "Nicaragua", "aid", "1988"}) == 6);
    CHECK(graph.edges.count({"Soviet Union", "Nicaragua (rebels)", "aid", "1988"}) == 0);
}

TEST_CASE("single instance, reversed direction, and conservation") {
    auto graph = aggregate_graph({inst("United States", "Honduras", "aid", "")},
                                 TimeBucketing::None);
    REQUIRE(graph.edges.size() == 1);
    CHECK(graph.edges.at({"United States", "Honduras", "aid", ""}) == 1);

    auto reversed = aggregate_graph({inst("United States", "Honduras", "aid", ""),
                                     inst("Honduras", "United States", "aid", "")},
                                    TimeBucketing::None);
    CHECK(reversed.edges.size() == 2);

    std::vector<AffiliatedInstance> mixed = {
        inst("A", "B", "aid", ""), inst("A", "B", "aid", ""), inst("", "B", "aid", ""),
        inst("A", "", "aid", ""),  inst("B", "A", "attack", ""),
    };
    auto g = aggregate_graph(mixed, TimeBucketing::None);
    long total = 0;
    for (const auto& [key, count] : g.edges) total += count;
    CHECK(total == 3);
    CHECK(g.excluded == 2);
}

TEST_CASE("edge list CSV is deterministic and escapes nothing it need not") {
    std::vector<AffiliatedInstance> instances = {
        inst("Soviet Union", "Nicaragua", "aid", "1987-01-01"),
        inst("United States", "Nicaragua (rebels)", "aid", "1987-02-03"),
    };
    auto graph = aggregate_graph(instances, TimeBucketing::Year);
    std::ostringstream out;
    export_edges(graph, out);
    CHECK(out.str() ==
          "h1,h2,class,bucket,count\n"
          "Soviet Union,Nicaragua,aid,1987,1\n"
          "United States,Nicaragua (rebels),aid,1987,1\n");
}

TEST_CASE("unanimity report reproduces the Table-3 style proportions") {
    // 1000 boolean prompts at 10 samples each: 940 unanimous, 40 with one
    // dissent, 20 with two
    std::vector<std::tuple<std::string, std::string, std::string>> rows;
    auto add_group = [&](int id, int dissent) {
        for (int s = 0; s < 10; ++s) {
            rows.emplace_back("disambiguation", "p" + std::to_string(id),
                              s < dissent ? "No" : "Yes");
        }
    };
    int id = 0;
    for (int i = 0; i < 940; ++i) add_group(id++, 0);
    for (int i = 0; i < 40; ++i) add_group(id++, 1);
    for (int i = 0; i < 20; ++i) add_group(id++, 2);
    // non-boolean purposes must not participate
    rows.emplace_back("synonym", "px", "- hurt");

    auto rep = unanimity_report(rows);
    CHECK(rep.groups == 1000);
    CHECK(rep.proportion_unanimous == Approx(0.94));
    CHECK(rep.minority_histogram.at(0) == 940);
    CHECK(rep.minority_histogram.at(1) == 40);
    CHECK(rep.minority_histogram.at(2) == 20);
}
