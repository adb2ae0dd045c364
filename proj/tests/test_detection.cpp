#include <catch2/catch.hpp>

#include <evex/detection.hpp>

#include "helpers.hpp"

using namespace evex;
using nlohmann::json;

namespace {

TriggerStemSet lexicon_of(const std::string& class_id,
                          const std::vector<std::string>& stems,
                          const std::string& source_term) {
    TriggerStemSet set;
    set.class_id = class_id;
    for (const auto& s : stems) {
        set.stems.insert(s);
        set.provenance[s] = {source_term, ExpansionKind::Synonym};
    }
    return set;
}

EventClassSpec spec_of(const std::string& id, const std::string& name,
                       const std::string& definition) {
    EventClassSpec s;
    s.id = id;
    s.name = name;
    s.definition = definition;
    return s;
}

} // namespace

TEST_CASE("stems match as prefixes of lowercased tokens") {
    auto sentence = make_sentence("d", 0, "Customs police MAULED a protester.");
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"maul"}, "injure")}};
    auto matches = match_candidates(sentence, lexicons);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].class_id == "injure");
    CHECK(matches[0].token == "MAULED");
    CHECK(matches[0].token_index == 2);
    CHECK(matches[0].matched_stem == "maul");
}

TEST_CASE("empty lexicon yields no matches") {
    auto sentence = make_sentence("d", 0, "Anything at all.");
    CHECK(match_candidates(sentence, {}).empty());
    std::map<std::string, TriggerStemSet> empty_class{{"injure", lexicon_of("injure", {}, "injure")}};
    CHECK(match_candidates(sentence, empty_class).empty());
}

TEST_CASE("matching alone cannot reject word-sense traps") {
    // "it hurt their chances" must surface as a match; disambiguation decides
    auto sentence = make_sentence("d", 0, "Unfortunately it hurt their chances.");
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"hurt"}, "injure")}};
    auto matches = match_candidates(sentence, lexicons);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].token == "hurt");
}

TEST_CASE("same class matches at several positions are all kept") {
    auto sentence = make_sentence("d", 0, "They attacked after the attack.");
    std::map<std::string, TriggerStemSet> lexicons{
        {"attack", lexicon_of("attack", {"attack"}, "attack")}};
    auto matches = match_candidates(sentence, lexicons);
    REQUIRE(matches.size() == 2);
    CHECK(matches[0].token_index == 1);
    CHECK(matches[1].token_index == 4);
}

TEST_CASE("one match per class and position, longest stem wins") {
    auto sentence = make_sentence("d", 0, "The injuries were serious.");
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"injur", "injuri"}, "injure")}};
    auto matches = match_candidates(sentence, lexicons);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].token == "injuries");
    CHECK(matches[0].matched_stem == "injuri");
}

TEST_CASE("a y-to-i stem does not prefix the y surface form; the verb stem does") {
    // Snowball maps injury -> injuri, which never prefixes "injury" itself;
    // coverage of such tokens comes from the verb-derived stem.
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"injuri"}, "injure")}};
    CHECK(match_candidates(make_sentence("d", 0, "The injury was serious."), lexicons).empty());

    std::map<std::string, TriggerStemSet> with_verb{
        {"injure", lexicon_of("injure", {"injur", "injuri"}, "injure")}};
    auto matches = match_candidates(make_sentence("d", 1, "The injury was serious."), with_verb);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].matched_stem == "injur");
}

TEST_CASE("short stems require exact token equality") {
    std::map<std::string, TriggerStemSet> lexicons{
        {"aid", lexicon_of("aid", {"aid"}, "aid")},
        {"sue", lexicon_of("sue", {"su"}, "sue")}};
    auto hits = match_candidates(make_sentence("d", 0, "They aided the rebels."), lexicons);
    REQUIRE(hits.size() == 1);  // "aid" (len 3) prefixes "aided"
    CHECK(hits[0].class_id == "aid");

    auto exact = match_candidates(make_sentence("d", 1, "We su them."), lexicons);
    REQUIRE(exact.size() == 1);  // "su" only matches the literal token
    CHECK(exact[0].class_id == "sue");
    CHECK(match_candidates(make_sentence("d", 2, "The sun rose."), lexicons).empty());
}

TEST_CASE("hyphenated words expose their parts to prefix matching") {
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"injur"}, "injure")}};
    auto matches = match_candidates(make_sentence("d", 0, "An injury-related claim."), lexicons);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].token == "injury");
}

TEST_CASE("multiword stems match contiguous token sequences") {
    std::map<std::string, TriggerStemSet> lexicons{
        {"start-org", lexicon_of("start-org", {"start organ"}, "start organization")}};
    auto matches = match_candidates(
        make_sentence("d", 0, "They started organizations in exile."), lexicons);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].token == "started organizations");
    CHECK(matches[0].token_index == 1);

    CHECK(match_candidates(make_sentence("d", 1, "They started new organizations."), lexicons)
              .empty());
}

TEST_CASE("disambiguation prompt quotes the sentence, token, and definition") {
    const std::string p = prompts::disambiguation(
        "Unfortunately it hurt their chances.", "hurt", "injure", "to inflict physical harm");
    CHECK(p ==
          "Unfortunately it hurt their chances.\nIn the sentence, does 'hurt' indicate "
          "'injure', where 'injure' means to inflict physical harm?");
}

TEST_CASE("disambiguate votes yes and no per the script") {
    auto sentence = make_sentence("d", 0, "Unfortunately it hurt their chances.");
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"hurt"}, "injure")}};
    auto match = match_candidates(sentence, lexicons).at(0);
    auto spec = spec_of("injure", "injure", "to inflict physical harm");

    SECTION("scripted no rejects the trap") {
        test::GatewayFixture fx(json::array({{{"match_regex", "does 'hurt' indicate"},
                                              {"response", "No."}}}));
        McConfig cfg;
        auto [keep, votes] = disambiguate(fx.gw(), sentence, match, spec, cfg);
        CHECK_FALSE(keep);
        CHECK(votes.no == 1);
    }
    SECTION("6 of 9 yes accepts with tally (6,3,0)") {
        std::vector<std::string> responses = {"yes", "yes", "no", "yes", "no",
                                              "yes", "yes", "no", "yes"};
        test::GatewayFixture fx(json::array({{{"match_regex", "does 'hurt' indicate"},
                                              {"responses", responses}}}));
        McConfig cfg;
        cfg.samples = 9;
        auto [keep, votes] = disambiguate(fx.gw(), sentence, match, spec, cfg);
        CHECK(keep);
        CHECK(votes.yes == 6);
        CHECK(votes.no == 3);
        CHECK(votes.unparseable == 0);
    }
}

TEST_CASE("keyword-sourced stems are disambiguated against the keyword") {
    auto sentence = make_sentence("d", 0, "Gunfire erupted downtown.");
    TriggerStemSet set = lexicon_of("attack", {"gunfir"}, "gunfire");
    std::map<std::string, TriggerStemSet> lexicons{{"attack", set}};
    auto match = match_candidates(sentence, lexicons).at(0);
    CHECK(match.source_term == "gunfire");

    auto spec = spec_of("attack", "attack", "to use violence");
    test::GatewayFixture fx(json::array(
        {{{"match", prompts::disambiguation("Gunfire erupted downtown.", "Gunfire", "gunfire",
                                            "to use violence")},
          {"response", "Yes"}}}));
    McConfig cfg;
    auto [keep, votes] = disambiguate(fx.gw(), sentence, match, spec, cfg);
    CHECK(keep);
}

TEST_CASE("detect orders output and issues matches x samples draws") {
    std::vector<Sentence> corpus = {
        make_sentence("doc", 0, "Police mauled one protester and wounded another."),
        make_sentence("doc", 1, "Nothing happened today."),
    };
    std::map<std::string, EventClassSpec> specs{
        {"injure", spec_of("injure", "injure", "to inflict physical harm")}};
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"maul", "wound"}, "injure")}};

    test::GatewayFixture fx(json::array({{{"match_regex", "indicate"}, {"response", "yes"}}}));
    McConfig cfg;
    cfg.samples = 3;
    auto run = detect(fx.gw(), corpus, specs, lexicons, cfg);

    REQUIRE(run.detections.size() == 2);
    CHECK(run.detections[0].trigger == "mauled");
    CHECK(run.detections[1].trigger == "wounded");
    CHECK(run.detections[0].token_index < run.detections[1].token_index);
    // 2 matches x 3 samples
    CHECK(fx.ledger->count_purpose(Purpose::Disambiguation) == 6);
}

TEST_CASE("zero stem matches means zero detection queries") {
    std::vector<Sentence> corpus = {make_sentence("doc", 0, "A quiet, uneventful day.")};
    std::map<std::string, EventClassSpec> specs{
        {"injure", spec_of("injure", "injure", "harm")}};
    std::map<std::string, TriggerStemSet> lexicons{
        {"injure", lexicon_of("injure", {"maul"}, "injure")}};

    test::GatewayFixture fx(json::array());  // any query would be a scripting error
    McConfig cfg;
    auto run = detect(fx.gw(), corpus, specs, lexicons, cfg);
    CHECK(run.detections.empty());
    CHECK(fx.ledger->size() == 0);
}

TEST_CASE("stems that never pass disambiguation only add queries, not detections") {
    std::vector<Sentence> corpus = {
        make_sentence("doc", 0, "Police mauled one protester near the market.")};
    std::map<std::string, EventClassSpec> specs{
        {"injure", spec_of("injure", "injure", "to inflict physical harm")}};

    std::map<std::string, TriggerStemSet> narrow{
        {"injure", lexicon_of("injure", {"maul"}, "injure")}};
    std::map<std::string, TriggerStemSet> noisy{
        {"injure", lexicon_of("injure", {"maul", "market", "polic"}, "injure")}};

    auto script = json::array({
        {{"match_regex", "does 'mauled' indicate"}, {"response", "yes"}},
        {{"match_regex", "indicate"}, {"response", "No."}},  // every other candidate
    });
    McConfig cfg;
    cfg.samples = 3;

    test::GatewayFixture fx1(script);
    auto baseline = detect(fx1.gw(), corpus, specs, narrow, cfg);
    test::GatewayFixture fx2(script);
    auto widened = detect(fx2.gw(), corpus, specs, noisy, cfg);

    REQUIRE(baseline.detections.size() == 1);
    REQUIRE(widened.detections.size() == 1);
    CHECK(widened.detections[0].trigger == baseline.detections[0].trigger);
    CHECK(fx2.ledger->size() > fx1.ledger->size());
}

TEST_CASE("exhaustive baseline issues |S| x |T| x samples draws") {
    std::vector<Sentence> corpus = {
        make_sentence("doc", 0, "First sentence."),
        make_sentence("doc", 1, "Second sentence."),
        make_sentence("doc", 2, "Third sentence."),
    };
    std::map<std::string, EventClassSpec> specs{
        {"injure", spec_of("injure", "injure", "to inflict physical harm")},
        {"pardon", spec_of("pardon", "pardon", "to lift a sentence imposed by the judiciary")},
    };
    test::GatewayFixture fx(json::array({{{"match_regex", "."}, {"response", "no"}}}));
    McConfig cfg;
    auto run = exhaustive_detect(fx.gw(), corpus, specs, NaiveVariant::About, cfg);
    CHECK(run.detections.empty());
    CHECK(fx.ledger->size() == 6);  // 3 x 2 x 1
    CHECK(fx.ledger->count_purpose(Purpose::NaiveBoolean) == 6);
}

TEST_CASE("naive prompt variants phrase the question as specified") {
    auto pardon = spec_of("pardon", "pardon", "to lift a sentence imposed by the judiciary");
    const std::string text = "The governor issued a pardon.";

    CHECK(prompts::naive_boolean(NaiveVariant::About, pardon, text) ==
          text + "\nIs the text about pardoning?");
    CHECK(prompts::naive_boolean(NaiveVariant::Discusses, pardon, text) ==
          text + "\nDoes this text discuss pardoning?");
    const std::string with_def = prompts::naive_boolean(NaiveVariant::AboutDef, pardon, text);
    CHECK(with_def.find("where 'pardon' is to lift a sentence imposed by the judiciary") !=
          std::string::npos);
    CHECK(prompts::naive_boolean(NaiveVariant::DiscussesDef, pardon, text) ==
          text + "\nDoes this text discuss pardoning, where 'pardon' is to lift a sentence "
                 "imposed by the judiciary?");
}

TEST_CASE("baseline detections carry no trigger and yes verdicts only") {
    std::vector<Sentence> corpus = {make_sentence("doc", 0, "Rebels attacked the convoy.")};
    std::map<std::string, EventClassSpec> specs{
        {"attack", spec_of("attack", "attack", "to use violence")},
        {"pardon", spec_of("pardon", "pardon", "to lift a sentence")},
    };
    test::GatewayFixture fx(json::array({
        {{"match_regex", "about attacking"}, {"response", "Yes"}},
        {{"match_regex", "."}, {"response", "no"}},
    }));
    McConfig cfg;
    auto run = exhaustive_detect(fx.gw(), corpus, specs, NaiveVariant::About, cfg);
    REQUIRE(run.detections.size() == 1);
    CHECK(run.detections[0].class_id == "attack");
    CHECK(run.detections[0].trigger.empty());
    CHECK(run.detections[0].token_index == -1);
}
