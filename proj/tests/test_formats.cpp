#include <catch2/catch.hpp>

#include <evex/formats.hpp>

#include "helpers.hpp"

using namespace evex;

TEST_CASE("corpus rows become tokenized sentences with stable ids") {
    test::TempDir dir;
    const std::string path = test::write_file(
        dir, "corpus.jsonl",
        R"({"doc_id": "nyt01", "sent_index": 0, "text": "Police mauled a man.", "doc_date": "1987-07-14"})"
        "\n"
        R"({"doc_id": "nyt01", "sent_index": 1, "text": "Nothing happened."})"
        "\n");
    auto corpus = io::load_corpus(path);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0].id == "nyt01:0");
    CHECK(corpus[0].doc_date == "1987-07-14");
    CHECK(corpus[1].doc_date.empty());
    CHECK(corpus[0].tokens.size() == 4);
}

TEST_CASE("malformed corpus lines fail with the line number") {
    test::TempDir dir;
    const std::string path =
        test::write_file(dir, "bad.jsonl", "{\"doc_id\": \"d\", \"sent_index\": 0}\nnot json\n");
    CHECK_THROWS_AS(io::load_corpus(path), ConfigError);
}

TEST_CASE("detections round-trip through jsonl") {
    test::TempDir dir;
    Detection d;
    d.sentence_id = "nyt01:0";
    d.class_id = "injure";
    d.trigger = "mauled";
    d.token_index = 1;
    d.votes.verdict = true;
    d.votes.yes = 6;
    d.votes.no = 3;

    const std::string path = dir.file("detections.jsonl");
    io::save_detections({d}, path);
    auto loaded = io::load_detections(path);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].sentence_id == "nyt01:0");
    CHECK(loaded[0].class_id == "injure");
    CHECK(loaded[0].trigger == "mauled");
    CHECK(loaded[0].token_index == 1);
    CHECK(loaded[0].votes.yes == 6);
}

TEST_CASE("pairs and affiliations round-trip through jsonl") {
    test::TempDir dir;
    DyadicArguments p;
    p.sentence_id = "nyt01:0";
    p.class_id = "injure";
    p.trigger = "mauled";
    p.token_index = 1;
    p.agent = "customs police";
    p.patient = "Mohsen Aminzadeh";
    p.source_span = "Customs police mauled Mohsen Aminzadeh.";
    p.modality_flag = false;

    const std::string pairs_path = dir.file("pairs.jsonl");
    io::save_pairs({p}, pairs_path);
    auto pairs = io::load_pairs(pairs_path);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].agent == "customs police");
    CHECK(pairs[0].source_span == p.source_span);

    AffiliatedInstance a;
    a.pair = p;
    a.h1 = "France";
    a.h2 = "Iran";
    a.rebel_a2 = false;
    a.doc_date = "1987-07-14";
    const std::string aff_path = dir.file("affiliations.jsonl");
    io::save_affiliations({a}, aff_path);
    auto instances = io::load_affiliations(aff_path);
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].h1 == "France");
    CHECK(instances[0].h2 == "Iran");
    CHECK(instances[0].pair.agent == "customs police");
    CHECK(instances[0].doc_date == "1987-07-14");
}

TEST_CASE("gold files accept optional trigger and actors") {
    test::TempDir dir;
    const std::string path = test::write_file(
        dir, "gold.jsonl",
        R"({"sentence_id": "s:0", "class": "attack"})"
        "\n"
        R"({"sentence_id": "s:1", "class": "injure", "trigger": "mauled", "a1": "police", "a2": "a man"})"
        "\n");
    auto gold = io::load_gold(path);
    REQUIRE(gold.size() == 2);
    CHECK(gold[0].a1.empty());
    CHECK(gold[1].trigger == "mauled");
    CHECK(gold[1].a2 == "a man");
}

TEST_CASE("bundled role map carries the paired-role table") {
    auto map = io::load_role_map(std::string(EVEX_DATA_DIR) + "/role_map.json");
    REQUIRE(map.size() == 16);
    CHECK(map.at("injure").agent_role == "Agent");
    CHECK(map.at("injure").patient_role == "Victim");
    CHECK(map.at("attack").agent_role == "Attacker");
    CHECK(map.at("sue").agent_role == "Plaintiff");
    CHECK(map.at("pardon").agent_role == "Adjudicator");
    CHECK(map.at("elect").patient_role == "Person");
    CHECK(map.count("meet") == 0);  // unmapped classes stay out of dyadic scoring
}

TEST_CASE("bundled event classes load and cover the 33 subtypes") {
    auto specs = load_event_classes(std::string(EVEX_DATA_DIR) + "/event_classes_ace.json");
    CHECK(specs.size() == 33);
    bool found_attack = false;
    for (const auto& s : specs) {
        if (s.id == "attack") {
            found_attack = true;
            CHECK(s.keywords == std::vector<std::string>{"gunfire"});
        }
    }
    CHECK(found_attack);
}
