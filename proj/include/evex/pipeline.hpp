#pragma once

/**
 * End-to-end orchestration: build-lexicon (when stale) -> detect ->
 * extract -> affiliate -> graph, with every stage's output written as an
 * independently consumable file. A stage failure stops the run; outputs
 * already written stay on disk and are named in the error.
 */

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "affiliation.hpp"
#include "arguments.hpp"
#include "backend_http.hpp"
#include "detection.hpp"
#include "evaluation.hpp"
#include "formats.hpp"
#include "gateway.hpp"
#include "geocoder_http.hpp"
#include "lexicon.hpp"
#include "run_config.hpp"
#include "util.hpp"

namespace evex {

inline std::shared_ptr<Backend> make_backend(const BackendSettings& settings) {
    if (settings.kind == "mock") return make_mock_backend(settings);
    if (settings.kind == "http") {
        HttpBackendConfig http;
        http.base_url = settings.base_url;
        http.path = settings.path;
        http.model = settings.model;
        if (const char* token = std::getenv(settings.token_env.c_str())) http.api_token = token;
        return std::make_shared<HttpBackend>(http);
    }
    throw ConfigError("unknown backend kind '" + settings.kind + "'");
}

inline std::unique_ptr<Geocoder> make_geocoder(const GeocoderSettings& settings) {
    if (settings.mode == "off") return std::make_unique<DisabledGeocoder>();
    if (settings.cache_path.empty())
        throw ConfigError("geocoder mode '" + settings.mode + "' needs a cache_path");
    if (settings.mode == "cache") return std::make_unique<CachedGeocoder>(settings.cache_path);
    if (settings.mode == "live")
        return std::make_unique<HttpGeocoder>(settings.base_url, settings.cache_path);
    throw ConfigError("unknown geocoder mode '" + settings.mode + "'");
}

/// Gateway plus the bookkeeping every run shares.
struct Session {
    RunConfig config;
    std::shared_ptr<QueryLedger> ledger = std::make_shared<QueryLedger>();
    std::shared_ptr<ResponseCache> cache;
    std::shared_ptr<Backend> backend;
    std::unique_ptr<Gateway> gateway;
    std::unique_ptr<jsonl::Writer> dump_writer;
    std::mutex dump_mu;

    explicit Session(RunConfig cfg) : config(std::move(cfg)) {
        backend = make_backend(config.backend);
        cache = std::make_shared<ResponseCache>(config.cache_dir);
        gateway = std::make_unique<Gateway>(backend, ledger, cache);
        if (!config.response_dump.empty()) {
            dump_writer = std::make_unique<jsonl::Writer>(config.response_dump);
            gateway->set_response_sink([this](Purpose purpose, const std::string& hash,
                                              int sample_index, const std::string& text) {
                std::lock_guard lock(dump_mu);
                dump_writer->row({{"purpose", to_string(purpose)},
                                  {"prompt_hash", hash},
                                  {"sample_index", sample_index},
                                  {"text", text}});
            });
        }
    }

    Gateway& gw() { return *gateway; }
};

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

/// Build lexicons for every class; skips classes whose lexicon file is
/// newer than the class spec file unless force is set.
inline std::map<std::string, TriggerStemSet>
build_lexicons(Session& session, const std::vector<EventClassSpec>& specs,
               const std::string& lexicon_dir, bool force = false) {
    namespace fs = std::filesystem;
    fs::create_directories(lexicon_dir);
    const fs::path classes_file(session.config.classes_path);

    std::map<std::string, TriggerStemSet> lexicons;
    for (const auto& spec : specs) {
        const fs::path path = fs::path(lexicon_dir) / (spec.id + ".json");
        bool stale = force || !fs::exists(path);
        if (!stale && !session.config.classes_path.empty() && fs::exists(classes_file)) {
            stale = fs::last_write_time(classes_file) > fs::last_write_time(path);
        }
        if (stale) {
            auto set = build_trigger_set(session.gw(), spec, session.config.expansion);
            save_lexicon(set, path.string());
            lexicons.emplace(spec.id, std::move(set));
        } else {
            lexicons.emplace(spec.id, load_lexicon(path.string()));
        }
    }
    return lexicons;
}

inline std::map<std::string, TriggerStemSet> load_lexicon_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("lexicon dir not found: " + dir);
    std::map<std::string, TriggerStemSet> lexicons;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::parse_error&) {
            continue;
        }
        if (!doc.is_object() || !doc.contains("class_id")) continue;  // manifests etc.
        auto set = lexicon_from_json(doc);
        lexicons.emplace(set.class_id, std::move(set));
    }
    if (lexicons.empty()) throw ConfigError("no lexicon files in " + dir);
    return lexicons;
}

inline CountryGazetteer load_configured_gazetteer(const RunConfig& cfg) {
    if (cfg.gazetteer_countries.empty() || cfg.gazetteer_code_names.empty())
        throw ConfigError("gazetteer paths missing from config");
    return load_gazetteer(cfg.gazetteer_countries, cfg.gazetteer_code_names,
                          cfg.gazetteer_us_extensions);
}

struct PipelineOutputs {
    std::string lexicon_dir;
    std::string detections;
    std::string pairs;
    std::string affiliations;
    std::string graph_csv;
    std::string ledger;
    std::string manifest;
    std::vector<std::string> warnings;
};

/// The whole pipeline over one corpus. Rerunning with a warm cache and an
/// identical config produces byte-identical stage outputs.
inline PipelineOutputs run_pipeline(Session& session, TimeBucketing bucketing = TimeBucketing::Year) {
    namespace fs = std::filesystem;
    const RunConfig& cfg = session.config;
    if (cfg.classes_path.empty()) throw ConfigError("config needs a classes file");
    if (cfg.corpus_path.empty()) throw ConfigError("config needs a corpus file");

    fs::create_directories(cfg.out_dir);
    PipelineOutputs out;
    out.lexicon_dir = cfg.lexicon_dir.empty() ? (fs::path(cfg.out_dir) / "lexicons").string()
                                              : cfg.lexicon_dir;
    out.detections = (fs::path(cfg.out_dir) / "detections.jsonl").string();
    out.pairs = (fs::path(cfg.out_dir) / "pairs.jsonl").string();
    out.affiliations = (fs::path(cfg.out_dir) / "affiliations.jsonl").string();
    out.graph_csv = (fs::path(cfg.out_dir) / "graph.csv").string();
    out.ledger = (fs::path(cfg.out_dir) / "ledger.jsonl").string();
    out.manifest = (fs::path(cfg.out_dir) / "manifest.json").string();

    auto specs_vec = load_event_classes(cfg.classes_path);
    std::map<std::string, EventClassSpec> specs;
    for (const auto& s : specs_vec) specs.emplace(s.id, s);
    auto corpus = io::load_corpus(cfg.corpus_path);

    auto lexicons = build_lexicons(session, specs_vec, out.lexicon_dir);

    auto detection_run =
        detect(session.gw(), corpus, specs, lexicons, cfg.boolean_qa, cfg.workers);
    io::save_detections(detection_run.detections, out.detections);

    auto policy = modality_policy_from_string(cfg.modality_policy);
    if (!policy) throw ConfigError("unknown modality policy '" + cfg.modality_policy + "'");
    auto extraction_run = extract(session.gw(), detection_run.detections, corpus, specs,
                                  cfg.extraction, *policy, cfg.workers);
    io::save_pairs(extraction_run.pairs, out.pairs);

    auto gazetteer = load_configured_gazetteer(cfg);
    auto geocoder = make_geocoder(cfg.geocoder);
    auto affiliation_run = affiliate(session.gw(), extraction_run.pairs, corpus, gazetteer,
                                     cfg.boolean_qa, geocoder.get());
    io::save_affiliations(affiliation_run.instances, out.affiliations);

    auto graph = aggregate_graph(affiliation_run.instances, bucketing);
    export_edges(graph, out.graph_csv);

    session.ledger->write_jsonl(out.ledger);

    out.warnings.insert(out.warnings.end(), detection_run.warnings.begin(),
                        detection_run.warnings.end());
    out.warnings.insert(out.warnings.end(), extraction_run.warnings.begin(),
                        extraction_run.warnings.end());
    out.warnings.insert(out.warnings.end(), affiliation_run.warnings.begin(),
                        affiliation_run.warnings.end());

    ManifestBuilder manifest("run");
    manifest.set_config(cfg.to_json());
    manifest.add_input(cfg.classes_path);
    manifest.add_input(cfg.corpus_path);
    manifest.add_input(cfg.backend.script);
    manifest.set_ledger(*session.ledger);
    manifest.write(out.manifest);
    return out;
}

} // namespace evex
