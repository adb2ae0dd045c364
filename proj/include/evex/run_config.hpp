#pragma once

/**
 * Run configuration and manifests.
 *
 * One JSON document configures a run: backend, per-stage Monte Carlo
 * settings, modality policy, paths. Secrets stay out of the file: the
 * config names the environment variable holding the API token. Every
 * command emits a manifest (config snapshot, tool version, input file
 * digests, ledger summary, timing) sufficient to replay against the cache.
 */

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "backend.hpp"
#include "gateway.hpp"
#include "geocoder.hpp"
#include "sha256.hpp"
#include "util.hpp"
#include "version.hpp"

namespace evex {

struct BackendSettings {
    std::string kind = "mock";  // "mock" | "http"
    std::string script;         // mock script path
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string token_env = "EVEX_API_TOKEN";
};

struct GeocoderSettings {
    std::string mode = "off";  // "off" | "cache" | "live"
    std::string cache_path;
    std::string base_url = "https://nominatim.openstreetmap.org";
};

struct RunConfig {
    BackendSettings backend;
    McConfig expansion{0.67, 70};  // synonym-set generation defaults
    McConfig boolean_qa{0.0, 9};   // disambiguation / modality / affiliation
    McConfig extraction{0.0, 9};   // extractive role QA
    std::string modality_policy = "normalize";
    int workers = 1;
    std::string cache_dir;      // empty disables the response cache
    std::string response_dump;  // optional raw-draw audit file

    std::string classes_path;
    std::string corpus_path;
    std::string lexicon_dir;
    std::string out_dir = "run";

    std::string gazetteer_countries;
    std::string gazetteer_code_names;
    std::string gazetteer_us_extensions;
    GeocoderSettings geocoder;

    static McConfig mc_from_json(const nlohmann::json& j, McConfig fallback) {
        McConfig cfg = fallback;
        cfg.temperature = j.value("temperature", fallback.temperature);
        cfg.samples = j.value("samples", fallback.samples);
        if (j.contains("vote_threshold")) cfg.vote_threshold = j["vote_threshold"].get<double>();
        return cfg;
    }

    static RunConfig from_json(const nlohmann::json& doc) {
        RunConfig cfg;
        if (doc.contains("backend")) {
            const auto& b = doc["backend"];
            cfg.backend.kind = b.value("kind", cfg.backend.kind);
            cfg.backend.script = b.value("script", "");
            cfg.backend.base_url = b.value("base_url", "");
            cfg.backend.path = b.value("path", cfg.backend.path);
            cfg.backend.model = b.value("model", "");
            cfg.backend.token_env = b.value("token_env", cfg.backend.token_env);
        }
        if (doc.contains("mc")) {
            const auto& mc = doc["mc"];
            if (mc.contains("expansion"))
                cfg.expansion = mc_from_json(mc["expansion"], cfg.expansion);
            if (mc.contains("boolean"))
                cfg.boolean_qa = mc_from_json(mc["boolean"], cfg.boolean_qa);
            if (mc.contains("extraction"))
                cfg.extraction = mc_from_json(mc["extraction"], cfg.extraction);
        }
        cfg.modality_policy = doc.value("modality_policy", cfg.modality_policy);
        cfg.workers = doc.value("workers", 1);
        cfg.cache_dir = doc.value("cache_dir", "");
        cfg.response_dump = doc.value("response_dump", "");
        cfg.classes_path = doc.value("classes", "");
        cfg.corpus_path = doc.value("corpus", "");
        cfg.lexicon_dir = doc.value("lexicon_dir", "");
        cfg.out_dir = doc.value("out_dir", cfg.out_dir);
        if (doc.contains("gazetteer")) {
            const auto& g = doc["gazetteer"];
            cfg.gazetteer_countries = g.value("countries", "");
            cfg.gazetteer_code_names = g.value("code_names", "");
            cfg.gazetteer_us_extensions = g.value("us_extensions", "");
        }
        if (doc.contains("geocoder")) {
            const auto& g = doc["geocoder"];
            cfg.geocoder.mode = g.value("mode", cfg.geocoder.mode);
            cfg.geocoder.cache_path = g.value("cache_path", "");
            cfg.geocoder.base_url = g.value("base_url", cfg.geocoder.base_url);
        }
        return cfg;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config " + path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(path + ": " + e.what());
        }
        return from_json(doc);
    }

    nlohmann::json to_json() const {
        auto mc_json = [](const McConfig& m) {
            return nlohmann::json{{"temperature", m.temperature},
                                  {"samples", m.samples},
                                  {"vote_threshold", m.vote_threshold}};
        };
        return {
            {"backend",
             {{"kind", backend.kind},
              {"script", backend.script},
              {"base_url", backend.base_url},
              {"path", backend.path},
              {"model", backend.model},
              {"token_env", backend.token_env}}},
            {"mc",
             {{"expansion", mc_json(expansion)},
              {"boolean", mc_json(boolean_qa)},
              {"extraction", mc_json(extraction)}}},
            {"modality_policy", modality_policy},
            {"workers", workers},
            {"cache_dir", cache_dir},
            {"response_dump", response_dump},
            {"classes", classes_path},
            {"corpus", corpus_path},
            {"lexicon_dir", lexicon_dir},
            {"out_dir", out_dir},
            {"gazetteer",
             {{"countries", gazetteer_countries},
              {"code_names", gazetteer_code_names},
              {"us_extensions", gazetteer_us_extensions}}},
            {"geocoder",
             {{"mode", geocoder.mode},
              {"cache_path", geocoder.cache_path},
              {"base_url", geocoder.base_url}}},
        };
    }

};

inline std::shared_ptr<Backend> make_mock_backend(const BackendSettings& settings) {
    if (settings.script.empty())
        throw ConfigError("mock backend needs a script path");
    return std::make_shared<MockBackend>(MockBackend::from_file(settings.script));
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    Sha256 h;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        h.update(buf, static_cast<size_t>(in.gcount()));
        if (!in) break;
    }
    auto d = h.digest();
    static const char* k = "0123456789abcdef";
    std::string out(64, '0');
    for (size_t i = 0; i < d.size(); ++i) {
        out[2 * i] = k[d[i] >> 4];
        out[2 * i + 1] = k[d[i] & 0xf];
    }
    return out;
}

class ManifestBuilder {
public:
    explicit ManifestBuilder(std::string command) : command_(std::move(command)) {
        start_ = std::chrono::steady_clock::now();
    }

    void add_input(const std::string& path) {
        if (!path.empty()) inputs_[path] = file_digest(path);
    }
    void set_config(nlohmann::json snapshot) { config_ = std::move(snapshot); }
    void set_ledger(const QueryLedger& ledger) {
        std::map<std::string, long> by_purpose;
        long hits = 0;
        for (const auto& e : ledger.snapshot()) {
            ++by_purpose[e.purpose];
            if (e.cache_hit) ++hits;
        }
        ledger_summary_ = {{"total_draws", ledger.size()}, {"cache_hits", hits}};
        for (const auto& [purpose, count] : by_purpose) ledger_summary_["by_purpose"][purpose] = count;
    }

    void write(const std::string& path) const {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        nlohmann::json doc = {
            {"command", command_},
            {"tool_version", kVersion},
            {"config", config_},
            {"inputs", inputs_},
            {"ledger", ledger_summary_},
            {"elapsed_ms", elapsed},
        };
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw ConfigError("cannot write manifest " + path);
        out << doc.dump(2) << "\n";
    }

private:
    std::string command_;
    nlohmann::json config_ = nlohmann::json::object();
    nlohmann::json ledger_summary_ = nlohmann::json::object();
    std::map<std::string, std::string> inputs_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace evex
