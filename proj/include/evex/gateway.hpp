#pragma once

/**
 * The single choke point for model interaction.
 *
 * Every draw flows through Gateway::complete, which consults a persistent
 * response cache (one file per draw, keyed by a digest of backend id,
 * model, prompt text, temperature, and sample index) and appends one
 * ledger entry per draw whether or not it was a cache hit. Monte Carlo
 * union sampling and majority voting sit on top of complete().
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "backend.hpp"
#include "parsers.hpp"
#include "sha256.hpp"
#include "util.hpp"

namespace evex {

enum class Purpose {
    Synonym,
    Inflection,
    Wordform,
    Disambiguation,
    ModalityCheck,
    ModalityRewrite,
    InstanceSplit,
    AgentQa,
    PatientQa,
    Affiliation,
    NaiveBoolean,
};

inline const char* to_string(Purpose p) {
    switch (p) {
        case Purpose::Synonym: return "synonym";
        case Purpose::Inflection: return "inflection";
        case Purpose::Wordform: return "wordform";
        case Purpose::Disambiguation: return "disambiguation";
        case Purpose::ModalityCheck: return "modality_check";
        case Purpose::ModalityRewrite: return "modality_rewrite";
        case Purpose::InstanceSplit: return "instance_split";
        case Purpose::AgentQa: return "agent_qa";
        case Purpose::PatientQa: return "patient_qa";
        case Purpose::Affiliation: return "affiliation";
        case Purpose::NaiveBoolean: return "naive_boolean";
    }
    return "?";
}

inline std::optional<Purpose> purpose_from_string(std::string_view s) {
    static const std::pair<std::string_view, Purpose> table[] = {
        {"synonym", Purpose::Synonym},       {"inflection", Purpose::Inflection},
        {"wordform", Purpose::Wordform},     {"disambiguation", Purpose::Disambiguation},
        {"modality_check", Purpose::ModalityCheck},
        {"modality_rewrite", Purpose::ModalityRewrite},
        {"instance_split", Purpose::InstanceSplit},
        {"agent_qa", Purpose::AgentQa},      {"patient_qa", Purpose::PatientQa},
        {"affiliation", Purpose::Affiliation},
        {"naive_boolean", Purpose::NaiveBoolean},
    };
    for (const auto& [name, p] : table)
        if (name == s) return p;
    return std::nullopt;
}

struct Prompt {
    std::string text;
    Purpose purpose;
};

inline bool is_set_producing(Purpose p) {
    return p == Purpose::Synonym || p == Purpose::Inflection || p == Purpose::Wordform;
}

inline bool is_boolean(Purpose p) {
    return p == Purpose::Disambiguation || p == Purpose::ModalityCheck ||
           p == Purpose::Affiliation || p == Purpose::NaiveBoolean;
}

struct McConfig {
    double temperature = 0.0;
    int samples = 1;
    // Boolean vote passes when yes/(yes+no) >= vote_threshold. The default
    // is the smallest value above one half, i.e. a strict majority with
    // ties resolving to no.
    double vote_threshold = majority_threshold();

    static double majority_threshold() { return std::nextafter(0.5, 1.0); }

    void validate() const {
        if (samples < 1) throw ConfigError("mc samples must be >= 1");
        if (temperature < 0.0 || temperature > 2.0)
            throw ConfigError("temperature out of range");
        if (vote_threshold <= 0.5 || vote_threshold > 1.0)
            throw ConfigError("vote_threshold must be in (0.5, 1]");
    }
};

struct LMResponseBatch {
    std::vector<std::string> raw_texts;  // draw order
    std::string prompt_hash;
    std::string backend_id;
};

struct LedgerEntry {
    std::string purpose;
    std::string prompt_hash;
    int sample_index = 0;
    bool cache_hit = false;
    std::int64_t timestamp = 0;  // unix seconds
};

/// Append-only record of every draw. Thread-safe; the totals it reports
/// are order-insensitive.
class QueryLedger {
public:
    void append(LedgerEntry e) {
        std::lock_guard lock(mu_);
        entries_.push_back(std::move(e));
    }

    std::vector<LedgerEntry> snapshot() const {
        std::lock_guard lock(mu_);
        return entries_;
    }

    size_t size() const {
        std::lock_guard lock(mu_);
        return entries_.size();
    }

    size_t count_purpose(Purpose p) const {
        std::lock_guard lock(mu_);
        const std::string name = to_string(p);
        return static_cast<size_t>(std::count_if(
            entries_.begin(), entries_.end(),
            [&](const LedgerEntry& e) { return e.purpose == name; }));
    }

    void clear() {
        std::lock_guard lock(mu_);
        entries_.clear();
    }

    void write_jsonl(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw ConfigError("cannot write ledger " + path);
        for (const auto& e : snapshot()) {
            nlohmann::json row = {{"purpose", e.purpose},
                                  {"prompt_hash", e.prompt_hash},
                                  {"sample_index", e.sample_index},
                                  {"cache_hit", e.cache_hit},
                                  {"timestamp", e.timestamp}};
            out << row.dump() << "\n";
        }
    }

    static std::vector<LedgerEntry> read_jsonl(const std::string& path);

private:
    mutable std::mutex mu_;
    std::vector<LedgerEntry> entries_;
};

/// Disk cache: one file per draw under the cache directory, named by the
/// key digest. Reads are lock-free once written; writes are serialized.
class ResponseCache {
public:
    ResponseCache() = default;  // disabled
    explicit ResponseCache(std::string dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    std::optional<std::string> get(const std::string& key) const {
        if (!enabled()) return std::nullopt;
        std::ifstream in(path_for(key), std::ios::binary);
        if (!in) return std::nullopt;
        std::string body((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        return body;
    }

    void put(const std::string& key, const std::string& value) {
        if (!enabled()) return;
        std::lock_guard lock(mu_);
        // write-then-rename so concurrent readers never see a partial file
        const std::string tmp = path_for(key) + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << value;
        }
        std::filesystem::rename(tmp, path_for(key));
    }

private:
    std::string path_for(const std::string& key) const { return dir_ + "/" + key + ".txt"; }

    std::string dir_;
    std::mutex mu_;
};

struct UnionResult {
    std::set<std::string> values;
    std::vector<size_t> cumulative_sizes;  // |union| after each draw
    int parse_failures = 0;
};

struct VoteResult {
    bool verdict = false;
    int yes = 0;
    int no = 0;
    int unparseable = 0;
    bool all_unparseable = false;
};

/// Optional sink receiving every raw draw, for response-dump audits.
using ResponseSink =
    std::function<void(Purpose, const std::string& prompt_hash, int sample_index,
                       const std::string& text)>;

class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<QueryLedger> ledger,
            std::shared_ptr<ResponseCache> cache = nullptr)
        : backend_(std::move(backend)),
          ledger_(std::move(ledger)),
          cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()) {}

    void set_response_sink(ResponseSink sink) { sink_ = std::move(sink); }

    const Backend& backend() const { return *backend_; }
    QueryLedger& ledger() { return *ledger_; }

    static std::string prompt_hash(const std::string& text) { return Sha256::hex(text); }

    /// One Monte Carlo batch: cfg.samples draws for the prompt, cache
    /// consulted per draw, every draw ledgered.
    LMResponseBatch complete(const Prompt& prompt, const McConfig& cfg) {
        cfg.validate();
        if (prompt.text.empty()) throw ConfigError("empty prompt");

        const std::string phash = prompt_hash(prompt.text);
        LMResponseBatch batch;
        batch.prompt_hash = phash;
        batch.backend_id = backend_->id();
        batch.raw_texts.resize(static_cast<size_t>(cfg.samples));

        std::vector<int> misses;
        std::vector<bool> hit(static_cast<size_t>(cfg.samples), false);
        for (int i = 0; i < cfg.samples; ++i) {
            auto cached = cache_->get(cache_key(prompt.text, cfg.temperature, i));
            if (cached) {
                batch.raw_texts[static_cast<size_t>(i)] = *cached;
                hit[static_cast<size_t>(i)] = true;
            } else {
                misses.push_back(i);
            }
        }

        // fetch contiguous runs of misses in as few backend calls as possible
        for (size_t k = 0; k < misses.size();) {
            size_t run = 1;
            while (k + run < misses.size() && misses[k + run] == misses[k] + static_cast<int>(run))
                ++run;
            BackendRequest req;
            req.prompt_text = prompt.text;
            req.temperature = cfg.temperature;
            req.first_sample_index = misses[k];
            req.n = static_cast<int>(run);
            auto texts = backend_->draw(req);
            for (size_t j = 0; j < run; ++j) {
                int idx = misses[k + j];
                batch.raw_texts[static_cast<size_t>(idx)] = texts[j];
                cache_->put(cache_key(prompt.text, cfg.temperature, idx), texts[j]);
            }
            k += run;
        }

        const auto now = static_cast<std::int64_t>(std::time(nullptr));
        for (int i = 0; i < cfg.samples; ++i) {
            ledger_->append({to_string(prompt.purpose), phash, i, hit[static_cast<size_t>(i)], now});
            if (sink_) sink_(prompt.purpose, phash, i, batch.raw_texts[static_cast<size_t>(i)]);
        }
        return batch;
    }

    /// Union of parsed sets over all draws (any item present in at least
    /// one sample is kept). Unparseable samples contribute nothing but
    /// are tallied, never fatal.
    UnionResult
    mc_union(const Prompt& prompt, const McConfig& cfg,
             const std::function<std::optional<std::set<std::string>>(const std::string&)>&
                 parse_set) {
        if (!is_set_producing(prompt.purpose))
            throw ConfigError("mc_union requires a set-producing prompt purpose");
        auto batch = complete(prompt, cfg);
        UnionResult result;
        for (const auto& text : batch.raw_texts) {
            auto parsed = parse_set(text);
            if (!parsed) {
                ++result.parse_failures;
            } else {
                result.values.insert(parsed->begin(), parsed->end());
            }
            result.cumulative_sizes.push_back(result.values.size());
        }
        return result;
    }

    /// Majority vote over boolean draws. Unparseable samples leave the
    /// denominator; all-unparseable yields a flagged false.
    VoteResult mc_vote(const Prompt& prompt, const McConfig& cfg,
                       const std::function<parse::Answer(const std::string&)>& parse_bool =
                           [](const std::string& s) { return parse::boolean(s); }) {
        if (!is_boolean(prompt.purpose))
            throw ConfigError("mc_vote requires a boolean prompt purpose");
        auto batch = complete(prompt, cfg);
        VoteResult v;
        for (const auto& text : batch.raw_texts) {
            switch (parse_bool(text)) {
                case parse::Answer::Yes: ++v.yes; break;
                case parse::Answer::No: ++v.no; break;
                case parse::Answer::Unparseable: ++v.unparseable; break;
            }
        }
        const int parseable = v.yes + v.no;
        if (parseable == 0) {
            v.all_unparseable = true;
            v.verdict = false;
        } else {
            v.verdict =
                (static_cast<double>(v.yes) / parseable) >= cfg.vote_threshold;
        }
        return v;
    }

    /// Cumulative union sizes draw by draw, for set-size convergence plots.
    std::vector<size_t> cumulative_curve(
        const Prompt& prompt, double temperature, int max_samples,
        const std::function<std::optional<std::set<std::string>>(const std::string&)>&
            parse_set) {
        McConfig cfg;
        cfg.temperature = temperature;
        cfg.samples = max_samples;
        return mc_union(prompt, cfg, parse_set).cumulative_sizes;
    }

private:
    std::string cache_key(const std::string& prompt_text, double temperature,
                          int sample_index) const {
        char temp_buf[32];
        std::snprintf(temp_buf, sizeof temp_buf, "%.6g", temperature);
        Sha256 h;
        h.update(backend_->id());
        h.update("\x1f");
        h.update(backend_->model());
        h.update("\x1f");
        h.update(prompt_text);
        h.update("\x1f");
        h.update(std::string_view(temp_buf));
        h.update("\x1f");
        h.update(std::to_string(sample_index));
        auto d = h.digest();
        static const char* k = "0123456789abcdef";
        std::string out(64, '0');
        for (size_t i = 0; i < d.size(); ++i) {
            out[2 * i] = k[d[i] >> 4];
            out[2 * i + 1] = k[d[i] & 0xf];
        }
        return out;
    }

    std::shared_ptr<Backend> backend_;
    std::shared_ptr<QueryLedger> ledger_;
    std::shared_ptr<ResponseCache> cache_;
    ResponseSink sink_;
};

inline std::vector<LedgerEntry> QueryLedger::read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ledger " + path);
    std::vector<LedgerEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (str::trim(line).empty()) continue;
        auto row = nlohmann::json::parse(line);
        LedgerEntry e;
        e.purpose = row.value("purpose", "");
        e.prompt_hash = row.value("prompt_hash", "");
        e.sample_index = row.value("sample_index", 0);
        e.cache_hit = row.value("cache_hit", false);
        e.timestamp = row.value("timestamp", std::int64_t{0});
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace evex
