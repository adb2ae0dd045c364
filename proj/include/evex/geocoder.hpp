#pragma once

/**
 * Toponym-to-country resolution. Three modes:
 *   off   - never resolves anything;
 *   cache - answers only from a JSON fixture/disk cache;
 *   live  - Nominatim-style HTTP query (?q=<name>&format=json), results
 *           written back to the cache file keyed by query string.
 *
 * The top-ranked result's country is taken when a name is ambiguous.
 * Public services are rate-limited and drift over time, so live mode is
 * for fixture capture, not CI.
 */

#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "util.hpp"

namespace evex {

class Geocoder {
public:
    virtual ~Geocoder() = default;
    /// Display name of the top-ranked country for a place name, if any.
    virtual std::optional<std::string> top_country(const std::string& name) = 0;
};

class DisabledGeocoder final : public Geocoder {
public:
    std::optional<std::string> top_country(const std::string&) override { return std::nullopt; }
};

/// Cache file format: {"<lowercased query>": [{"country": "France"}, ...], ...}
/// An empty array records a known miss.
class CachedGeocoder : public Geocoder {
public:
    explicit CachedGeocoder(std::string cache_path) : path_(std::move(cache_path)) {
        std::ifstream in(path_);
        if (in) {
            in >> doc_;
            if (!doc_.is_object()) throw ConfigError(path_ + ": geocoder cache must be an object");
        } else {
            doc_ = nlohmann::json::object();
        }
    }

    std::optional<std::string> top_country(const std::string& name) override {
        const std::string key = str::to_lower(str::trim(name));
        auto it = doc_.find(key);
        if (it == doc_.end()) return on_miss(name, key);
        if (!it->is_array() || it->empty()) return std::nullopt;
        const auto& top = it->front();
        if (top.contains("country")) return top["country"].get<std::string>();
        return std::nullopt;
    }

protected:
    virtual std::optional<std::string> on_miss(const std::string&, const std::string&) {
        return std::nullopt;  // pure cache mode: unknown names stay unresolved
    }

    void store(const std::string& key, nlohmann::json results) {
        doc_[key] = std::move(results);
        std::ofstream out(path_, std::ios::trunc);
        if (out) out << doc_.dump(2) << "\n";
    }

    std::string path_;
    nlohmann::json doc_;
};

} // namespace evex
