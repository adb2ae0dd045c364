#pragma once

/**
 * Live geocoder: GET {base_url}/search?q=<name>&format=json against a
 * Nominatim-compatible service, writing results through to the disk cache
 * so later runs (and CI) replay offline.
 */

#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "geocoder.hpp"
#include "util.hpp"

namespace evex {

class HttpGeocoder final : public CachedGeocoder {
public:
    HttpGeocoder(std::string base_url, std::string cache_path,
                 std::string user_agent = "evex/0.1")
        : CachedGeocoder(std::move(cache_path)),
          base_url_(std::move(base_url)),
          user_agent_(std::move(user_agent)) {}

protected:
    std::optional<std::string> on_miss(const std::string& name, const std::string& key) override {
        httplib::Client client(base_url_);
        client.set_connection_timeout(20);
        client.set_read_timeout(20);
        httplib::Headers headers{{"User-Agent", user_agent_}};
        auto res = client.Get("/search?q=" + httplib::detail::encode_url(name) + "&format=json",
                              headers);
        if (!res || res->status != 200) return std::nullopt;  // soft failure, stay unresolved

        nlohmann::json results;
        try {
            results = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error&) {
            return std::nullopt;
        }
        nlohmann::json compact = nlohmann::json::array();
        if (results.is_array()) {
            for (const auto& r : results) {
                nlohmann::json row = nlohmann::json::object();
                if (r.contains("display_name")) {
                    // Nominatim puts the country last in the display name
                    auto parts = str::split(r["display_name"].get<std::string>(), ',');
                    if (!parts.empty()) row["country"] = str::trim(parts.back());
                }
                if (r.contains("address") && r["address"].contains("country"))
                    row["country"] = r["address"]["country"];
                if (row.contains("country")) compact.push_back(row);
            }
        }
        store(key, compact);
        if (compact.empty()) return std::nullopt;
        return compact.front()["country"].get<std::string>();
    }

private:
    std::string base_url_;
    std::string user_agent_;
};

} // namespace evex
