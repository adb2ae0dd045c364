#pragma once

/**
 * Chat/completions-style HTTP backend. Request body is
 * {model, messages, temperature, n}; the response's choices are read in
 * order. Transport and rate-limit failures are retried with exponential
 * backoff; anything else is a protocol error.
 */

#include <chrono>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "backend.hpp"
#include "util.hpp"

namespace evex {

struct HttpBackendConfig {
    std::string base_url;          // scheme + host[:port], e.g. https://api.example.com
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_token;         // resolved from the environment by the caller
    int max_attempts = 3;
    int initial_backoff_ms = 500;
    int timeout_s = 120;
};

class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty()) throw ConfigError("http backend needs a base_url");
        if (cfg_.model.empty()) throw ConfigError("http backend needs a model name");
    }

    std::string id() const override { return "http:" + cfg_.base_url; }
    std::string model() const override { return cfg_.model; }

    std::vector<std::string> draw(const BackendRequest& req) override {
        nlohmann::json body = {
            {"model", cfg_.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt_text}}})},
            {"temperature", req.temperature},
            {"n", req.n},
        };

        int backoff = cfg_.initial_backoff_ms;
        std::string last_error;
        for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
            httplib::Client client(cfg_.base_url);
            client.set_connection_timeout(cfg_.timeout_s);
            client.set_read_timeout(cfg_.timeout_s);
            httplib::Headers headers;
            if (!cfg_.api_token.empty())
                headers.emplace("Authorization", "Bearer " + cfg_.api_token);

            auto res = client.Post(cfg_.path, headers, body.dump(), "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
            } else if (res->status == 429 || res->status >= 500) {
                last_error = "status " + std::to_string(res->status);
            } else if (res->status != 200) {
                throw BackendError("backend returned status " + std::to_string(res->status) +
                                   ": " + res->body);
            } else {
                return parse_choices(res->body, req.n);
            }
            if (attempt < cfg_.max_attempts) {
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
                backoff *= 2;
            }
        }
        throw BackendError("backend unreachable after " + std::to_string(cfg_.max_attempts) +
                               " attempts (" + last_error + ")",
                           /*retriable=*/true);
    }

private:
    static std::vector<std::string> parse_choices(const std::string& payload, int expected) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(payload);
        } catch (const nlohmann::json::parse_error& e) {
            throw BackendError(std::string("malformed backend payload: ") + e.what());
        }
        std::vector<std::string> texts;
        if (doc.contains("choices") && doc["choices"].is_array()) {
            for (const auto& choice : doc["choices"]) {
                if (choice.contains("message") && choice["message"].contains("content"))
                    texts.push_back(choice["message"]["content"].get<std::string>());
                else if (choice.contains("text"))
                    texts.push_back(choice["text"].get<std::string>());
            }
        }
        if (static_cast<int>(texts.size()) != expected) {
            throw BackendError("backend returned " + std::to_string(texts.size()) +
                               " choices, expected " + std::to_string(expected));
        }
        return texts;
    }

    HttpBackendConfig cfg_;
};

} // namespace evex
