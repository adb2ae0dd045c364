#pragma once

/**
 * Language-model backends behind one interface: a chat/completions-style
 * HTTP endpoint for live runs, and a scripted mock driven by a JSON rule
 * file for tests and offline fixtures.
 *
 * Mock script format: a JSON array of rules, first match wins.
 *   [{"match": "<exact prompt text>", "responses": ["draw0", "draw1"]},
 *    {"match_regex": "does 'hurt' indicate", "response": "No."}]
 * `response` answers every sample index; `responses` is indexed by
 * sample index and clamps to its last entry. A prompt no rule matches
 * raises MockScriptError carrying the prompt text.
 */

#include <chrono>
#include <fstream>
#include <memory>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "util.hpp"

namespace evex {

struct BackendRequest {
    std::string prompt_text;
    double temperature = 0.0;
    int first_sample_index = 0;  // draws are numbered for cache identity
    int n = 1;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual std::string model() const = 0;
    /// Returns exactly req.n response texts, in draw order.
    virtual std::vector<std::string> draw(const BackendRequest& req) = 0;
};

// ---------------------------------------------------------------------------
// Scripted mock
// ---------------------------------------------------------------------------

class MockBackend final : public Backend {
public:
    struct Rule {
        bool is_regex = false;
        std::string pattern;
        std::regex compiled;          // valid when is_regex
        std::vector<std::string> responses;
    };

    static MockBackend from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open mock script " + path);
        nlohmann::json doc;
        in >> doc;
        return MockBackend(doc, path);
    }

    explicit MockBackend(const nlohmann::json& doc, std::string name = "<inline>")
        : name_(std::move(name)) {
        if (!doc.is_array()) throw ConfigError(name_ + ": mock script must be a JSON array");
        for (const auto& entry : doc) {
            Rule rule;
            if (entry.contains("match")) {
                rule.pattern = entry.at("match").get<std::string>();
            } else if (entry.contains("match_regex")) {
                rule.is_regex = true;
                rule.pattern = entry.at("match_regex").get<std::string>();
                rule.compiled = std::regex(rule.pattern);
            } else {
                throw ConfigError(name_ + ": rule needs 'match' or 'match_regex'");
            }
            if (entry.contains("responses")) {
                rule.responses = entry.at("responses").get<std::vector<std::string>>();
            } else if (entry.contains("response")) {
                rule.responses = {entry.at("response").get<std::string>()};
            }
            if (rule.responses.empty())
                throw ConfigError(name_ + ": rule for '" + rule.pattern + "' has no responses");
            rules_.push_back(std::move(rule));
        }
    }

    std::string id() const override { return "mock"; }
    std::string model() const override { return "script"; }

    std::vector<std::string> draw(const BackendRequest& req) override {
        const Rule* rule = find_rule(req.prompt_text);
        if (!rule) {
            throw MockScriptError("mock script " + name_ +
                                  " has no rule for prompt:\n" + req.prompt_text);
        }
        std::vector<std::string> out;
        out.reserve(static_cast<size_t>(req.n));
        for (int k = 0; k < req.n; ++k) {
            size_t idx = std::min(static_cast<size_t>(req.first_sample_index + k),
                                  rule->responses.size() - 1);
            out.push_back(rule->responses[idx]);
        }
        return out;
    }

private:
    const Rule* find_rule(const std::string& prompt) const {
        for (const auto& r : rules_) {
            if (r.is_regex) {
                if (std::regex_search(prompt, r.compiled)) return &r;
            } else if (r.pattern == prompt) {
                return &r;
            }
        }
        return nullptr;
    }

    std::string name_;
    std::vector<Rule> rules_;
};

} // namespace evex
