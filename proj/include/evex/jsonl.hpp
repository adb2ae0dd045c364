#pragma once

/**
 * JSON-lines file helpers. Every intermediate artifact in the pipeline is
 * a .jsonl file so partial runs stay inspectable and diffable.
 */

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "util.hpp"

namespace evex::jsonl {

using json = nlohmann::json;

inline std::vector<json> read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<json> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = str::trim(line);
        if (trimmed.empty()) continue;
        try {
            rows.push_back(json::parse(trimmed));
        } catch (const json::parse_error& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

inline void write_file(const std::string& path, const std::vector<json>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path);
    for (const auto& row : rows) out << row.dump() << "\n";
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::trunc) {
        if (!out_) throw ConfigError("cannot write " + path);
    }
    void row(const json& j) { out_ << j.dump() << "\n"; }
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

} // namespace evex::jsonl
