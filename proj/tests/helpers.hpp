#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>

#include <json.hpp>

#include <evex/backend.hpp>
#include <evex/gateway.hpp>

namespace test {

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        path = std::filesystem::temp_directory_path() /
               ("evex_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string write_file(const TempDir& dir, const std::string& name,
                              const std::string& body) {
    const std::string p = dir.file(name);
    std::ofstream out(p, std::ios::trunc);
    out << body;
    return p;
}

struct GatewayFixture {
    std::shared_ptr<evex::QueryLedger> ledger = std::make_shared<evex::QueryLedger>();
    std::shared_ptr<evex::Backend> backend;
    std::unique_ptr<evex::Gateway> gateway;

    explicit GatewayFixture(const nlohmann::json& script,
                            std::shared_ptr<evex::ResponseCache> cache = nullptr) {
        backend = std::make_shared<evex::MockBackend>(script);
        gateway = std::make_unique<evex::Gateway>(backend, ledger, std::move(cache));
    }

    evex::Gateway& gw() { return *gateway; }
};

/// Render a set of items as the bulleted list the lexical parser expects.
inline std::string bullets(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) out += "- " + item + "\n";
    if (out.empty()) out = "-\n";  // parseable empty list
    return out;
}

} // namespace test
