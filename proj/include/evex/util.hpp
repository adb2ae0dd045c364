#pragma once

/**
 * Small shared helpers: string trimming/casing, error types, and the
 * split/join utilities the rest of the library leans on.
 */

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace evex {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Remote backend failed (transport, HTTP status, malformed payload).
struct BackendError : Error {
    explicit BackendError(const std::string& what, bool retriable_ = false)
        : Error(what), retriable(retriable_) {}
    bool retriable;
};

/// Mock script has no rule for a prompt.
struct MockScriptError : Error {
    using Error::Error;
};

/// Bad input file or configuration.
struct ConfigError : Error {
    using Error::Error;
};

namespace str {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// Collapse runs of whitespace to single spaces and trim the ends.
inline std::string normalize_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/// Case-insensitive substring test; returns position or npos.
inline size_t ifind(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    if (needle.size() > haystack.size()) return std::string::npos;
    const std::string h = to_lower(haystack);
    const std::string n = to_lower(needle);
    return h.find(n);
}

inline bool icontains(std::string_view haystack, std::string_view needle) {
    return ifind(haystack, needle) != std::string::npos;
}

} // namespace str

/// Run fn(i) for i in [0, n) on up to `workers` threads. fn must be safe
/// to call concurrently for distinct i. The first exception is rethrown
/// on the calling thread after all workers join.
inline void parallel_for_index(size_t n, int workers,
                               const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    const int pool = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (pool == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(pool));
    for (int t = 0; t < pool; ++t) {
        threads.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace evex
