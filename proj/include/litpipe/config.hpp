#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "litpipe/ingest.hpp"
#include "litpipe/net.hpp"
#include "litpipe/review.hpp"

namespace litpipe {

namespace fs = std::filesystem;

struct Endpoint {
    std::string url;
    std::string key;
};

struct SuiteConfig {
    fs::path workspace = "workspace";
    bool offline = false;
    fs::path fixtures;        // fixture data for offline search, metadata and PDF fetching
    fs::path extractor_tool;  // `<tool> <pdf>` text extractor; empty uses the builtin reader
    fs::path static_dir;      // web UI bundle served at "/" by `serve`
    Endpoint search;
    Endpoint metadata;
    Endpoint embedding;
    Endpoint chat;
    net::RateLimit rate;
    ingest::ChunkParams chunk;
    std::size_t k = 6;
    std::size_t cluster_k = 5;
    std::size_t workers = 4;
    std::size_t prompt_budget = 24000;
    review::QuerySet queries = review::QuerySet::defaults();
    std::string host = "127.0.0.1";
    int port = 8765;

    /// Throws Error("invalid-config").
    void validate() const;

    /// Absolute paths are kept; relative ones resolve against the workspace.
    fs::path resolve(const fs::path& p) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// TOML-style `key = value` lines with `[section]` headers, `#` comments,
/// double-quoted strings, integers, floats and booleans. Relative paths in
/// the file resolve against `base_dir`. Throws Error("invalid-config").
SuiteConfig parse_config(std::string_view text, const fs::path& base_dir = {});

SuiteConfig load_config(const fs::path& path);

/// LITPIPE_* variables override file values.
void apply_env(SuiteConfig& config, const EnvLookup& env = process_env);

/// Applies a JSON object of `{"section.key": value}` or nested
/// `{"section": {"key": value}}` overrides (used by the HTTP API).
void apply_overrides(SuiteConfig& config, const nlohmann::json& overrides);

nlohmann::json to_json(const SuiteConfig& config);

}  // namespace litpipe
