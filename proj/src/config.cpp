#include "litpipe/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <variant>

#include "litpipe/error.hpp"
#include "litpipe/text.hpp"

namespace litpipe {

using nlohmann::json;

void SuiteConfig::validate() const {
    rate.validate();
    chunk.validate();
    if (k == 0) throw Error("invalid-config", "retrieval.k must be at least 1");
    if (cluster_k == 0) throw Error("invalid-config", "clustering.K must be at least 1");
    if (workers == 0 || workers > 64) throw Error("invalid-config", "table.workers must be in [1, 64]");
    if (prompt_budget < 256) throw Error("invalid-config", "chat.budget must be at least 256");
    if (port < 0 || port > 65535) throw Error("invalid-config", "server.port out of range");
    if (workspace.empty()) throw Error("invalid-config", "workspace must be set");
    queries.validate();
}

fs::path SuiteConfig::resolve(const fs::path& p) const {
    if (p.empty() || p.is_absolute()) return p;
    return workspace / p;
}

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

namespace {

using Value = std::variant<std::string, double, bool>;

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
    throw Error("invalid-config", "line " + std::to_string(line) + ": " + msg);
}

Value parse_value(std::string_view raw, std::size_t line) {
    const auto v = text::trim(raw);
    if (v.empty()) bad(line, "missing value");
    if (v.front() == '"') {
        std::string out;
        std::size_t i = 1;
        for (; i < v.size() && v[i] != '"'; ++i) {
            if (v[i] == '\\' && i + 1 < v.size()) {
                const char e = v[++i];
                out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            } else {
                out += v[i];
            }
        }
        if (i >= v.size()) bad(line, "unterminated string");
        const auto rest = text::trim(v.substr(i + 1));
        if (!rest.empty() && rest.front() != '#') bad(line, "unexpected text after string");
        return out;
    }
    auto bare = std::string(text::trim(v.substr(0, v.find('#'))));
    if (bare == "true") return true;
    if (bare == "false") return false;
    char* end = nullptr;
    const double d = std::strtod(bare.c_str(), &end);
    if (end == bare.c_str() || *end != '\0') bad(line, "cannot parse value '" + bare + "'");
    return d;
}

std::string as_string(const Value& v, const std::string& key) {
    if (auto s = std::get_if<std::string>(&v)) return *s;
    throw Error("invalid-config", key + " must be a string");
}

double as_number(const Value& v, const std::string& key) {
    if (auto d = std::get_if<double>(&v)) return *d;
    if (auto s = std::get_if<std::string>(&v)) {
        char* end = nullptr;
        const double d = std::strtod(s->c_str(), &end);
        if (end != s->c_str() && *end == '\0') return d;
    }
    throw Error("invalid-config", key + " must be a number");
}

std::size_t as_count(const Value& v, const std::string& key) {
    const double d = as_number(v, key);
    if (d < 0 || d != static_cast<double>(static_cast<long long>(d))) {
        throw Error("invalid-config", key + " must be a nonnegative integer");
    }
    return static_cast<std::size_t>(d);
}

bool as_bool(const Value& v, const std::string& key) {
    if (auto b = std::get_if<bool>(&v)) return *b;
    if (auto s = std::get_if<std::string>(&v)) {
        const auto l = text::to_lower_ascii(*s);
        if (l == "1" || l == "true" || l == "yes") return true;
        if (l == "0" || l == "false" || l == "no" || l.empty()) return false;
    }
    throw Error("invalid-config", key + " must be a boolean");
}

fs::path as_path(const Value& v, const std::string& key, const fs::path& base) {
    fs::path p = as_string(v, key);
    if (!p.empty() && p.is_relative() && !base.empty()) p = base / p;
    return p;
}

void set_key(SuiteConfig& c, const std::string& key, const Value& v, const fs::path& base) {
    if (key == "workspace") c.workspace = as_path(v, key, base);
    else if (key == "offline") c.offline = as_bool(v, key);
    else if (key == "fixtures") c.fixtures = as_path(v, key, base);
    else if (key == "extractor.tool") c.extractor_tool = as_path(v, key, base);
    else if (key == "server.static_dir") c.static_dir = as_path(v, key, base);
    else if (key == "server.host") c.host = as_string(v, key);
    else if (key == "server.port") c.port = static_cast<int>(as_count(v, key));
    else if (key == "search.url") c.search.url = as_string(v, key);
    else if (key == "search.key") c.search.key = as_string(v, key);
    else if (key == "metadata.url") c.metadata.url = as_string(v, key);
    else if (key == "metadata.key") c.metadata.key = as_string(v, key);
    else if (key == "embedding.url") c.embedding.url = as_string(v, key);
    else if (key == "embedding.key") c.embedding.key = as_string(v, key);
    else if (key == "chat.url") c.chat.url = as_string(v, key);
    else if (key == "chat.key") c.chat.key = as_string(v, key);
    else if (key == "chat.budget") c.prompt_budget = as_count(v, key);
    else if (key == "rate_limit.requests_per_second") c.rate.requests_per_second = as_number(v, key);
    else if (key == "rate_limit.max_concurrent") c.rate.max_concurrent = static_cast<int>(as_count(v, key));
    else if (key == "rate_limit.max_retries") c.rate.max_retries = static_cast<int>(as_count(v, key));
    else if (key == "rate_limit.backoff_ms") c.rate.backoff_base = std::chrono::milliseconds(as_count(v, key));
    else if (key == "chunking.max_chunk_chars") c.chunk.max_chunk_chars = as_count(v, key);
    else if (key == "chunking.overlap_chars") c.chunk.overlap_chars = as_count(v, key);
    else if (key == "retrieval.k") c.k = as_count(v, key);
    else if (key == "clustering.K" || key == "clustering.k") c.cluster_k = as_count(v, key);
    else if (key == "table.workers") c.workers = as_count(v, key);
    else if (key == "queries.intro") c.queries.intro_q = as_string(v, key);
    else if (key == "queries.methods") c.queries.methods_q = as_string(v, key);
    else if (key == "queries.results") c.queries.results_q = as_string(v, key);
    else throw Error("invalid-config", "unknown key '" + key + "'");
}

}  // namespace

SuiteConfig parse_config(std::string_view content, const fs::path& base_dir) {
    SuiteConfig c;
    if (!base_dir.empty()) c.workspace = base_dir / c.workspace;
    std::string section;
    std::size_t lineno = 0;
    for (const auto& raw : text::split(content, '\n')) {
        ++lineno;
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            const auto close = line.find(']');
            if (close == std::string_view::npos) bad(lineno, "unterminated section header");
            section = std::string(text::trim(line.substr(1, close - 1)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) bad(lineno, "expected key = value");
        const auto key = std::string(text::trim(line.substr(0, eq)));
        if (key.empty()) bad(lineno, "empty key");
        set_key(c, section.empty() ? key : section + "." + key, parse_value(line.substr(eq + 1), lineno), base_dir);
    }
    return c;
}

SuiteConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("invalid-config", "cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fs::absolute(path).parent_path());
}

void apply_env(SuiteConfig& c, const EnvLookup& env) {
    const std::pair<const char*, const char*> vars[] = {
        {"LITPIPE_WORKSPACE", "workspace"},       {"LITPIPE_OFFLINE", "offline"},
        {"LITPIPE_FIXTURES", "fixtures"},         {"LITPIPE_PDF2TEXT", "extractor.tool"},
        {"LITPIPE_SEARCH_URL", "search.url"},     {"LITPIPE_SEARCH_KEY", "search.key"},
        {"LITPIPE_META_URL", "metadata.url"},     {"LITPIPE_META_KEY", "metadata.key"},
        {"LITPIPE_EMBED_URL", "embedding.url"},   {"LITPIPE_EMBED_KEY", "embedding.key"},
        {"LITPIPE_CHAT_URL", "chat.url"},         {"LITPIPE_CHAT_KEY", "chat.key"},
        {"LITPIPE_PORT", "server.port"},          {"LITPIPE_STATIC_DIR", "server.static_dir"},
    };
    for (const auto& [var, key] : vars) {
        if (auto v = env(var)) set_key(c, key, Value(*v), {});
    }
}

void apply_overrides(SuiteConfig& c, const json& overrides) {
    if (overrides.is_null()) return;
    if (!overrides.is_object()) throw Error("invalid-config", "overrides must be an object");
    for (const auto& [k, v] : overrides.items()) {
        if (v.is_object()) {
            for (const auto& [k2, v2] : v.items()) apply_overrides(c, json{{k + "." + k2, v2}});
            continue;
        }
        Value val;
        if (v.is_boolean()) val = v.get<bool>();
        else if (v.is_number()) val = v.get<double>();
        else if (v.is_string()) val = v.get<std::string>();
        else throw Error("invalid-config", "override " + k + " has an unsupported type");
        set_key(c, k, val, {});
    }
}

json to_json(const SuiteConfig& c) {
    auto endpoint = [](const Endpoint& e) { return json{{"url", e.url}, {"key_set", !e.key.empty()}}; };
    return json{{"workspace", c.workspace.string()},
                {"offline", c.offline},
                {"fixtures", c.fixtures.string()},
                {"extractor_tool", c.extractor_tool.string()},
                {"search", endpoint(c.search)},
                {"metadata", endpoint(c.metadata)},
                {"embedding", endpoint(c.embedding)},
                {"chat", endpoint(c.chat)},
                {"rate_limit",
                 {{"requests_per_second", c.rate.requests_per_second},
                  {"max_concurrent", c.rate.max_concurrent},
                  {"max_retries", c.rate.max_retries},
                  {"backoff_ms", c.rate.backoff_base.count()}}},
                {"chunking", {{"max_chunk_chars", c.chunk.max_chunk_chars}, {"overlap_chars", c.chunk.overlap_chars}}},
                {"k", c.k},
                {"cluster_k", c.cluster_k},
                {"queries", c.queries},
                {"server", {{"host", c.host}, {"port", c.port}}}};
}

}  // namespace litpipe
