#include "litpipe/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include "litpipe/error.hpp"
#include "litpipe/text.hpp"

namespace litpipe::semantic {

using nlohmann::json;

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    double s = 0.0;
    const auto n = std::min(a.dim(), b.dim());
    for (std::size_t i = 0; i < n; ++i) s += a.values[i] * b.values[i];
    return s;
}

double l2_norm(const EmbeddingVector& v) { return std::sqrt(dot(v, v)); }

EmbeddingVector normalized(EmbeddingVector v) {
    for (double x : v.values) {
        if (!std::isfinite(x)) throw Error("invalid-vector", "vector has NaN or Inf components");
    }
    const double n = l2_norm(v);
    if (!(n > 0.0)) throw Error("invalid-vector", "zero vector cannot be normalized");
    for (double& x : v.values) x /= n;
    return v;
}

std::string EntryKey::str() const { return sub ? id + "#" + std::to_string(*sub) : id; }

bool hit_order(const ScoredHit& a, const ScoredHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.key < b.key;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> tokenize(std::string_view t) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : t) {
        const bool token_char = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (token_char) {
            cur.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

EmbeddingVector hash_embed(std::string_view t) {
    const auto tokens = tokenize(t);
    if (tokens.empty()) throw Error("all-tokens-empty", "text has no alphanumeric content");
    EmbeddingVector v;
    v.values.assign(kHashDim, 0.0);
    for (const auto& tok : tokens) v.values[fnv1a64(tok) % kHashDim] += 1.0;
    return normalized(std::move(v));
}

std::vector<std::vector<double>> HashEmbedder::embed(std::span<const std::string> texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hash_embed(t).values);
    return out;
}

RemoteEmbedder::RemoteEmbedder(std::string url, std::string api_key, net::HttpTransport& transport,
                               net::RateLimit limits, std::size_t batch_size, net::Clock& clock)
    : url_(std::move(url)),
      key_(std::move(api_key)),
      transport_(transport),
      limits_(limits),
      batch_(std::max<std::size_t>(batch_size, 1)),
      clock_(clock),
      limiter_(limits.requests_per_second, clock) {}

std::vector<std::vector<double>> RemoteEmbedder::embed(std::span<const std::string> texts) {
    std::vector<std::vector<double>> out;
    for (std::size_t off = 0; off < texts.size(); off += batch_) {
        const auto batch = texts.subspan(off, std::min(batch_, texts.size() - off));
        net::HttpRequest req;
        req.method = "POST";
        req.url = url_;
        req.body = json{{"texts", std::vector<std::string>(batch.begin(), batch.end())}}.dump();
        if (!key_.empty()) req.headers.emplace_back("Authorization", "Bearer " + key_);
        const auto resp = net::send_with_retries(transport_, req, limits_, clock_, &limiter_);
        try {
            const auto body = json::parse(resp.body);
            const auto& vectors = body.at("vectors");
            if (!vectors.is_array() || vectors.size() != batch.size()) {
                throw Error("dim-mismatch", "provider returned " + std::to_string(vectors.size()) + " vectors for " +
                                                std::to_string(batch.size()) + " texts");
            }
            for (const auto& v : vectors) out.push_back(v.get<std::vector<double>>());
        } catch (const json::exception& e) {
            throw Error("malformed-response", std::string("embedding response: ") + e.what());
        }
    }
    return out;
}

std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts, EmbeddingProvider& provider) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (text::is_blank(texts[i])) throw Error("empty-text", "text at index " + std::to_string(i) + " is empty");
    }
    if (texts.empty()) return {};
    auto raw = provider.embed(texts);
    if (raw.size() != texts.size()) {
        throw Error("dim-mismatch", "provider returned " + std::to_string(raw.size()) + " vectors for " +
                                        std::to_string(texts.size()) + " texts");
    }
    const auto dim = raw.front().size();
    if (dim == 0) throw Error("dim-mismatch", "provider returned empty vectors");
    std::vector<EmbeddingVector> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].size() != dim) {
            throw Error("dim-mismatch", "vector " + std::to_string(i) + " has dim " + std::to_string(raw[i].size()) +
                                            ", expected " + std::to_string(dim));
        }
        out.push_back(normalized(EmbeddingVector{std::move(raw[i])}));
    }
    return out;
}

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error("dim-mismatch", "index dimension must be positive");
}

VectorIndex::VectorIndex(VectorIndex&& other) noexcept {
    std::unique_lock lock(other.mu_);
    dim_ = other.dim_;
    entries_ = std::move(other.entries_);
    by_key_ = std::move(other.by_key_);
}

VectorIndex& VectorIndex::operator=(VectorIndex&& other) noexcept {
    if (this == &other) return *this;
    std::scoped_lock lock(mu_, other.mu_);
    dim_ = other.dim_;
    entries_ = std::move(other.entries_);
    by_key_ = std::move(other.by_key_);
    return *this;
}

std::size_t VectorIndex::size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
}

void VectorIndex::insert(EntryKey key, const EmbeddingVector& vector, std::string payload) {
    if (vector.dim() != dim_) {
        throw Error("dim-mismatch", "vector dim " + std::to_string(vector.dim()) + " != index dim " +
                                        std::to_string(dim_));
    }
    auto unit = normalized(vector);
    std::unique_lock lock(mu_);
    if (by_key_.count(key)) throw Error("duplicate-key", "key " + key.str() + " already indexed");
    by_key_.emplace(key, entries_.size());
    entries_.push_back({std::move(key), std::move(unit), std::move(payload)});
}

std::optional<std::string> VectorIndex::payload(const EntryKey& key) const {
    std::shared_lock lock(mu_);
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return entries_[it->second].payload;
}

std::optional<EmbeddingVector> VectorIndex::vector(const EntryKey& key) const {
    std::shared_lock lock(mu_);
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return entries_[it->second].vector;
}

std::vector<ScoredHit> VectorIndex::search_topk(const EmbeddingVector& query, std::size_t k,
                                                const std::function<bool(const EntryKey&)>& filter) const {
    if (query.dim() != dim_) {
        throw Error("dim-mismatch", "query dim " + std::to_string(query.dim()) + " != index dim " +
                                        std::to_string(dim_));
    }
    if (k == 0) throw Error("invalid-argument", "k must be at least 1");
    const auto q = normalized(query);
    std::shared_lock lock(mu_);
    std::vector<ScoredHit> hits;
    hits.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (filter && !filter(e.key)) continue;
        hits.push_back({e.key, std::clamp(dot(q, e.vector), -1.0, 1.0)});
    }
    const auto take = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(), hit_order);
    hits.resize(take);
    return hits;
}

json VectorIndex::to_json() const {
    std::shared_lock lock(mu_);
    json entries = json::array();
    for (const auto& e : entries_) {
        entries.push_back({{"key", e.key.id},
                           {"sub", e.key.sub ? json(*e.key.sub) : json()},
                           {"dim", dim_},
                           {"values", e.vector.values},
                           {"payload", e.payload}});
    }
    return json{{"dim", dim_}, {"entries", std::move(entries)}};
}

VectorIndex VectorIndex::from_json(const json& j) {
    try {
        VectorIndex index(j.at("dim").get<std::size_t>());
        for (const auto& e : j.at("entries")) {
            EntryKey key{e.at("key").get<std::string>(), std::nullopt};
            if (e.contains("sub") && !e["sub"].is_null()) key.sub = e["sub"].get<std::int64_t>();
            index.insert(std::move(key), EmbeddingVector{e.at("values").get<std::vector<double>>()},
                         e.value("payload", std::string()));
        }
        return index;
    } catch (const json::exception& ex) {
        throw Error("malformed-index", ex.what());
    }
}

void VectorIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("dest-unwritable", "cannot write " + path.string());
    out << to_json().dump();
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("malformed-index", "cannot read " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& ex) {
        throw Error("malformed-index", ex.what());
    }
}

std::vector<ScoredHit> search_topk(const VectorIndex& index, const EmbeddingVector& query, std::size_t k) {
    return index.search_topk(query, k);
}

}  // namespace litpipe::semantic
