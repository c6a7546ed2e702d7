#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "litpipe/net.hpp"

namespace litpipe::semantic {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

double dot(const EmbeddingVector& a, const EmbeddingVector& b);
double l2_norm(const EmbeddingVector& v);

/// Unit-length copy; throws Error("invalid-vector") on zero, NaN or Inf.
EmbeddingVector normalized(EmbeddingVector v);

/// Index key: (doc_id, chunk_id) for chunks, (row_id, none) for table rows.
/// Ordered by id, then sub (absent sorts first).
struct EntryKey {
    std::string id;
    std::optional<std::int64_t> sub;

    static EntryKey chunk(std::string doc_id, std::int64_t chunk_id) { return {std::move(doc_id), chunk_id}; }
    static EntryKey row(std::string row_id) { return {std::move(row_id), std::nullopt}; }

    std::string str() const;
    auto operator<=>(const EntryKey&) const = default;
};

struct ScoredHit {
    EntryKey key;
    double score = 0.0;

    bool operator==(const ScoredHit&) const = default;
};

/// Descending score, then ascending key.
bool hit_order(const ScoredHit& a, const ScoredHit& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
};

/// 256-bucket FNV-1a bag of words; see hash_embed.
class HashEmbedder final : public EmbeddingProvider {
public:
    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
};

/// POSTs `{"texts": [...]}` and reads `{"vectors": [[...], ...]}` in batches.
class RemoteEmbedder final : public EmbeddingProvider {
public:
    RemoteEmbedder(std::string url, std::string api_key, net::HttpTransport& transport, net::RateLimit limits,
                   std::size_t batch_size = 64, net::Clock& clock = net::system_clock());
    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

private:
    std::string url_;
    std::string key_;
    net::HttpTransport& transport_;
    net::RateLimit limits_;
    std::size_t batch_;
    net::Clock& clock_;
    net::RateLimiter limiter_;
};

constexpr std::size_t kHashDim = 256;

std::uint64_t fnv1a64(std::string_view bytes);

/// Lowercased tokens split on runs of non-alphanumeric ASCII; bytes >= 0x80
/// count as token characters so non-Latin words survive.
std::vector<std::string> tokenize(std::string_view text);

/// Throws Error("all-tokens-empty") when text has no token.
EmbeddingVector hash_embed(std::string_view text);

/// Order-preserving; validates inputs, dimension consistency and finiteness,
/// and returns unit-normalized vectors.
std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts, EmbeddingProvider& provider);

/// Exact cosine index. Vectors are normalized on insertion. Many concurrent
/// readers, writers serialized internally.
class VectorIndex {
public:
    explicit VectorIndex(std::size_t dim);
    VectorIndex(VectorIndex&& other) noexcept;
    VectorIndex& operator=(VectorIndex&& other) noexcept;
    VectorIndex(const VectorIndex&) = delete;
    VectorIndex& operator=(const VectorIndex&) = delete;

    std::size_t dim() const { return dim_; }
    std::size_t size() const;

    /// Throws Error("dim-mismatch"), Error("duplicate-key"), Error("invalid-vector").
    void insert(EntryKey key, const EmbeddingVector& vector, std::string payload = {});

    std::optional<std::string> payload(const EntryKey& key) const;
    std::optional<EmbeddingVector> vector(const EntryKey& key) const;

    /// Top min(k, candidates) hits by cosine; `filter` restricts candidates.
    std::vector<ScoredHit> search_topk(const EmbeddingVector& query, std::size_t k,
                                       const std::function<bool(const EntryKey&)>& filter = {}) const;

    nlohmann::json to_json() const;
    static VectorIndex from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static VectorIndex load(const std::filesystem::path& path);

private:
    struct Entry {
        EntryKey key;
        EmbeddingVector vector;
        std::string payload;
    };

    std::size_t dim_;
    mutable std::shared_mutex mu_;
    std::vector<Entry> entries_;
    std::map<EntryKey, std::size_t> by_key_;
};

std::vector<ScoredHit> search_topk(const VectorIndex& index, const EmbeddingVector& query, std::size_t k);

}  // namespace litpipe::semantic
