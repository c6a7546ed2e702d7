#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "litpipe/bibkit.hpp"
#include "litpipe/net.hpp"

namespace litpipe::harvest {

namespace fs = std::filesystem;

struct SearchQuery {
    std::optional<std::string> topic;
    std::optional<std::string> title;
    std::optional<std::string> author;
    std::optional<int> year_from;
    std::optional<int> year_to;
    int max_results = 25;

    /// Throws Error("invalid-query").
    void validate() const;
};

struct SavedFile {
    std::string record_id;
    fs::path path;
};

struct Failure {
    std::string record_id;
    std::string reason;
};

struct DownloadReport {
    std::vector<SavedFile> saved;
    fs::path links_file;
    fs::path not_found_file;
    std::vector<Failure> failures;
    std::vector<std::string> not_found;  // record ids, one not_found.txt block each
};

struct CitationGraph {
    BibRecord root;
    std::vector<BibRecord> references;
    std::vector<BibRecord> citations;
};

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    virtual std::vector<BibRecord> search(const SearchQuery& query) = 0;
};

class MetadataProvider {
public:
    virtual ~MetadataProvider() = default;
    /// Raw graph for a normalized DOI; throws Error("doi-not-found").
    virtual CitationGraph graph(const std::string& doi) = 0;
    /// Root metadata only.
    virtual BibRecord lookup(const std::string& doi) { return graph(doi).root; }
};

enum class FetchStatus { ok, not_found, failed };

struct FetchResult {
    FetchStatus status = FetchStatus::failed;
    std::string body;
    std::string reason;
};

/// Retrieves one PDF URL. Implementations must be safe to call concurrently.
class PdfFetcher {
public:
    virtual ~PdfFetcher() = default;
    virtual FetchResult fetch(const std::string& url) = 0;
};

/// Records from `<dir>/search.json` (array of BibRecord). Matches the query
/// fields case-insensitively as substrings; rank order is file order.
class FixtureSearchProvider final : public SearchProvider {
public:
    explicit FixtureSearchProvider(fs::path dir);
    explicit FixtureSearchProvider(std::vector<BibRecord> records) : records_(std::move(records)) {}
    std::vector<BibRecord> search(const SearchQuery& query) override;

private:
    std::vector<BibRecord> records_;
};

/// Graphs from `<dir>/graphs/*.json`, each
/// `{"root": BibRecord, "references": [...], "citations": [...]}`.
/// A missing `citations` key means the provider has no citation data.
class FixtureMetadataProvider final : public MetadataProvider {
public:
    explicit FixtureMetadataProvider(fs::path dir);
    CitationGraph graph(const std::string& doi) override;
    std::size_t size() const { return graphs_.size(); }

private:
    std::map<std::string, CitationGraph> graphs_;
};

/// Serves `pdfs/...` URLs (optionally prefixed `fixture:`) from `<dir>`.
/// http(s) URLs are reported as not found.
class FixtureFetcher final : public PdfFetcher {
public:
    explicit FixtureFetcher(fs::path dir) : dir_(std::move(dir)) {}
    FetchResult fetch(const std::string& url) override;

private:
    fs::path dir_;
};

/// CORE-style search API: GET `<base>/search/works?q=...&limit=N` with a
/// bearer key; reads `results[]`.
class HttpSearchProvider final : public SearchProvider {
public:
    HttpSearchProvider(std::string base_url, std::string api_key, net::HttpTransport& transport,
                       net::RateLimit limits, net::Clock& clock = net::system_clock());
    std::vector<BibRecord> search(const SearchQuery& query) override;
    static std::string build_query(const SearchQuery& query);

private:
    std::string base_;
    std::string key_;
    net::HttpTransport& transport_;
    net::RateLimit limits_;
    net::Clock& clock_;
    net::RateLimiter limiter_;
};

/// CrossRef-style metadata API: GET `<base>/works/<doi>`. References come
/// from `message.reference[]`; citing works from `message.cited-by[]` when the
/// service exposes them (otherwise empty).
class HttpMetadataProvider final : public MetadataProvider {
public:
    HttpMetadataProvider(std::string base_url, net::HttpTransport& transport, net::RateLimit limits,
                         net::Clock& clock = net::system_clock());
    CitationGraph graph(const std::string& doi) override;

private:
    std::string base_;
    net::HttpTransport& transport_;
    net::RateLimit limits_;
    net::Clock& clock_;
    net::RateLimiter limiter_;
};

class HttpFetcher final : public PdfFetcher {
public:
    HttpFetcher(net::HttpTransport& transport, net::RateLimit limits, net::Clock& clock = net::system_clock());
    FetchResult fetch(const std::string& url) override;

private:
    net::HttpTransport& transport_;
    net::RateLimit limits_;
    net::Clock& clock_;
    net::HostRateLimiters limiters_;
};

std::vector<BibRecord> search_articles(const SearchQuery& query, SearchProvider& provider);

/// Saves each record's first retrievable PDF under `dest` and writes
/// links.txt / not_found.txt. Fetches run on up to limits.max_concurrent
/// threads, each paced by a shared limiter at limits.requests_per_second.
DownloadReport download_pdfs(const std::vector<BibRecord>& records, const fs::path& dest,
                             const net::RateLimit& limits, PdfFetcher& fetcher,
                             net::Clock& clock = net::system_clock());

CitationGraph extract_citation_graph(const std::string& doi, MetadataProvider& provider);

struct GraphProviders {
    MetadataProvider* metadata = nullptr;
    PdfFetcher* fetcher = nullptr;
    SearchProvider* search = nullptr;  // optional: resolves PDFs for URL-less records
};

struct GraphHarvestReport {
    CitationGraph graph;
    DownloadReport root;
    DownloadReport references;
    DownloadReport citations;

    /// Union of the three reports (links/not-found files of the root folder).
    DownloadReport merged() const;
};

GraphHarvestReport harvest_graph(const std::string& doi, const fs::path& dest, const GraphProviders& providers,
                                 const net::RateLimit& limits, net::Clock& clock = net::system_clock());

void to_json(nlohmann::json& j, const SearchQuery& q);
void from_json(const nlohmann::json& j, SearchQuery& q);
void to_json(nlohmann::json& j, const DownloadReport& r);
void to_json(nlohmann::json& j, const CitationGraph& g);
void from_json(const nlohmann::json& j, CitationGraph& g);

}  // namespace litpipe::harvest
