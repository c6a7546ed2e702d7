#pragma once

#include <memory>

#include "litpipe/chat.hpp"
#include "litpipe/config.hpp"
#include "litpipe/harvest.hpp"
#include "litpipe/ingest.hpp"
#include "litpipe/review.hpp"
#include "litpipe/semantic.hpp"

namespace litpipe {

/// Owns one implementation per provider role. Search and metadata may be
/// null when neither an endpoint nor fixtures are configured.
struct Providers {
    std::unique_ptr<net::HttpTransport> transport;
    std::unique_ptr<harvest::SearchProvider> search;
    std::unique_ptr<harvest::MetadataProvider> metadata;
    std::unique_ptr<harvest::PdfFetcher> fetcher;
    std::unique_ptr<ingest::TextExtractor> extractor;
    std::unique_ptr<semantic::EmbeddingProvider> embedder;
    std::unique_ptr<chat::ChatProvider> chat;

    review::ReviewProviders review() const { return {*extractor, *embedder, *chat, metadata.get()}; }
    /// Throws Error("provider-unavailable").
    harvest::SearchProvider& require_search() const;
    harvest::MetadataProvider& require_metadata() const;
};

/// Sends http(s) URLs to the network fetcher and everything else to the
/// fixture fetcher.
class RoutingFetcher final : public harvest::PdfFetcher {
public:
    RoutingFetcher(std::unique_ptr<harvest::PdfFetcher> remote, std::unique_ptr<harvest::PdfFetcher> local)
        : remote_(std::move(remote)), local_(std::move(local)) {}
    harvest::FetchResult fetch(const std::string& url) override;

private:
    std::unique_ptr<harvest::PdfFetcher> remote_;
    std::unique_ptr<harvest::PdfFetcher> local_;
};

/// Offline (or unset endpoints): fixture search/metadata/fetch, hash
/// embeddings and the extractive chat provider. Configured endpoints select
/// the HTTP implementations unless `offline` is set.
Providers make_providers(const SuiteConfig& config);

}  // namespace litpipe
