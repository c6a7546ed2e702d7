#include "litpipe/providers.hpp"

#include "litpipe/error.hpp"

namespace litpipe {

harvest::SearchProvider& Providers::require_search() const {
    if (!search) throw Error("provider-unavailable", "no search provider configured (set search.url or fixtures)");
    return *search;
}

harvest::MetadataProvider& Providers::require_metadata() const {
    if (!metadata) {
        throw Error("provider-unavailable", "no metadata provider configured (set metadata.url or fixtures)");
    }
    return *metadata;
}

harvest::FetchResult RoutingFetcher::fetch(const std::string& url) {
    const bool remote = url.starts_with("http://") || url.starts_with("https://");
    if (remote && remote_) return remote_->fetch(url);
    if (local_) return local_->fetch(url);
    return {harvest::FetchStatus::not_found, {}, "no fetcher for " + url};
}

Providers make_providers(const SuiteConfig& config) {
    config.validate();
    Providers p;
    p.transport = std::make_unique<net::HttplibTransport>();
    const bool live = !config.offline;
    const bool fixtures = !config.fixtures.empty();

    if (live && !config.search.url.empty()) {
        p.search = std::make_unique<harvest::HttpSearchProvider>(config.search.url, config.search.key, *p.transport,
                                                                 config.rate);
    } else if (fixtures) {
        p.search = std::make_unique<harvest::FixtureSearchProvider>(config.fixtures);
    }

    if (live && !config.metadata.url.empty()) {
        p.metadata = std::make_unique<harvest::HttpMetadataProvider>(config.metadata.url, *p.transport, config.rate);
    } else if (fixtures) {
        p.metadata = std::make_unique<harvest::FixtureMetadataProvider>(config.fixtures);
    }

    std::unique_ptr<harvest::PdfFetcher> remote;
    if (live) remote = std::make_unique<harvest::HttpFetcher>(*p.transport, config.rate);
    std::unique_ptr<harvest::PdfFetcher> local;
    if (fixtures) local = std::make_unique<harvest::FixtureFetcher>(config.fixtures);
    p.fetcher = std::make_unique<RoutingFetcher>(std::move(remote), std::move(local));

    if (!config.extractor_tool.empty()) {
        p.extractor = std::make_unique<ingest::CommandExtractor>(config.extractor_tool);
    } else {
        p.extractor = std::make_unique<ingest::BuiltinExtractor>();
    }

    if (live && !config.embedding.url.empty()) {
        p.embedder = std::make_unique<semantic::RemoteEmbedder>(config.embedding.url, config.embedding.key,
                                                                *p.transport, config.rate);
    } else {
        p.embedder = std::make_unique<semantic::HashEmbedder>();
    }

    if (live && !config.chat.url.empty()) {
        p.chat = std::make_unique<chat::RemoteChatProvider>(config.chat.url, config.chat.key, *p.transport,
                                                            config.rate);
    } else {
        p.chat = std::make_unique<chat::ExtractiveChatProvider>();
    }
    return p;
}

}  // namespace litpipe
