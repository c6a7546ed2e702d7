#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "litpipe/chat.hpp"
#include "litpipe/harvest.hpp"
#include "litpipe/net.hpp"

namespace litpipe::testing {

namespace fs = std::filesystem;

fs::path source_dir();
fs::path fixtures_dir();

/// Writes `<root>/<rel>.pdf` for every `<root>/src/<rel>.txt`.
std::vector<fs::path> render_fixture_pdfs(const fs::path& root);

std::string read_file(const fs::path& p);
void write_file(const fs::path& p, const std::string& content);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

/// Copies fixtures/corpus into dest.
void copy_corpus(const fs::path& dest);

/// Records every prompt; replies via `reply` (default: fixed text).
class CapturingChatProvider final : public chat::ChatProvider {
public:
    using Reply = std::function<std::string(const chat::PromptBundle&)>;
    explicit CapturingChatProvider(Reply reply = {}) : reply_(std::move(reply)) {}
    std::string complete(const chat::PromptBundle& bundle) override;
    std::vector<chat::PromptBundle> prompts() const;
    std::size_t calls() const;

private:
    Reply reply_;
    mutable std::mutex mu_;
    std::vector<chat::PromptBundle> prompts_;
};

/// Replies from a queue; throws when empty.
class ScriptedChatProvider final : public chat::ChatProvider {
public:
    explicit ScriptedChatProvider(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}
    std::string complete(const chat::PromptBundle& bundle) override;
    std::size_t calls() const { return calls_; }

private:
    std::mutex mu_;
    std::deque<std::string> replies_;
    std::size_t calls_ = 0;
};

/// Scripted HTTP transport. Each reply is a status/body pair or a network
/// failure (status < 0).
class ScriptedTransport final : public net::HttpTransport {
public:
    struct Reply {
        int status = 200;
        std::string body;
        std::map<std::string, std::string> headers;
    };
    explicit ScriptedTransport(std::vector<Reply> replies) : replies_(replies.begin(), replies.end()) {}
    net::HttpResponse send(const net::HttpRequest& request) override;
    std::vector<net::HttpRequest> requests() const;

private:
    mutable std::mutex mu_;
    std::deque<Reply> replies_;
    std::vector<net::HttpRequest> requests_;
};

/// Fetcher that serves `%PDF-` bytes for every URL, recording the simulated
/// time of each fetch and the peak number of concurrent fetches. Each fetch
/// holds its slot for `hold` of simulated time.
class InstrumentedFetcher final : public harvest::PdfFetcher {
public:
    InstrumentedFetcher(net::Clock& clock, net::Duration hold) : clock_(clock), hold_(hold) {}
    harvest::FetchResult fetch(const std::string& url) override;
    int peak_concurrency() const { return peak_; }
    std::vector<net::TimePoint> times() const;

private:
    net::Clock& clock_;
    net::Duration hold_;
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
    mutable std::mutex mu_;
    std::vector<net::TimePoint> times_;
};

/// Deterministic pseudo-text with sentence punctuation, newlines, headings
/// and multi-byte characters, exactly `length` bytes long.
std::string random_text(std::uint64_t seed, std::size_t length);

}  // namespace litpipe::testing
