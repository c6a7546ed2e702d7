#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <stdlib.h>

#include "litpipe/error.hpp"
#include "litpipe/pdf.hpp"

namespace litpipe::testing {

fs::path source_dir() { return LITPIPE_SOURCE_DIR; }
fs::path fixtures_dir() { return source_dir() / "fixtures"; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

std::vector<fs::path> render_fixture_pdfs(const fs::path& root) {
    std::vector<fs::path> out;
    const auto src = root / "src";
    for (const auto& entry : fs::recursive_directory_iterator(src)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        auto rel = entry.path().lexically_relative(src);
        rel.replace_extension(".pdf");
        const auto dest = root / rel;
        fs::create_directories(dest.parent_path());
        pdf::write_text_pdf(dest, read_file(entry.path()));
        out.push_back(dest);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "litpipe-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void copy_corpus(const fs::path& dest) {
    fs::create_directories(dest);
    fs::copy(fixtures_dir() / "corpus", dest, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

std::string CapturingChatProvider::complete(const chat::PromptBundle& bundle) {
    {
        std::lock_guard lock(mu_);
        prompts_.push_back(bundle);
    }
    return reply_ ? reply_(bundle) : std::string("captured");
}

std::vector<chat::PromptBundle> CapturingChatProvider::prompts() const {
    std::lock_guard lock(mu_);
    return prompts_;
}

std::size_t CapturingChatProvider::calls() const {
    std::lock_guard lock(mu_);
    return prompts_.size();
}

std::string ScriptedChatProvider::complete(const chat::PromptBundle&) {
    std::lock_guard lock(mu_);
    ++calls_;
    if (replies_.empty()) throw std::runtime_error("no scripted reply left");
    auto r = replies_.front();
    replies_.pop_front();
    return r;
}

net::HttpResponse ScriptedTransport::send(const net::HttpRequest& request) {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    if (replies_.empty()) throw std::runtime_error("no scripted HTTP reply left for " + request.url);
    auto r = replies_.front();
    replies_.pop_front();
    if (r.status < 0) throw Error("provider-unreachable", "scripted network failure");
    net::HttpResponse resp;
    resp.status = r.status;
    resp.body = r.body;
    resp.headers = r.headers;
    return resp;
}

std::vector<net::HttpRequest> ScriptedTransport::requests() const {
    std::lock_guard lock(mu_);
    return requests_;
}

harvest::FetchResult InstrumentedFetcher::fetch(const std::string&) {
    const int now_active = ++active_;
    int prev = peak_.load();
    while (now_active > prev && !peak_.compare_exchange_weak(prev, now_active)) {
    }
    {
        std::lock_guard lock(mu_);
        times_.push_back(clock_.now());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    clock_.sleep_for(hold_);
    --active_;
    return {harvest::FetchStatus::ok, "%PDF-1.4\n%fixture\n", {}};
}

std::vector<net::TimePoint> InstrumentedFetcher::times() const {
    std::lock_guard lock(mu_);
    return times_;
}

std::string random_text(std::uint64_t seed, std::size_t length) {
    static const std::vector<std::string> words = {
        "alpha", "beta", "gamma", "delta", "signal", "model", "cell", "image", "review", "data",
        "naïve", "café", "größe", "данные", "模型", "x", "results", "methods", "value", "error"};
    static const std::vector<std::string> headings = {"\nIntroduction\n", "\n2 Methods\n", "\nResults\n",
                                                      "\nDiscussion\n", "\nReferences\n"};
    std::mt19937_64 rng(seed);
    std::string out;
    while (out.size() < length) {
        const auto r = rng() % 100;
        if (r < 3) {
            out += headings[rng() % headings.size()];
        } else if (r < 13) {
            out += ". ";
        } else if (r < 16) {
            out += "\n";
        } else if (r < 18) {
            out += "   ";
        } else {
            out += words[rng() % words.size()];
            out += ' ';
        }
    }
    // Trim to length on a UTF-8 boundary and pad with spaces.
    std::size_t cut = length;
    while (cut > 0 && (static_cast<unsigned char>(out[cut]) & 0xC0) == 0x80) --cut;
    out.resize(cut);
    out.append(length - cut, ' ');
    return out;
}

}  // namespace litpipe::testing
