#include "litpipe/harvest.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "litpipe/error.hpp"
#include "litpipe/text.hpp"

namespace litpipe::harvest {

using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("malformed-response", "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("malformed-response", path.string() + ": " + e.what());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& data) {
    auto tmp = path;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("dest-unwritable", "cannot write " + tmp.string());
        out << data;
        if (!out) throw Error("dest-unwritable", "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool contains_ci(std::string_view hay, std::string_view needle) {
    return text::to_lower_ascii(hay).find(text::to_lower_ascii(needle)) != std::string::npos;
}

std::string author_display(const BibRecord& r) {
    std::string out;
    for (std::size_t i = 0; i < r.authors.size(); ++i) {
        if (i) out += "; ";
        out += r.authors[i].family;
        if (r.authors[i].given) out += ", " + *r.authors[i].given;
    }
    return out;
}

std::string not_found_block(const BibRecord& r) {
    return "AUTHORS: " + text::collapse_whitespace(author_display(r)) + "\n" +
           "TITLE: " + text::collapse_whitespace(r.title) + "\n" +
           "ABSTRACT: " + text::collapse_whitespace(r.abstract.value_or("")) + "\n";
}

// Split "Smith, Ann" or "Ann Smith" into an Author.
Author parse_person(const std::string& name) {
    Author a;
    const auto trimmed = std::string(text::trim(name));
    if (auto comma = trimmed.find(','); comma != std::string::npos) {
        a.family = std::string(text::trim(trimmed.substr(0, comma)));
        auto given = std::string(text::trim(trimmed.substr(comma + 1)));
        if (!given.empty()) a.given = given;
    } else if (auto space = trimmed.rfind(' '); space != std::string::npos) {
        a.family = trimmed.substr(space + 1);
        a.given = std::string(text::trim(trimmed.substr(0, space)));
    } else {
        a.family = trimmed;
    }
    return a;
}

std::optional<int> plausible_year(std::optional<int> y) {
    if (y && *y >= 1400 && *y <= 2200) return y;
    return std::nullopt;
}

std::string json_string(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    const auto& v = j[key];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && !v.empty() && v[0].is_string()) return v[0].get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return {};
}

}  // namespace

void SearchQuery::validate() const {
    auto present = [](const std::optional<std::string>& s) { return s && !text::is_blank(*s); };
    if (!present(topic) && !present(title) && !present(author)) {
        throw Error("invalid-query", "one of topic, title or author is required");
    }
    if (year_from && year_to && *year_from > *year_to) {
        throw Error("invalid-query", "year_from " + std::to_string(*year_from) + " is after year_to " +
                                         std::to_string(*year_to));
    }
    if (max_results < 1 || max_results > 10000) throw Error("invalid-query", "max_results must be in [1, 10000]");
}

// Fixture providers.

FixtureSearchProvider::FixtureSearchProvider(fs::path dir) {
    const auto j = read_json_file(dir / "search.json");
    if (!j.is_array()) throw Error("malformed-response", "search.json must hold an array of records");
    for (const auto& item : j) records_.push_back(item.get<BibRecord>());
}

std::vector<BibRecord> FixtureSearchProvider::search(const SearchQuery& q) {
    std::vector<BibRecord> out;
    for (const auto& r : records_) {
        if (q.topic) {
            const auto hay = r.title + " " + r.abstract.value_or("") + " " + r.venue.value_or("");
            std::istringstream words(*q.topic);
            std::string w;
            bool all = true;
            while (words >> w) all = all && contains_ci(hay, w);
            if (!all) continue;
        }
        if (q.title && !contains_ci(r.title, *q.title)) continue;
        if (q.author) {
            bool any = false;
            for (const auto& a : r.authors) {
                any = any || contains_ci(a.given.value_or("") + " " + a.family, *q.author) ||
                      contains_ci(a.family, *q.author);
            }
            if (!any) continue;
        }
        if ((q.year_from || q.year_to) && !r.year) continue;
        if (q.year_from && *r.year < *q.year_from) continue;
        if (q.year_to && *r.year > *q.year_to) continue;
        out.push_back(r);
    }
    return out;
}

FixtureMetadataProvider::FixtureMetadataProvider(fs::path dir) {
    const auto graphs = dir / "graphs";
    if (!fs::is_directory(graphs)) return;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(graphs)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto g = read_json_file(f).get<CitationGraph>();
        if (!g.root.doi) throw Error("malformed-response", f.string() + ": root record has no DOI");
        auto doi = normalize_doi(*g.root.doi);
        if (!doi) throw Error("malformed-response", f.string() + ": malformed root DOI");
        graphs_[*doi] = std::move(g);
    }
}

CitationGraph FixtureMetadataProvider::graph(const std::string& doi) {
    auto key = normalize_doi(doi);
    auto it = key ? graphs_.find(*key) : graphs_.end();
    if (it == graphs_.end()) throw Error("doi-not-found", doi);
    return it->second;
}

FetchResult FixtureFetcher::fetch(const std::string& url) {
    std::string rel = url;
    if (rel.starts_with("fixture:")) rel.erase(0, 8);
    if (rel.starts_with("http://") || rel.starts_with("https://")) {
        return {FetchStatus::not_found, {}, "offline fixture cannot serve " + url};
    }
    const fs::path p = dir_ / fs::path(rel).relative_path();
    const auto canon = fs::weakly_canonical(p).string();
    if (canon.rfind(fs::weakly_canonical(dir_).string(), 0) != 0) {
        return {FetchStatus::failed, {}, "path escapes fixture directory"};
    }
    if (!fs::is_regular_file(p)) return {FetchStatus::not_found, {}, "no fixture file " + rel};
    return {FetchStatus::ok, read_file(p), {}};
}

// Live providers.

HttpSearchProvider::HttpSearchProvider(std::string base_url, std::string api_key, net::HttpTransport& transport,
                                       net::RateLimit limits, net::Clock& clock)
    : base_(std::move(base_url)),
      key_(std::move(api_key)),
      transport_(transport),
      limits_(limits),
      clock_(clock),
      limiter_(limits.requests_per_second, clock) {
    while (!base_.empty() && base_.back() == '/') base_.pop_back();
}

std::string HttpSearchProvider::build_query(const SearchQuery& q) {
    std::vector<std::string> parts;
    if (q.topic) parts.push_back("(" + *q.topic + ")");
    if (q.title) parts.push_back("title:\"" + *q.title + "\"");
    if (q.author) parts.push_back("authors:\"" + *q.author + "\"");
    if (q.year_from) parts.push_back("yearPublished>=" + std::to_string(*q.year_from));
    if (q.year_to) parts.push_back("yearPublished<=" + std::to_string(*q.year_to));
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " AND ";
        out += parts[i];
    }
    return out;
}

std::vector<BibRecord> HttpSearchProvider::search(const SearchQuery& q) {
    net::HttpRequest req;
    req.url = base_ + "/search/works?q=" + net::url_encode(build_query(q)) + "&limit=" + std::to_string(q.max_results);
    if (!key_.empty()) req.headers.emplace_back("Authorization", "Bearer " + key_);
    const auto resp = net::send_with_retries(transport_, req, limits_, clock_, &limiter_);
    json body;
    try {
        body = json::parse(resp.body);
    } catch (const json::exception&) {
        throw Error("malformed-response", "search response is not JSON: " + resp.body.substr(0, 200));
    }
    if (!body.contains("results") || !body["results"].is_array()) {
        throw Error("malformed-response", "search response lacks results[]: " + body.dump().substr(0, 200));
    }
    std::vector<BibRecord> out;
    for (const auto& item : body["results"]) {
        BibRecord r;
        r.source = RecordSource::search_provider;
        r.title = std::string(text::trim(json_string(item, "title")));
        if (r.title.empty()) continue;
        r.id = json_string(item, "id");
        if (r.id.empty()) r.id = "core-" + std::to_string(out.size());
        if (auto doi = normalize_doi(json_string(item, "doi")); doi) r.doi = doi;
        if (item.contains("authors") && item["authors"].is_array()) {
            for (const auto& a : item["authors"]) {
                const auto name = a.is_object() ? json_string(a, "name") : (a.is_string() ? a.get<std::string>() : "");
                if (!text::is_blank(name)) r.authors.push_back(parse_person(name));
            }
        }
        if (item.contains("yearPublished") && item["yearPublished"].is_number_integer()) {
            r.year = plausible_year(item["yearPublished"].get<int>());
        }
        if (auto abs = json_string(item, "abstract"); !abs.empty()) r.abstract = abs;
        if (item.contains("journals") && item["journals"].is_array() && !item["journals"].empty()) {
            if (auto v = json_string(item["journals"][0], "title"); !v.empty()) r.venue = v;
        }
        if (!r.venue) {
            if (auto v = json_string(item, "publisher"); !v.empty()) r.venue = v;
        }
        std::set<std::string> seen;
        auto add_url = [&](const std::string& u) {
            if (!u.empty() && seen.insert(u).second) r.pdf_urls.push_back(u);
        };
        add_url(json_string(item, "downloadUrl"));
        if (item.contains("sourceFulltextUrls") && item["sourceFulltextUrls"].is_array()) {
            for (const auto& u : item["sourceFulltextUrls"]) {
                if (u.is_string() && u.get<std::string>().ends_with(".pdf")) add_url(u.get<std::string>());
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

HttpMetadataProvider::HttpMetadataProvider(std::string base_url, net::HttpTransport& transport, net::RateLimit limits,
                                           net::Clock& clock)
    : base_(std::move(base_url)),
      transport_(transport),
      limits_(limits),
      clock_(clock),
      limiter_(limits.requests_per_second, clock) {
    while (!base_.empty() && base_.back() == '/') base_.pop_back();
}

namespace {

std::string encode_doi_path(const std::string& doi) {
    std::string out;
    for (const auto& piece : text::split(doi, '/')) {
        if (!out.empty()) out += "/";
        out += net::url_encode(piece);
    }
    return out;
}

std::optional<int> issued_year(const json& m) {
    for (const char* key : {"issued", "published-print", "published-online", "created"}) {
        if (!m.contains(key)) continue;
        const auto& dp = m[key];
        if (dp.contains("date-parts") && dp["date-parts"].is_array() && !dp["date-parts"].empty() &&
            dp["date-parts"][0].is_array() && !dp["date-parts"][0].empty() && dp["date-parts"][0][0].is_number()) {
            return plausible_year(dp["date-parts"][0][0].get<int>());
        }
    }
    return std::nullopt;
}

BibRecord work_from_message(const json& m) {
    BibRecord r;
    r.source = RecordSource::metadata_provider;
    r.title = std::string(text::trim(json_string(m, "title")));
    if (auto doi = normalize_doi(json_string(m, "DOI")); doi) r.doi = doi;
    if (r.title.empty()) r.title = r.doi.value_or("untitled");
    r.id = r.doi.value_or(r.title);
    if (m.contains("author") && m["author"].is_array()) {
        for (const auto& a : m["author"]) {
            Author au;
            au.family = json_string(a, "family");
            if (au.family.empty()) au.family = json_string(a, "name");
            if (au.family.empty()) continue;
            if (auto g = json_string(a, "given"); !g.empty()) au.given = g;
            r.authors.push_back(std::move(au));
        }
    }
    r.year = issued_year(m);
    if (auto v = json_string(m, "container-title"); !v.empty()) r.venue = v;
    if (auto v = json_string(m, "abstract"); !v.empty()) r.abstract = v;
    if (m.contains("link") && m["link"].is_array()) {
        for (const auto& l : m["link"]) {
            const auto url = json_string(l, "URL");
            if (!url.empty() && json_string(l, "content-type") == "application/pdf" &&
                std::find(r.pdf_urls.begin(), r.pdf_urls.end(), url) == r.pdf_urls.end()) {
                r.pdf_urls.push_back(url);
            }
        }
    }
    return r;
}

std::optional<BibRecord> work_from_reference(const json& ref, std::size_t index) {
    BibRecord r;
    r.source = RecordSource::metadata_provider;
    if (auto doi = normalize_doi(json_string(ref, "DOI")); doi) r.doi = doi;
    for (const char* key : {"article-title", "volume-title", "unstructured"}) {
        r.title = std::string(text::trim(json_string(ref, key)));
        if (!r.title.empty()) break;
    }
    if (r.title.empty() && r.doi) r.title = *r.doi;
    if (r.title.empty()) return std::nullopt;
    r.id = r.doi.value_or("ref-" + std::to_string(index));
    if (auto a = json_string(ref, "author"); !a.empty()) r.authors.push_back(parse_person(a));
    if (auto y = json_string(ref, "year"); !y.empty()) {
        try {
            r.year = plausible_year(std::stoi(y));
        } catch (const std::exception&) {
        }
    }
    if (auto v = json_string(ref, "journal-title"); !v.empty()) r.venue = v;
    return r;
}

}  // namespace

CitationGraph HttpMetadataProvider::graph(const std::string& doi) {
    net::HttpRequest req;
    req.url = base_ + "/works/" + encode_doi_path(doi);
    net::HttpResponse resp;
    try {
        resp = net::send_with_retries(transport_, req, limits_, clock_, &limiter_);
    } catch (const Error& e) {
        if (e.code() == "provider-rejected" && e.detail().starts_with("HTTP 404")) throw Error("doi-not-found", doi);
        throw;
    }
    json body;
    try {
        body = json::parse(resp.body);
    } catch (const json::exception&) {
        throw Error("malformed-response", "metadata response is not JSON: " + resp.body.substr(0, 200));
    }
    if (!body.contains("message") || !body["message"].is_object()) {
        throw Error("malformed-response", "metadata response lacks message: " + body.dump().substr(0, 200));
    }
    const auto& m = body["message"];
    CitationGraph g;
    g.root = work_from_message(m);
    if (!g.root.doi) g.root.doi = normalize_doi(doi);
    if (m.contains("reference") && m["reference"].is_array()) {
        std::size_t i = 0;
        for (const auto& ref : m["reference"]) {
            if (auto r = work_from_reference(ref, i++)) g.references.push_back(std::move(*r));
        }
    }
    if (m.contains("cited-by") && m["cited-by"].is_array()) {
        for (const auto& c : m["cited-by"]) g.citations.push_back(work_from_message(c));
    }
    return g;
}

HttpFetcher::HttpFetcher(net::HttpTransport& transport, net::RateLimit limits, net::Clock& clock)
    : transport_(transport), limits_(limits), clock_(clock), limiters_(limits.requests_per_second, clock) {}

FetchResult HttpFetcher::fetch(const std::string& url) {
    net::HttpRequest req;
    req.url = url;
    req.headers.emplace_back("Accept", "application/pdf");
    try {
        // download_pdfs paces first attempts; only retries go through our limiter.
        auto resp = net::send_with_retries(transport_, req, limits_, clock_, nullptr);
        return {FetchStatus::ok, std::move(resp.body), {}};
    } catch (const Error& e) {
        if (e.code() == "provider-rejected" &&
            (e.detail().starts_with("HTTP 404") || e.detail().starts_with("HTTP 410"))) {
            return {FetchStatus::not_found, {}, e.detail().substr(0, 80)};
        }
        return {FetchStatus::failed, {}, e.code()};
    } catch (const std::exception& e) {
        return {FetchStatus::failed, {}, e.what()};
    }
}

// Operations.

std::vector<BibRecord> search_articles(const SearchQuery& query, SearchProvider& provider) {
    query.validate();
    auto raw = provider.search(query);
    for (const auto& r : raw) {
        try {
            validate(r);
        } catch (const Error& e) {
            throw Error("malformed-response", "provider returned an invalid record: " + e.detail());
        }
    }
    auto out = dedup_records(raw);
    if (out.size() > static_cast<std::size_t>(query.max_results)) out.resize(static_cast<std::size_t>(query.max_results));
    return out;
}

namespace {

enum class Outcome { saved, not_found, failed };

struct Job {
    std::size_t record = 0;
    std::string stem;
    Outcome outcome = Outcome::not_found;
    std::string reason;
};

std::set<std::string> existing_lines(const fs::path& p) {
    std::set<std::string> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) out.insert(line);
    return out;
}

}  // namespace

DownloadReport download_pdfs(const std::vector<BibRecord>& records, const fs::path& dest,
                             const net::RateLimit& limits, PdfFetcher& fetcher, net::Clock& clock) {
    limits.validate();
    std::error_code ec;
    if (!fs::is_directory(dest, ec)) throw Error("dest-unwritable", dest.string() + " is not a directory");

    DownloadReport report;
    report.links_file = dest / "links.txt";
    report.not_found_file = dest / "not_found.txt";
    {
        std::ofstream touch_links(report.links_file, std::ios::app);
        std::ofstream touch_nf(report.not_found_file, std::ios::app);
        if (!touch_links || !touch_nf) throw Error("dest-unwritable", "cannot write into " + dest.string());
    }

    // Stem assignment is serial so names never depend on thread timing.
    std::vector<Job> jobs;
    std::vector<std::optional<std::size_t>> alias(records.size());
    std::map<std::string, std::size_t> stem_owner;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.pdf_urls.empty()) continue;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (same_work(records[jobs[j].record], rec)) {
                alias[i] = j;
                break;
            }
        }
        if (alias[i]) continue;
        const auto base = safe_filename(rec, 120);
        const auto apa = format_apa_reference(rec);
        std::string stem;
        for (int n = 1;; ++n) {
            stem = collision_variant(base, n);
            if (stem_owner.count(stem)) continue;
            if (fs::exists(dest / (stem + ".pdf"))) {
                auto existing = std::string(text::trim(read_file(dest / (stem + ".apa.txt"))));
                if (existing != apa) continue;
            }
            break;
        }
        stem_owner[stem] = i;
        alias[i] = jobs.size();
        jobs.push_back({i, stem, Outcome::not_found, {}});
    }

    net::HostRateLimiters limiters(limits.requests_per_second, clock);
    std::atomic<std::size_t> next{0};
    std::mutex io_mu;
    auto worker = [&] {
        for (;;) {
            const auto j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            auto& job = jobs[j];
            const auto& rec = records[job.record];
            bool any_failure = false;
            for (const auto& url : rec.pdf_urls) {
                limiters.for_url(url).acquire();
                FetchResult res;
                try {
                    res = fetcher.fetch(url);
                } catch (const std::exception& e) {
                    res = {FetchStatus::failed, {}, e.what()};
                }
                if (res.status == FetchStatus::not_found) continue;
                if (res.status == FetchStatus::failed) {
                    any_failure = true;
                    job.reason = res.reason.empty() ? "fetch-failed" : res.reason;
                    continue;
                }
                if (!res.body.starts_with("%PDF-")) {
                    any_failure = true;
                    job.reason = "not-a-pdf";
                    continue;
                }
                try {
                    std::lock_guard lock(io_mu);
                    write_file_atomic(dest / (job.stem + ".pdf"), res.body);
                    write_file_atomic(dest / (job.stem + ".apa.txt"), format_apa_reference(rec) + "\n");
                    job.outcome = Outcome::saved;
                } catch (const std::exception& e) {
                    any_failure = true;
                    job.reason = std::string("write-failed: ") + e.what();
                    continue;
                }
                break;
            }
            if (job.outcome != Outcome::saved) job.outcome = any_failure ? Outcome::failed : Outcome::not_found;
        }
    };
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(limits.max_concurrent), jobs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    auto seen_links = existing_lines(report.links_file);
    const auto nf_existing = read_file(report.not_found_file);
    std::ofstream links(report.links_file, std::ios::app);
    std::ofstream nf(report.not_found_file, std::ios::app);
    bool nf_needs_sep = !text::is_blank(nf_existing);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        const auto intext = format_apa_intext(rec);
        for (const auto& url : rec.pdf_urls) {
            const auto line = intext + "\t" + url;
            if (seen_links.insert(line).second) links << line << "\n";
        }
        Outcome outcome = Outcome::not_found;
        const Job* job = alias[i] ? &jobs[*alias[i]] : nullptr;
        if (job) outcome = job->outcome;
        switch (outcome) {
            case Outcome::saved:
                report.saved.push_back({rec.id, dest / (job->stem + ".pdf")});
                break;
            case Outcome::failed:
                report.failures.push_back({rec.id, job->reason});
                break;
            case Outcome::not_found: {
                report.not_found.push_back(rec.id);
                const auto block = not_found_block(rec);
                if (nf_existing.find(block) == std::string::npos) {
                    if (nf_needs_sep) nf << "\n";
                    nf << block;
                    nf_needs_sep = true;
                }
                break;
            }
        }
    }
    if (!links || !nf) throw Error("dest-unwritable", "failed writing link lists in " + dest.string());
    return report;
}

CitationGraph extract_citation_graph(const std::string& doi, MetadataProvider& provider) {
    const auto norm = normalize_doi(doi);
    if (!norm) throw Error("invalid-doi", "malformed DOI '" + doi + "'");
    auto g = provider.graph(*norm);
    auto prune = [&](std::vector<BibRecord>& list) {
        list.erase(std::remove_if(list.begin(), list.end(), [&](const BibRecord& r) { return same_work(r, g.root); }),
                   list.end());
        list = dedup_records(list);
    };
    prune(g.references);
    prune(g.citations);
    return g;
}

DownloadReport GraphHarvestReport::merged() const {
    DownloadReport out;
    out.links_file = root.links_file;
    out.not_found_file = root.not_found_file;
    for (const auto* r : {&root, &references, &citations}) {
        out.saved.insert(out.saved.end(), r->saved.begin(), r->saved.end());
        out.failures.insert(out.failures.end(), r->failures.begin(), r->failures.end());
        out.not_found.insert(out.not_found.end(), r->not_found.begin(), r->not_found.end());
    }
    return out;
}

namespace {
void resolve_pdf_urls(std::vector<BibRecord>& list, SearchProvider* search) {
    if (!search) return;
    for (auto& r : list) {
        if (!r.pdf_urls.empty()) continue;
        SearchQuery q;
        q.title = r.title;
        q.max_results = 5;
        try {
            for (const auto& hit : search->search(q)) {
                if (same_work(hit, r) && !hit.pdf_urls.empty()) {
                    r.pdf_urls = hit.pdf_urls;
                    break;
                }
            }
        } catch (const Error&) {
            // Unresolvable records fall through to not_found.txt.
        }
    }
}
}  // namespace

GraphHarvestReport harvest_graph(const std::string& doi, const fs::path& dest, const GraphProviders& providers,
                                 const net::RateLimit& limits, net::Clock& clock) {
    if (!providers.metadata || !providers.fetcher) throw Error("invalid-config", "harvest_graph needs providers");
    GraphHarvestReport out;
    out.graph = extract_citation_graph(doi, *providers.metadata);

    std::vector<BibRecord> roots{out.graph.root};
    resolve_pdf_urls(roots, providers.search);
    resolve_pdf_urls(out.graph.references, providers.search);
    resolve_pdf_urls(out.graph.citations, providers.search);

    std::error_code ec;
    fs::create_directories(dest / "references", ec);
    fs::create_directories(dest / "citations", ec);
    if (ec) throw Error("dest-unwritable", "cannot create folders under " + dest.string() + ": " + ec.message());
    out.root = download_pdfs(roots, dest, limits, *providers.fetcher, clock);
    out.references = download_pdfs(out.graph.references, dest / "references", limits, *providers.fetcher, clock);
    out.citations = download_pdfs(out.graph.citations, dest / "citations", limits, *providers.fetcher, clock);
    return out;
}

void to_json(json& j, const SearchQuery& q) {
    auto opt = [](const auto& v) { return v ? json(*v) : json(); };
    j = json{{"topic", opt(q.topic)},         {"title", opt(q.title)},     {"author", opt(q.author)},
             {"year_from", opt(q.year_from)}, {"year_to", opt(q.year_to)}, {"max_results", q.max_results}};
}

void from_json(const json& j, SearchQuery& q) {
    auto str = [&](const char* k) -> std::optional<std::string> {
        if (!j.contains(k) || j[k].is_null()) return std::nullopt;
        return j[k].get<std::string>();
    };
    auto num = [&](const char* k) -> std::optional<int> {
        if (!j.contains(k) || j[k].is_null()) return std::nullopt;
        return j[k].get<int>();
    };
    try {
        q.topic = str("topic");
        q.title = str("title");
        q.author = str("author");
        q.year_from = num("year_from");
        q.year_to = num("year_to");
        q.max_results = j.value("max_results", 25);
    } catch (const json::exception& e) {
        throw Error("invalid-query", e.what());
    }
}

void to_json(json& j, const DownloadReport& r) {
    j = json::object();
    j["saved"] = json::array();
    for (const auto& s : r.saved) j["saved"].push_back({{"record_id", s.record_id}, {"path", s.path.string()}});
    j["failures"] = json::array();
    for (const auto& f : r.failures) j["failures"].push_back({{"record_id", f.record_id}, {"reason", f.reason}});
    j["not_found"] = r.not_found;
    j["links_file"] = r.links_file.string();
    j["not_found_file"] = r.not_found_file.string();
}

void to_json(json& j, const CitationGraph& g) {
    j = json{{"root", g.root}, {"references", g.references}, {"citations", g.citations}};
}

void from_json(const json& j, CitationGraph& g) {
    try {
        g.root = j.at("root").get<BibRecord>();
        g.references = j.value("references", std::vector<BibRecord>{});
        g.citations = j.value("citations", std::vector<BibRecord>{});
    } catch (const json::exception& e) {
        throw Error("malformed-response", std::string("bad citation graph: ") + e.what());
    }
}

}  // namespace litpipe::harvest
