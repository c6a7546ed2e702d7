#include <gtest/gtest.h>

#include <regex>
#include <set>

#include <json.hpp>

#include "fixtures.hpp"
#include "goldens.hpp"
#include "litpipe/error.hpp"
#include "litpipe/harvest.hpp"
#include "litpipe/pdf.hpp"

namespace litpipe::harvest {
namespace {

using litpipe::testing::fixtures_dir;
using litpipe::testing::read_file;
using litpipe::testing::ScriptedTransport;
using litpipe::testing::TempDir;
using litpipe::testing::write_file;
using nlohmann::json;

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> nonblank_blocks(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (const auto& line : lines_of(s)) {
        if (line.empty()) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += line + "\n";
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

BibRecord record(std::string id, std::string family, int year, std::string title, std::vector<std::string> urls) {
    auto r = litpipe::testing::make_record({{std::move(family), "Ann"}}, year, std::move(title));
    r.id = std::move(id);
    r.pdf_urls = std::move(urls);
    r.abstract = "Abstract of " + r.id;
    return r;
}

net::RateLimit quick() {
    net::RateLimit l;
    l.requests_per_second = 1000;
    l.backoff_base = std::chrono::milliseconds(1);
    return l;
}

TEST(SearchQuery, Validation) {
    SearchQuery q;
    EXPECT_THROW(q.validate(), Error);
    q.topic = "x";
    EXPECT_NO_THROW(q.validate());
    q.year_from = 2021;
    q.year_to = 2020;
    try {
        q.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "invalid-query");
    }
    q.year_to = 2021;
    q.max_results = 10001;
    EXPECT_THROW(q.validate(), Error);
    q.max_results = 0;
    EXPECT_THROW(q.validate(), Error);
}

TEST(SearchArticles, FixtureMatchesInRankOrder) {
    FixtureSearchProvider provider(fixtures_dir());
    SearchQuery q;
    q.topic = "automation";
    q.year_from = 2021;
    q.max_results = 10;
    const auto out = search_articles(q, provider);
    std::vector<std::string> ids;
    for (const auto& r : out) ids.push_back(r.id);
    EXPECT_EQ(ids, (std::vector<std::string>{"r02", "r03", "r05", "r06", "r09", "r10"}));
    q.max_results = 2;
    EXPECT_EQ(search_articles(q, provider).size(), 2u);
}

TEST(SearchArticles, ThreeMatchingRecordsPassThrough) {
    std::vector<BibRecord> recs = {record("a", "A", 2000, "Topic one", {}), record("b", "B", 2001, "Other", {}),
                                   record("c", "C", 2002, "Topic two", {}), record("d", "D", 2003, "topic three", {})};
    FixtureSearchProvider provider(recs);
    SearchQuery q;
    q.topic = "topic";
    q.max_results = 10;
    const auto out = search_articles(q, provider);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].id, "a");
    EXPECT_EQ(out[1].id, "c");
    EXPECT_EQ(out[2].id, "d");
}

TEST(SearchArticles, DuplicateDoisKeepFirstOccurrence) {
    std::vector<BibRecord> recs;
    for (int i = 0; i < 8; ++i) {
        auto r = record("id" + std::to_string(i), "F" + std::to_string(i), 2000 + i, "Topic " + std::to_string(i), {});
        r.doi = "10.1/dup" + std::to_string(i % 3);
        if (i % 2) r.doi = "https://doi.org/10.1/DUP" + std::to_string(i % 3);
        recs.push_back(r);
    }
    FixtureSearchProvider provider(recs);
    SearchQuery q;
    q.topic = "topic";
    const auto out = search_articles(q, provider);
    // Independent dedup: first record per normalized DOI.
    std::set<std::string> seen;
    std::vector<std::string> expected;
    for (const auto& r : recs) {
        std::string doi = *r.doi;
        if (doi.starts_with("https://doi.org/")) doi = doi.substr(16);
        for (auto& c : doi) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (seen.insert(doi).second) expected.push_back(r.id);
    }
    std::vector<std::string> got;
    for (const auto& r : out) got.push_back(r.id);
    EXPECT_EQ(got, expected);
}

TEST(SearchArticles, InvalidProviderRecordIsMalformedResponse) {
    auto bad = record("x", "F", 1200, "Topic", {});
    FixtureSearchProvider provider(std::vector<BibRecord>{bad});
    SearchQuery q;
    q.topic = "topic";
    try {
        search_articles(q, provider);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "malformed-response");
    }
}

TEST(DownloadPdfs, FixtureRecordsAreFullyAccounted) {
    FixtureSearchProvider search(fixtures_dir());
    SearchQuery q;
    q.topic = "automation";
    const auto records = search_articles(q, search);
    ASSERT_EQ(records.size(), 10u);
    TempDir dest;
    FixtureFetcher fetcher(fixtures_dir());
    net::SimulatedClock clock;
    const auto report = download_pdfs(records, dest.path(), net::RateLimit{}, fetcher, clock);

    std::vector<std::string> saved;
    for (const auto& s : report.saved) saved.push_back(s.record_id);
    EXPECT_EQ(saved, (std::vector<std::string>{"r01", "r02", "r03", "r04", "r05", "r06", "r07"}));
    EXPECT_TRUE(report.failures.empty());
    EXPECT_EQ(report.not_found, (std::vector<std::string>{"r08", "r09", "r10"}));

    const std::regex grammar("[A-Za-z0-9._-]+");
    for (const auto& s : report.saved) {
        EXPECT_TRUE(fs::exists(s.path));
        EXPECT_TRUE(std::regex_match(s.path.stem().string(), grammar));
        EXPECT_TRUE(pdf::has_pdf_magic(read_file(s.path)));
        auto apa = s.path;
        apa.replace_extension(".apa.txt");
        const auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.id == s.record_id; });
        EXPECT_EQ(read_file(apa), format_apa_reference(*it) + "\n");
    }
    EXPECT_EQ(files_with_extension(dest.path(), ".pdf").size(), 7u);

    // links.txt: one `intext<TAB>url` line for every URL of every record.
    std::vector<std::string> expected_links;
    for (const auto& r : records) {
        for (const auto& u : r.pdf_urls) expected_links.push_back(format_apa_intext(r) + "\t" + u);
    }
    EXPECT_EQ(lines_of(read_file(report.links_file)), expected_links);

    const auto blocks = nonblank_blocks(read_file(report.not_found_file));
    ASSERT_EQ(blocks.size(), 3u);
    EXPECT_EQ(blocks[0],
              "AUTHORS: Horvat, " + *records[7].authors[0].given + "\nTITLE: " + records[7].title +
                  "\nABSTRACT: " + *records[7].abstract + "\n");
    EXPECT_EQ(report.saved.size() + report.failures.size() + blocks.size(), records.size());
}

TEST(DownloadPdfs, RecordWithoutUrlsOnlyInNotFound) {
    TempDir dest;
    FixtureFetcher fetcher(fixtures_dir());
    auto r = record("lone", "Solo", 2010, "No link available", {});
    const auto report = download_pdfs({r}, dest.path(), quick(), fetcher);
    EXPECT_TRUE(report.saved.empty());
    EXPECT_EQ(report.not_found, std::vector<std::string>{"lone"});
    EXPECT_EQ(read_file(report.links_file), "");
    const auto nf = read_file(report.not_found_file);
    EXPECT_NE(nf.find("AUTHORS: Solo, Ann"), std::string::npos);
    EXPECT_NE(nf.find("TITLE: No link available"), std::string::npos);
    EXPECT_NE(nf.find("ABSTRACT: Abstract of lone"), std::string::npos);
}

TEST(DownloadPdfs, EmptyInputCreatesEmptyLists) {
    TempDir dest;
    FixtureFetcher fetcher(fixtures_dir());
    const auto report = download_pdfs({}, dest.path(), quick(), fetcher);
    EXPECT_TRUE(report.saved.empty() && report.failures.empty() && report.not_found.empty());
    EXPECT_TRUE(fs::exists(dest / "links.txt"));
    EXPECT_TRUE(fs::exists(dest / "not_found.txt"));
    EXPECT_EQ(read_file(dest / "links.txt"), "");
    EXPECT_EQ(read_file(dest / "not_found.txt"), "");
}

TEST(DownloadPdfs, NonPdfPayloadIsFailure) {
    TempDir src;
    write_file(src / "pdfs/page.pdf", "<html>login required</html>");
    TempDir dest;
    FixtureFetcher fetcher(src.path());
    const auto report = download_pdfs({record("h", "Html", 2000, "Paywalled", {"pdfs/page.pdf"})}, dest.path(),
                                      quick(), fetcher);
    ASSERT_EQ(report.failures.size(), 1u);
    EXPECT_EQ(report.failures[0].reason, "not-a-pdf");
    EXPECT_TRUE(files_with_extension(dest.path(), ".pdf").empty());
}

TEST(DownloadPdfs, MissingDestinationIsUnwritable) {
    FixtureFetcher fetcher(fixtures_dir());
    try {
        download_pdfs({}, "/nonexistent/dir/for/test", quick(), fetcher);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "dest-unwritable");
    }
}

TEST(DownloadPdfs, RerunIsIdempotent) {
    FixtureSearchProvider search(fixtures_dir());
    SearchQuery q;
    q.topic = "automation";
    const auto records = search_articles(q, search);
    TempDir dest;
    FixtureFetcher fetcher(fixtures_dir());
    const auto first = download_pdfs(records, dest.path(), quick(), fetcher);
    const auto links = read_file(first.links_file);
    const auto nf = read_file(first.not_found_file);
    const auto second = download_pdfs(records, dest.path(), quick(), fetcher);
    EXPECT_EQ(files_with_extension(dest.path(), ".pdf").size(), 7u);
    EXPECT_EQ(read_file(second.links_file), links);
    EXPECT_EQ(read_file(second.not_found_file), nf);
    for (std::size_t i = 0; i < first.saved.size(); ++i) EXPECT_EQ(first.saved[i].path, second.saved[i].path);
}

TEST(DownloadPdfs, DistinctRecordsWithSameNameGetSuffixes) {
    TempDir dest;
    FixtureFetcher fetcher(fixtures_dir());
    auto a = record("a", "Same", 2020, "Same title", {"pdfs/r01.pdf"});
    auto b = record("b", "Same", 2020, "Same title", {"pdfs/r02.pdf"});
    a.venue = "Venue A";
    b.venue = "Venue B";
    a.doi = "10.1/a";
    b.doi = "10.1/b";
    const auto report = download_pdfs({a, b}, dest.path(), quick(), fetcher);
    ASSERT_EQ(report.saved.size(), 2u);
    EXPECT_EQ(report.saved[0].path.filename(), "Same_2020_Same_title.pdf");
    EXPECT_EQ(report.saved[1].path.filename(), "Same_2020_Same_title-2.pdf");
}

TEST(DownloadPdfs, FallsBackToLaterUrls) {
    TempDir dest;
    FixtureFetcher fetcher(fixtures_dir());
    const auto report = download_pdfs({record("x", "Later", 2018, "Second link works",
                                              {"pdfs/missing.pdf", "https://example.org/a.pdf", "pdfs/r07.pdf"})},
                                      dest.path(), quick(), fetcher);
    ASSERT_EQ(report.saved.size(), 1u);
    EXPECT_EQ(read_file(report.saved[0].path), read_file(fixtures_dir() / "pdfs/r07.pdf"));
}

TEST(DownloadPdfs, RateAndConcurrencyBounds) {
    for (int bound : {1, 2, 4}) {
        net::SimulatedClock clock;
        litpipe::testing::InstrumentedFetcher fetcher(clock, net::Duration(0));
        std::vector<BibRecord> recs;
        for (int i = 0; i < 10; ++i) {
            recs.push_back(record("t" + std::to_string(i), "T" + std::to_string(i), 2000, "Timed",
                                  {"https://host.example/" + std::to_string(i) + ".pdf"}));
        }
        net::RateLimit limits;
        limits.requests_per_second = 5;
        limits.max_concurrent = bound;
        TempDir dest;
        download_pdfs(recs, dest.path(), limits, fetcher, clock);
        const auto times = fetcher.times();
        ASSERT_EQ(times.size(), 10u);
        const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
        EXPECT_GE(std::chrono::duration<double>(*hi - *lo).count(), 1.8 - 1e-9);
        EXPECT_LE(fetcher.peak_concurrency(), bound);
    }
}

TEST(ExtractCitationGraph, FixtureCounts) {
    FixtureMetadataProvider provider(fixtures_dir());
    const auto g = extract_citation_graph("https://doi.org/10.5555/AUTO.ROOT", provider);
    EXPECT_EQ(g.root.doi, "10.5555/auto.root");
    const auto raw = json::parse(read_file(fixtures_dir() / "graphs/root.json"));
    EXPECT_EQ(g.references.size(), raw["references"].size());
    EXPECT_EQ(g.citations.size(), raw["citations"].size());
    EXPECT_EQ(g.references.size(), 4u);
    EXPECT_EQ(g.citations.size(), 2u);
}

TEST(ExtractCitationGraph, MissingCitationDataIsEmpty) {
    FixtureMetadataProvider provider(fixtures_dir());
    const auto g = extract_citation_graph("10.5555/gen.2020.017", provider);
    EXPECT_TRUE(g.citations.empty());
    EXPECT_EQ(format_apa_intext(g.root), "(Raman & Feld, 2020)");
}

TEST(ExtractCitationGraph, UnknownDoiIsNotFound) {
    FixtureMetadataProvider provider(fixtures_dir());
    try {
        extract_citation_graph("10.9999/nope", provider);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "doi-not-found");
    }
}

TEST(ExtractCitationGraph, DropsRootAndDuplicates) {
    TempDir dir;
    CitationGraph g;
    g.root = record("root", "Root", 2020, "Root work", {});
    g.root.doi = "10.1/root";
    auto dup = record("d1", "Ref", 2019, "A ref", {});
    dup.doi = "10.1/ref";
    auto dup2 = dup;
    dup2.id = "d2";
    auto self = g.root;
    self.id = "self";
    g.references = {dup, self, dup2};
    write_file(dir / "graphs/g.json", json(g).dump());
    FixtureMetadataProvider provider(dir.path());
    const auto out = extract_citation_graph("10.1/root", provider);
    ASSERT_EQ(out.references.size(), 1u);
    EXPECT_EQ(out.references[0].id, "d1");
}

// A graph whose root, two references and one citation all have PDFs.
struct ServedGraph {
    TempDir dir;
    ServedGraph() {
        CitationGraph g;
        g.root = record("root", "Root", 2020, "Root paper", {"pdfs/root.pdf"});
        g.root.doi = "10.7/root";
        g.references = {record("ref1", "Refa", 2018, "First reference", {"pdfs/ref1.pdf"}),
                        record("ref2", "Refb", 2017, "Second reference", {"pdfs/ref2.pdf"})};
        g.citations = {record("cit1", "Cita", 2022, "Citing paper", {"pdfs/cit1.pdf"})};
        write_file(dir / "graphs/root.json", json(g).dump(2));
        fs::create_directories(dir / "pdfs");
        for (const auto* name : {"root", "ref1", "ref2", "cit1"}) {
            pdf::write_text_pdf(dir / ("pdfs/" + std::string(name) + ".pdf"), std::string("Body of ") + name);
        }
    }
};

TEST(HarvestGraph, PdfsLandInThreeLocations) {
    ServedGraph served;
    FixtureMetadataProvider metadata(served.dir.path());
    FixtureFetcher fetcher(served.dir.path());
    TempDir dest;
    const auto report = harvest_graph("10.7/root", dest.path(), {&metadata, &fetcher, nullptr}, quick());
    EXPECT_EQ(files_with_extension(dest.path(), ".pdf").size(), 1u);
    EXPECT_EQ(files_with_extension(dest / "references", ".pdf").size(), 2u);
    EXPECT_EQ(files_with_extension(dest / "citations", ".pdf").size(), 1u);
    EXPECT_EQ(report.merged().saved.size(), 4u);
    for (const auto* sub : {"", "references", "citations"}) {
        EXPECT_TRUE(fs::exists(dest / sub / "links.txt"));
        EXPECT_TRUE(fs::exists(dest / sub / "not_found.txt"));
    }
}

TEST(HarvestGraph, ReferencesWithoutPdfsGoToNotFound) {
    FixtureMetadataProvider metadata(fixtures_dir());
    FixtureFetcher fetcher(fixtures_dir());
    TempDir dest;
    // Without a search provider the URL-less references stay unresolved.
    const auto report = harvest_graph("10.5555/auto.root", dest.path(), {&metadata, &fetcher, nullptr}, quick());
    EXPECT_EQ(report.references.saved.size(), 2u);
    EXPECT_EQ(report.references.not_found, (std::vector<std::string>{"r03", "r08"}));
    const auto nf = read_file(dest / "references/not_found.txt");
    EXPECT_EQ(nonblank_blocks(nf).size(), 2u);
    EXPECT_EQ(report.citations.saved.size(), 1u);
    EXPECT_EQ(report.citations.not_found, std::vector<std::string>{"r09"});
    EXPECT_EQ(report.root.not_found, std::vector<std::string>{"root"});
}

TEST(HarvestGraph, SearchProviderResolvesMissingUrls) {
    FixtureMetadataProvider metadata(fixtures_dir());
    FixtureFetcher fetcher(fixtures_dir());
    FixtureSearchProvider search(fixtures_dir());
    TempDir dest;
    const auto report = harvest_graph("10.5555/auto.root", dest.path(), {&metadata, &fetcher, &search}, quick());
    EXPECT_EQ(report.references.saved.size(), 3u);
    EXPECT_EQ(report.references.not_found, std::vector<std::string>{"r08"});
}

TEST(HarvestGraph, UnknownDoiWritesNothing) {
    FixtureMetadataProvider metadata(fixtures_dir());
    FixtureFetcher fetcher(fixtures_dir());
    TempDir dest;
    EXPECT_THROW(harvest_graph("10.9/unknown", dest.path(), {&metadata, &fetcher, nullptr}, quick()), Error);
    EXPECT_TRUE(fs::is_empty(dest.path()));
}

TEST(HttpSearchProvider, BuildsQueryAndParsesResults) {
    const json body = {{"totalHits", 2},
                       {"results",
                        {{{"id", 11},
                          {"title", "Live result"},
                          {"doi", "10.1/LIVE"},
                          {"authors", {{{"name", "Doe, Jane"}}, {{"name", "Rui Li"}}}},
                          {"yearPublished", 2021},
                          {"abstract", "Abs"},
                          {"journals", {{{"title", "Journal"}}}},
                          {"downloadUrl", "https://core.example/download/11.pdf"}},
                         {{"id", "12"}, {"title", "  "}}}}};
    ScriptedTransport transport({{200, body.dump()}});
    net::SimulatedClock clock;
    HttpSearchProvider provider("https://core.example/v3/", "secret", transport, quick(), clock);
    SearchQuery q;
    q.topic = "deep learning";
    q.year_from = 2020;
    q.max_results = 5;
    const auto out = provider.search(q);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].title, "Live result");
    EXPECT_EQ(out[0].doi, "10.1/live");
    ASSERT_EQ(out[0].authors.size(), 2u);
    EXPECT_EQ(out[0].authors[0], (Author{"Doe", "Jane"}));
    EXPECT_EQ(out[0].authors[1], (Author{"Li", "Rui"}));
    EXPECT_EQ(out[0].year, 2021);
    EXPECT_EQ(out[0].venue, "Journal");
    EXPECT_EQ(out[0].pdf_urls, std::vector<std::string>{"https://core.example/download/11.pdf"});
    EXPECT_EQ(out[0].source, RecordSource::search_provider);

    const auto reqs = transport.requests();
    ASSERT_EQ(reqs.size(), 1u);
    EXPECT_EQ(reqs[0].url, "https://core.example/v3/search/works?q=" +
                               net::url_encode("(deep learning) AND yearPublished>=2020") + "&limit=5");
    EXPECT_NE(std::find(reqs[0].headers.begin(), reqs[0].headers.end(),
                        std::make_pair(std::string("Authorization"), std::string("Bearer secret"))),
              reqs[0].headers.end());
}

TEST(HttpSearchProvider, ErrorMapping) {
    net::SimulatedClock clock;
    SearchQuery q;
    q.topic = "x";
    auto code_of = [&](std::vector<ScriptedTransport::Reply> replies) {
        ScriptedTransport transport(std::move(replies));
        auto limits = quick();
        limits.max_retries = 1;
        HttpSearchProvider provider("https://core.example", "", transport, limits, clock);
        try {
            provider.search(q);
        } catch (const Error& e) {
            return e.code();
        }
        return std::string("none");
    };
    EXPECT_EQ(code_of({{-1, ""}, {-1, ""}}), "provider-unreachable");
    EXPECT_EQ(code_of({{401, "no key"}}), "provider-rejected");
    EXPECT_EQ(code_of({{200, "not json"}}), "malformed-response");
    EXPECT_EQ(code_of({{200, "{\"hits\": []}"}}), "malformed-response");
    EXPECT_EQ(code_of({{502, ""}, {200, "{\"results\": []}"}}), "none");
}

TEST(HttpMetadataProvider, ParsesCrossrefWork) {
    const json message = {
        {"DOI", "10.5/Root"},
        {"title", {"Root title"}},
        {"author", {{{"family", "Ode"}, {"given", "Ama"}}, {{"name", "Consortium"}}}},
        {"issued", {{"date-parts", {{2019, 4}}}}},
        {"container-title", {"Journal R"}},
        {"link", {{{"URL", "https://pub.example/r.pdf"}, {"content-type", "application/pdf"}}}},
        {"reference",
         {{{"DOI", "10.5/ref1"}, {"article-title", "Ref one"}, {"author", "Kim"}, {"year", "2001"}},
          {{"unstructured", "Free text reference"}},
          json::object()}},
        {"cited-by", {{{"DOI", "10.5/cit"}, {"title", {"Citing"}}}}}};
    ScriptedTransport transport({{200, json{{"message", message}}.dump()}});
    net::SimulatedClock clock;
    HttpMetadataProvider provider("https://api.crossref.example", transport, quick(), clock);
    const auto g = provider.graph("10.5/root");
    EXPECT_EQ(transport.requests()[0].url, "https://api.crossref.example/works/10.5/root");
    EXPECT_EQ(g.root.title, "Root title");
    EXPECT_EQ(g.root.year, 2019);
    EXPECT_EQ(g.root.venue, "Journal R");
    EXPECT_EQ(format_apa_intext(g.root), "(Ode & Consortium, 2019)");
    EXPECT_EQ(g.root.pdf_urls, std::vector<std::string>{"https://pub.example/r.pdf"});
    ASSERT_EQ(g.references.size(), 2u);
    EXPECT_EQ(g.references[0].doi, "10.5/ref1");
    EXPECT_EQ(g.references[0].year, 2001);
    EXPECT_EQ(g.references[1].title, "Free text reference");
    ASSERT_EQ(g.citations.size(), 1u);
    EXPECT_EQ(g.citations[0].doi, "10.5/cit");
}

TEST(HttpMetadataProvider, NotFoundAndMalformed) {
    net::SimulatedClock clock;
    {
        ScriptedTransport transport({{404, "Resource not found."}});
        HttpMetadataProvider provider("https://m.example", transport, quick(), clock);
        try {
            provider.graph("10.1/x");
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), "doi-not-found");
        }
    }
    {
        ScriptedTransport transport({{200, "{\"status\":\"ok\"}"}});
        HttpMetadataProvider provider("https://m.example", transport, quick(), clock);
        try {
            provider.graph("10.1/x");
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), "malformed-response");
            EXPECT_NE(e.detail().find("status"), std::string::npos);
        }
    }
}

TEST(HttpFetcher, ClassifiesOutcomes) {
    net::SimulatedClock clock;
    auto limits = quick();
    limits.max_retries = 0;
    ScriptedTransport transport({{200, "%PDF-1.4 body"}, {404, ""}, {500, ""}});
    HttpFetcher fetcher(transport, limits, clock);
    EXPECT_EQ(fetcher.fetch("https://h/a.pdf").status, FetchStatus::ok);
    EXPECT_EQ(fetcher.fetch("https://h/b.pdf").status, FetchStatus::not_found);
    EXPECT_EQ(fetcher.fetch("https://h/c.pdf").status, FetchStatus::failed);
}

TEST(FixtureFetcher, RefusesPathsOutsideFixtureDir) {
    FixtureFetcher fetcher(fixtures_dir() / "pdfs");
    EXPECT_EQ(fetcher.fetch("../search.json").status, FetchStatus::failed);
    EXPECT_EQ(fetcher.fetch("r01.pdf").status, FetchStatus::ok);
    EXPECT_EQ(fetcher.fetch("fixture:r01.pdf").status, FetchStatus::ok);
    EXPECT_EQ(fetcher.fetch("https://example.org/r01.pdf").status, FetchStatus::not_found);
}

TEST(GraphJson, RoundTrip) {
    FixtureMetadataProvider provider(fixtures_dir());
    const auto g = provider.graph("10.5555/auto.root");
    const auto back = json::parse(json(g).dump()).get<CitationGraph>();
    EXPECT_EQ(back.root, g.root);
    EXPECT_EQ(back.references, g.references);
    EXPECT_EQ(back.citations, g.citations);
}

}  // namespace
}  // namespace litpipe::harvest
