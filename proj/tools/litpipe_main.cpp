#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "litpipe/chat.hpp"
#include "litpipe/config.hpp"
#include "litpipe/error.hpp"
#include "litpipe/harvest.hpp"
#include "litpipe/pipeline.hpp"
#include "litpipe/providers.hpp"
#include "litpipe/review.hpp"
#include "litpipe/server.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace litpipe;

namespace {

struct GlobalOptions {
    std::string config_path;
    bool offline = false;
    std::optional<std::size_t> k;
    std::optional<std::size_t> cluster_k;
    std::string fixtures;
    std::string workspace;
};

struct QueryOptions {
    std::string topic, title, author;
    std::optional<int> year_from, year_to;
    int max_results = 25;

    harvest::SearchQuery query() const {
        harvest::SearchQuery q;
        if (!topic.empty()) q.topic = topic;
        if (!title.empty()) q.title = title;
        if (!author.empty()) q.author = author;
        q.year_from = year_from;
        q.year_to = year_to;
        q.max_results = max_results;
        return q;
    }
    bool any() const { return !topic.empty() || !title.empty() || !author.empty(); }
};

void add_query_options(CLI::App* app, QueryOptions& q) {
    app->add_option("--topic", q.topic, "Topic keywords");
    app->add_option("--title", q.title, "Title words");
    app->add_option("--author", q.author, "Author name");
    app->add_option("--year-from", q.year_from, "Earliest publication year");
    app->add_option("--year-to", q.year_to, "Latest publication year");
    app->add_option("--max-results", q.max_results, "Maximum number of records")->check(CLI::Range(1, 1000));
}

SuiteConfig load(const GlobalOptions& g) {
    SuiteConfig c = g.config_path.empty() ? SuiteConfig{} : load_config(g.config_path);
    apply_env(c);
    if (g.offline) c.offline = true;
    if (g.k) c.k = *g.k;
    if (g.cluster_k) c.cluster_k = *g.cluster_k;
    if (!g.fixtures.empty()) c.fixtures = g.fixtures;
    if (!g.workspace.empty()) c.workspace = g.workspace;
    c.validate();
    return c;
}

void write_json(const fs::path& path, const json& j) { pipeline::write_atomic(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("invalid-argument", "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("invalid-argument", path.string() + ": " + e.what());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir, ec)) throw Error("dest-unwritable", "cannot create " + dir.string());
}

void print_turn(const chat::Turn& t) {
    std::cout << t.text << "\n";
    if (t.mode == chat::Mode::document) {
        std::cout << "Sources:";
        if (t.cited_chunks.empty()) std::cout << " none";
        for (const auto& c : t.cited_chunks) std::cout << " " << c.str();
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Literature review pipeline: search, harvest, chat, table, cluster, synthesize"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--config", g.config_path, "Configuration file (TOML-style key = value)");
    app.add_flag("--offline", g.offline, "Use fixture and fallback providers only");
    app.add_option("--k", g.k, "Chunks retrieved per question")->check(CLI::PositiveNumber);
    app.add_option("--cluster-k", g.cluster_k, "Maximum cluster size")->check(CLI::PositiveNumber);
    app.add_option("--fixtures", g.fixtures, "Fixture directory for offline providers");
    app.add_option("--workspace", g.workspace, "Workspace directory for runs and transcripts");

    QueryOptions search_q;
    std::string search_out;
    auto* search = app.add_subcommand("search", "Search for articles");
    add_query_options(search, search_q);
    search->add_option("--out", search_out, "Write records.json into this directory");

    std::string harvest_doi, harvest_records, harvest_out;
    auto* harvest_cmd = app.add_subcommand("harvest", "Download PDFs for a DOI's citation graph or a record list");
    auto* doi_opt = harvest_cmd->add_option("--doi", harvest_doi, "Root DOI");
    harvest_cmd->add_option("--records", harvest_records, "JSON file with an array of records")->excludes(doi_opt);
    harvest_cmd->add_option("--out", harvest_out, "Destination directory")->required();

    std::string chat_pdf, chat_mode = "document", chat_transcript;
    std::vector<std::string> chat_questions;
    auto* chat_cmd = app.add_subcommand("chat", "Ask questions about one PDF (questions from -q or stdin)");
    chat_cmd->add_option("--pdf", chat_pdf, "PDF file")->required()->check(CLI::ExistingFile);
    chat_cmd->add_option("-q,--question", chat_questions, "Question (repeatable)");
    chat_cmd->add_option("--mode", chat_mode, "document or general")->check(CLI::IsMember({"document", "general"}));
    chat_cmd->add_option("--out", chat_transcript, "Write the Markdown transcript to this file or directory");

    std::string table_root, table_out;
    bool table_sheet = false;
    auto* table_cmd = app.add_subcommand("table", "Build the literature table for a folder of PDFs");
    table_cmd->add_option("--root", table_root, "Folder of PDFs (searched recursively)")->required();
    table_cmd->add_option("--out", table_out, "Output directory")->required();
    table_cmd->add_flag("--spreadsheet", table_sheet, "Also write table.fods with one sheet per group");

    std::string cluster_rows_path, cluster_out;
    bool cluster_odt = false;
    auto* cluster_cmd = app.add_subcommand("cluster", "Group table rows by embedding similarity");
    cluster_cmd->add_option("--rows", cluster_rows_path, "rows.json written by `table`")->required();
    cluster_cmd->add_option("--out", cluster_out, "Output directory")->required();
    cluster_cmd->add_flag("--odt", cluster_odt, "Also write clusters.fodt");

    std::string syn_rows, syn_clusters, syn_out;
    auto* syn_cmd = app.add_subcommand("synthesize", "Write a cited synthesis per cluster");
    syn_cmd->add_option("--rows", syn_rows, "rows.json written by `table`")->required();
    syn_cmd->add_option("--clusters", syn_clusters, "clusters.json written by `cluster`")->required();
    syn_cmd->add_option("--out", syn_out, "Output directory")->required();

    QueryOptions run_q;
    std::string run_folder;
    auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline on a query or a folder of PDFs");
    add_query_options(run_cmd, run_q);
    run_cmd->add_option("--folder", run_folder, "Existing folder of PDFs (skips search and harvest)");
    run_cmd->add_option("--out", g.workspace, "Workspace directory (runs go under <out>/runs)");

    std::optional<int> serve_port;
    std::string serve_host;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API (and the web UI bundle if configured)");
    serve_cmd->add_option("--port", serve_port, "Port (0 picks a free one)");
    serve_cmd->add_option("--host", serve_host, "Bind address");

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = load(g);
        if (search->parsed()) {
            auto providers = make_providers(config);
            const auto records = harvest::search_articles(search_q.query(), providers.require_search());
            if (!search_out.empty()) {
                ensure_dir(search_out);
                write_json(fs::path(search_out) / "records.json", records);
            }
            std::cout << json(records).dump(2) << "\n";
        } else if (harvest_cmd->parsed()) {
            auto providers = make_providers(config);
            ensure_dir(harvest_out);
            json report;
            if (!harvest_doi.empty()) {
                harvest::GraphProviders gp{&providers.require_metadata(), providers.fetcher.get(),
                                           providers.search.get()};
                report = harvest::harvest_graph(harvest_doi, harvest_out, gp, config.rate).merged();
            } else if (!harvest_records.empty()) {
                const auto records = read_json(harvest_records).get<std::vector<BibRecord>>();
                report = harvest::download_pdfs(records, harvest_out, config.rate, *providers.fetcher);
            } else {
                throw Error("invalid-argument", "harvest needs --doi or --records");
            }
            write_json(fs::path(harvest_out) / "report.json", report);
            std::cout << report.dump(2) << "\n";
        } else if (chat_cmd->parsed()) {
            auto providers = make_providers(config);
            chat::DocumentStore store;
            auto doc = ingest::extract_text(chat_pdf, *providers.extractor);
            const auto doc_id = doc.doc_id;
            store.add(chat::index_document(std::move(doc), config.chunk, *providers.embedder));
            chat::ChatEngine engine(store, *providers.embedder, *providers.chat, config.prompt_budget);
            const auto conv = engine.create_conversation(doc_id);
            const auto default_mode = chat::mode_from_string(chat_mode);
            auto ask = [&](std::string q) {
                auto mode = default_mode;
                if (q.starts_with("/general ")) {
                    mode = chat::Mode::general;
                    q.erase(0, 9);
                } else if (q.starts_with("/document ")) {
                    mode = chat::Mode::document;
                    q.erase(0, 10);
                }
                print_turn(engine.ask(conv, q, mode, config.k));
            };
            if (!chat_questions.empty()) {
                for (const auto& q : chat_questions) ask(q);
            } else {
                std::string line;
                while (std::getline(std::cin, line)) {
                    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                    try {
                        ask(line);
                    } catch (const Error& e) {
                        if (e.code() != "empty-question") throw;
                    }
                }
            }
            if (!chat_transcript.empty()) {
                std::cerr << "transcript: " << chat::export_transcript(engine.conversation(conv), chat_transcript).string()
                          << "\n";
            }
        } else if (table_cmd->parsed()) {
            auto providers = make_providers(config);
            review::TableParams params{config.chunk, config.k, config.workers};
            const auto result = review::build_table(table_root, config.queries, providers.review(), params);
            ensure_dir(table_out);
            review::write_skipped(result.skipped, table_out);
            write_json(fs::path(table_out) / "rows.json", result.rows);
            review::export_table(result.rows, table_out,
                                 table_sheet ? review::ExportExtras::spreadsheet : review::ExportExtras::none);
            std::set<std::string> groups;
            for (const auto& r : result.rows) groups.insert(r.group);
            std::cout << json{{"row_count", result.rows.size()}, {"groups", groups}, {"skipped", result.skipped}}.dump(2)
                      << "\n";
        } else if (cluster_cmd->parsed()) {
            auto providers = make_providers(config);
            const auto rows = read_json(cluster_rows_path).get<std::vector<review::ReviewRow>>();
            const auto clusters = review::cluster_rows(rows, config.cluster_k, *providers.embedder);
            ensure_dir(cluster_out);
            write_json(fs::path(cluster_out) / "clusters.json", clusters);
            review::export_clusters_doc(clusters, rows, cluster_out);
            if (cluster_odt) review::export_clusters_doc(clusters, rows, cluster_out, review::DocFormat::flat_odt);
            json sizes = json::array();
            for (const auto& c : clusters) sizes.push_back(c.member_rows.size());
            std::cout << json{{"clusters", clusters.size()}, {"sizes", sizes}}.dump(2) << "\n";
        } else if (syn_cmd->parsed()) {
            auto providers = make_providers(config);
            const auto rows = read_json(syn_rows).get<std::vector<review::ReviewRow>>();
            const auto clusters = read_json(syn_clusters).get<std::vector<review::Cluster>>();
            const auto sections = review::synthesize(clusters, rows, *providers.chat);
            ensure_dir(syn_out);
            pipeline::write_atomic(fs::path(syn_out) / "synthesis.md", review::render_synthesis(sections));
            write_json(fs::path(syn_out) / "synthesis.json", sections);
            for (const auto& s : sections) {
                for (const auto& w : s.warnings) std::cerr << "warning: cluster " << s.cluster_id << ": " << w << "\n";
            }
            std::cout << review::render_synthesis(sections);
        } else if (run_cmd->parsed()) {
            if (run_folder.empty() == !run_q.any()) throw Error("invalid-argument", "run needs --folder or query options");
            pipeline::Input input;
            if (!run_folder.empty()) input = fs::path(run_folder);
            else input = run_q.query();
            const auto run = pipeline::run_pipeline(config, input);
            std::cout << pipeline::to_json(run).dump(2) << "\n";
            return run.status == "completed" ? 0 : 1;
        } else if (serve_cmd->parsed()) {
            if (serve_port) config.port = *serve_port;
            if (!serve_host.empty()) config.host = serve_host;
            server::Service service(config);
            const int port = service.start();
            std::cerr << "serving on http://" << config.host << ":" << port << "\n";
            service.wait();
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
