#include "litpipe/server.hpp"

#include <map>
#include <mutex>
#include <regex>
#include <thread>

#include <httplib.h>

#include "litpipe/chat.hpp"
#include "litpipe/error.hpp"
#include "litpipe/harvest.hpp"
#include "litpipe/pipeline.hpp"
#include "litpipe/review.hpp"

namespace litpipe::server {

using nlohmann::json;

int status_for(const std::string& code) {
    static const std::map<std::string, int> table = {
        {"unknown-conversation", 404}, {"unknown-document", 404}, {"unknown-run", 404},
        {"doi-not-found", 404},        {"not-found", 404},        {"no-table", 409},
        {"no-clusters", 409},          {"provider-unreachable", 502}, {"provider-rejected", 502},
        {"malformed-response", 502},   {"provider-noncompliant", 502}, {"provider-unavailable", 503},
        {"port-in-use", 500},          {"dest-unwritable", 500},  {"extractor-failed", 422},
        {"empty-extraction", 422},     {"internal", 500},
    };
    if (auto it = table.find(code); it != table.end()) return it->second;
    return 400;
}

namespace {

ApiResponse error_response(const std::string& code, const std::string& detail) {
    return {status_for(code), json{{"error", code}, {"detail", detail}}};
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        auto j = json::parse(body);
        if (!j.is_object()) throw Error("invalid-request", "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw Error("invalid-request", std::string("malformed JSON: ") + e.what());
    }
}

std::string required_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw Error("invalid-request", std::string("missing string field '") + key + "'");
    }
    return j[key].get<std::string>();
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw Error("invalid-request", std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

struct Service::Impl {
    SuiteConfig config;
    Providers providers;
    chat::DocumentStore docs;
    chat::ChatEngine engine;

    std::mutex review_mu;
    std::vector<review::ReviewRow> rows;
    std::vector<review::Cluster> clusters;

    std::mutex runs_mu;
    std::map<std::string, pipeline::PipelineRun> runs;
    std::vector<std::jthread> run_threads;

    std::mutex docs_mu;

    httplib::Server http;
    std::thread listener;

    Impl(SuiteConfig c, Providers p)
        : config(std::move(c)),
          providers(std::move(p)),
          engine(docs, *providers.embedder, *providers.chat, config.prompt_budget) {}

    ApiResponse route(const std::string& method, const std::string& path, const json& body);

    ApiResponse search(const json& body) {
        const auto query = body.get<harvest::SearchQuery>();
        return {200, json(harvest::search_articles(query, providers.require_search()))};
    }

    ApiResponse harvest_req(const json& body) {
        const auto dest = config.resolve(required_string(body, "dest"));
        std::error_code ec;
        fs::create_directories(dest, ec);
        if (body.contains("doi")) {
            harvest::GraphProviders gp{&providers.require_metadata(), providers.fetcher.get(), providers.search.get()};
            const auto report = harvest::harvest_graph(required_string(body, "doi"), dest, gp, config.rate);
            return {200, json(report.merged())};
        }
        if (!body.contains("records")) throw Error("invalid-request", "harvest needs 'doi' or 'records'");
        const auto records = body.at("records").get<std::vector<BibRecord>>();
        for (const auto& r : records) validate(r);
        return {200, json(harvest::download_pdfs(records, dest, config.rate, *providers.fetcher))};
    }

    ApiResponse add_doc(const json& body) {
        const fs::path pdf = config.resolve(required_string(body, "path"));
        std::lock_guard lock(docs_mu);
        auto base = pdf.stem().string();
        auto id = base;
        for (int n = 2;; ++n) {
            std::shared_ptr<const chat::IndexedDocument> existing;
            try {
                existing = docs.get(id);
            } catch (const Error&) {
                break;
            }
            if (existing->doc.source_path == pdf) {
                return {200, json{{"doc_id", id}, {"chunk_count", existing->chunks.size()}}};
            }
            id = collision_variant(base, n);
        }
        auto doc = ingest::extract_text(pdf, *providers.extractor, id);
        auto stored = docs.add(chat::index_document(std::move(doc), config.chunk, *providers.embedder));
        return {201, json{{"doc_id", id}, {"chunk_count", stored->chunks.size()}}};
    }

    ApiResponse list_docs() {
        json out = json::array();
        for (const auto& d : docs.list()) {
            out.push_back({{"doc_id", d->doc.doc_id},
                           {"source_path", d->doc.source_path.string()},
                           {"chunk_count", d->chunks.size()},
                           {"sections", d->doc.sections}});
        }
        return {200, out};
    }

    ApiResponse ask(const json& body) {
        const auto mode = chat::mode_from_string(field<std::string>(body, "mode", "document"));
        const auto k = field<std::size_t>(body, "k", config.k);
        auto conv_id = field<std::string>(body, "conv_id", "");
        if (conv_id.empty()) {
            conv_id = engine.create_conversation(required_string(body, "doc_id"));
        } else if (body.contains("doc_id") && body["doc_id"].is_string() &&
                   engine.conversation(conv_id).doc_id != body["doc_id"].get<std::string>()) {
            throw Error("invalid-request", "conversation " + conv_id + " belongs to another document");
        }
        const auto question = field<std::string>(body, "question", "");
        const auto turn = engine.ask(conv_id, question, mode, k);
        json out = turn;
        out["conv_id"] = conv_id;
        return {200, out};
    }

    ApiResponse export_chat(const std::string& conv_id, const json& body) {
        const auto conv = engine.conversation(conv_id);
        const auto format = field<std::string>(body, "format", "markdown") == "odt" ? chat::TranscriptFormat::flat_odt
                                                                                     : chat::TranscriptFormat::markdown;
        fs::path dest = body.contains("dest") ? config.resolve(required_string(body, "dest"))
                                              : config.workspace / "transcripts";
        std::error_code ec;
        if (!body.contains("dest")) fs::create_directories(dest, ec);
        return {200, json{{"path", chat::export_transcript(conv, dest, format).string()}}};
    }

    ApiResponse table(const json& body) {
        const auto root = config.resolve(required_string(body, "root"));
        const auto queries = body.contains("queries") ? body["queries"].get<review::QuerySet>() : config.queries;
        review::TableParams params{config.chunk, field<std::size_t>(body, "k", config.k), config.workers};
        auto result = review::build_table(root, queries, providers.review(), params);
        if (body.contains("dest")) {
            const auto dest = config.resolve(required_string(body, "dest"));
            if (!result.rows.empty()) review::export_table(result.rows, dest);
            review::write_skipped(result.skipped, dest);
        }
        std::set<std::string> groups;
        for (const auto& r : result.rows) groups.insert(r.group);
        json out{{"rows", result.rows}, {"skipped", result.skipped}, {"row_count", result.rows.size()},
                 {"groups", groups}};
        std::lock_guard lock(review_mu);
        rows = std::move(result.rows);
        clusters.clear();
        return {200, out};
    }

    ApiResponse cluster(const json& body) {
        std::lock_guard lock(review_mu);
        if (body.contains("rows")) rows = body["rows"].get<std::vector<review::ReviewRow>>();
        if (rows.empty()) throw Error("no-table", "build a table before clustering");
        clusters = review::cluster_rows(rows, field<std::size_t>(body, "K", config.cluster_k), *providers.embedder);
        return {200, json{{"clusters", clusters}}};
    }

    ApiResponse synthesize(const json&) {
        std::lock_guard lock(review_mu);
        if (clusters.empty()) throw Error("no-clusters", "cluster the table before synthesizing");
        return {200, json{{"sections", review::synthesize(clusters, rows, *providers.chat)}}};
    }

    ApiResponse start_run(const json& body) {
        auto cfg = config;
        apply_overrides(cfg, body.value("overrides", json::object()));
        cfg.validate();
        const auto input_json = body.value("input", json::object());
        pipeline::Input input;
        if (input_json.contains("folder")) {
            input = cfg.resolve(required_string(input_json, "folder"));
        } else if (input_json.contains("query")) {
            input = input_json["query"].get<harvest::SearchQuery>();
        } else {
            throw Error("invalid-request", "input needs 'folder' or 'query'");
        }
        auto providers_for_run = std::make_shared<Providers>(make_providers(cfg));
        auto run = pipeline::start_run(cfg, input);
        const auto id = run.run_id;
        std::lock_guard lock(runs_mu);
        runs[id] = run;
        run_threads.emplace_back([this, cfg, providers_for_run, run]() mutable {
            pipeline::execute_run(run, cfg, *providers_for_run, [this](const pipeline::PipelineRun& r) {
                std::lock_guard l(runs_mu);
                runs[r.run_id] = r;
            });
        });
        return {202, json{{"run_id", id}}};
    }

    ApiResponse get_run(const std::string& id) {
        {
            std::lock_guard lock(runs_mu);
            if (auto it = runs.find(id); it != runs.end()) return {200, pipeline::to_json(it->second)};
        }
        return {200, pipeline::to_json(pipeline::load_run(config.workspace, id))};
    }

    ApiResponse list_runs() {
        json out = json::array();
        std::error_code ec;
        const auto dir = config.workspace / "runs";
        if (fs::is_directory(dir, ec)) {
            std::vector<std::string> ids;
            for (const auto& e : fs::directory_iterator(dir)) ids.push_back(e.path().filename().string());
            std::sort(ids.begin(), ids.end());
            for (const auto& id : ids) {
                try {
                    const auto r = get_run(id).body;
                    out.push_back({{"run_id", id}, {"status", r.at("status")}});
                } catch (const Error&) {
                }
            }
        }
        return {200, out};
    }
};

ApiResponse Service::Impl::route(const std::string& method, const std::string& path, const json& body) {
    static const std::regex chat_get(R"(/api/chat/([^/]+))");
    static const std::regex chat_export(R"(/api/chat/([^/]+)/export)");
    static const std::regex run_get(R"(/api/runs/([^/]+))");
    std::smatch m;
    if (method == "GET") {
        if (path == "/api/health") return {200, json{{"status", "ok"}}};
        if (path == "/api/docs") return list_docs();
        if (path == "/api/runs") return list_runs();
        if (std::regex_match(path, m, chat_get)) return {200, json(engine.conversation(m[1].str()))};
        if (std::regex_match(path, m, run_get)) return get_run(m[1].str());
    } else if (method == "POST") {
        if (path == "/api/search") return search(body);
        if (path == "/api/harvest") return harvest_req(body);
        if (path == "/api/docs") return add_doc(body);
        if (path == "/api/chat") return ask(body);
        if (path == "/api/review/table") return table(body);
        if (path == "/api/review/cluster") return cluster(body);
        if (path == "/api/review/synthesize") return synthesize(body);
        if (path == "/api/runs") return start_run(body);
        if (std::regex_match(path, m, chat_export)) return export_chat(m[1].str(), body);
    }
    throw Error("not-found", method + " " + path + " is not an API route");
}

Service::Service(SuiteConfig config) : Service(config, make_providers(config)) {}

Service::Service(SuiteConfig config, Providers providers) {
    config.validate();
    impl_ = std::make_unique<Impl>(std::move(config), std::move(providers));
}

Service::~Service() {
    stop();
    join_runs();
}

const SuiteConfig& Service::config() const { return impl_->config; }

ApiResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
    try {
        return impl_->route(method, path, parse_body(body));
    } catch (const Error& e) {
        return error_response(e.code(), e.detail());
    } catch (const json::exception& e) {
        return error_response("invalid-request", e.what());
    } catch (const std::exception& e) {
        return error_response("internal", e.what());
    }
}

int Service::start() {
    auto& http = impl_->http;
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const auto r = handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    http.Get(R"(/api/.*)", handler);
    http.Post(R"(/api/.*)", handler);
    http.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    if (!impl_->config.static_dir.empty()) http.set_mount_point("/", impl_->config.static_dir.string());
    const auto& host = impl_->config.host;
    int port = impl_->config.port;
    if (port == 0) {
        port = http.bind_to_any_port(host);
        if (port < 0) throw Error("port-in-use", "cannot bind " + host);
    } else if (!http.bind_to_port(host, port)) {
        throw Error("port-in-use", "cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->listener = std::thread([&http] { http.listen_after_bind(); });
    http.wait_until_ready();
    return port;
}

void Service::stop() {
    if (!impl_) return;
    impl_->http.stop();
    if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::wait() {
    if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::join_runs() {
    std::vector<std::jthread> threads;
    {
        std::lock_guard lock(impl_->runs_mu);
        threads.swap(impl_->run_threads);
    }
    threads.clear();
}

}  // namespace litpipe::server
