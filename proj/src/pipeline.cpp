#include "litpipe/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

#include "litpipe/error.hpp"
#include "litpipe/review.hpp"
#include "litpipe/semantic.hpp"

namespace litpipe::pipeline {

using nlohmann::json;

void write_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    auto tmp = path;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("dest-unwritable", "cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("dest-unwritable", "short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Error("dest-unwritable", "cannot rename into " + path.string() + ": " + ec.message());
}

std::vector<std::string> planned_stages(const Input& input) {
    if (std::holds_alternative<harvest::SearchQuery>(input)) return kAllStages;
    return {"ingest", "table", "cluster", "synthesize"};
}

std::string allocate_run_id(const fs::path& workspace) {
    static std::mutex mu;
    std::lock_guard lock(mu);
    const auto runs = workspace / "runs";
    std::error_code ec;
    fs::create_directories(runs, ec);
    if (!fs::is_directory(runs, ec)) throw Error("dest-unwritable", "cannot create " + runs.string());
    static const std::regex pattern(R"(run-([0-9]{6,}))");
    long long next = 1;
    for (const auto& entry : fs::directory_iterator(runs)) {
        std::smatch m;
        const auto name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) next = std::max(next, std::stoll(m[1].str()) + 1);
    }
    while (true) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "run-%06lld", next);
        if (fs::create_directory(runs / buf, ec)) return buf;
        if (ec) throw Error("dest-unwritable", "cannot create run directory: " + ec.message());
        ++next;
    }
}

namespace {

void persist(const PipelineRun& run) { write_atomic(run.run_dir / "run.json", to_json(run).dump(2) + "\n"); }

std::string rel(const PipelineRun& run, const fs::path& p) { return p.lexically_relative(run.run_dir).generic_string(); }

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

// State carried between stages of one run.
struct Carry {
    std::vector<BibRecord> records;
    fs::path corpus_root;
    std::optional<review::Corpus> corpus;
    std::vector<review::ReviewRow> rows;
    std::vector<review::Skipped> skipped;
    std::vector<review::Cluster> clusters;
};

review::TableParams table_params(const SuiteConfig& c) { return {c.chunk, c.k, c.workers}; }

void stage_search(PipelineRun& run, const Input& input, Providers& p, Carry& carry) {
    const auto& query = std::get<harvest::SearchQuery>(input);
    carry.records = harvest::search_articles(query, p.require_search());
    const auto path = run.run_dir / "search" / "records.json";
    write_json(path, carry.records);
    run.artifacts["search"] = {rel(run, path)};
    run.stats["search"] = {{"records", carry.records.size()}};
}

void stage_harvest(PipelineRun& run, const SuiteConfig& c, Providers& p, Carry& carry) {
    const auto dest = run.run_dir / "harvest" / "pdfs";
    fs::create_directories(dest);
    const auto report = harvest::download_pdfs(carry.records, dest, c.rate, *p.fetcher);
    const auto path = run.run_dir / "harvest" / "report.json";
    write_json(path, report);
    auto& art = run.artifacts["harvest"];
    art = {rel(run, path), rel(run, report.links_file), rel(run, report.not_found_file)};
    for (const auto& s : report.saved) art.push_back(rel(run, s.path));
    run.stats["harvest"] = {{"saved", report.saved.size()},
                            {"not_found", report.not_found.size()},
                            {"failures", report.failures.size()}};
    carry.corpus_root = dest;
}

void stage_ingest(PipelineRun& run, const SuiteConfig& c, Providers& p, Carry& carry) {
    carry.corpus = review::ingest_corpus(carry.corpus_root, p.review(), table_params(c));
    const auto& corpus = *carry.corpus;
    const auto dir = run.run_dir / "ingest";
    json docs = json::array();
    std::string chunks;
    std::optional<semantic::VectorIndex> combined;
    for (const auto& d : corpus.docs) {
        docs.push_back({{"doc_id", d.row_id},
                        {"source_path", d.source_path.generic_string()},
                        {"group", d.group},
                        {"apa_intext", d.apa_intext},
                        {"sections", d.indexed.doc.sections},
                        {"chunk_count", d.indexed.chunks.size()}});
        for (const auto& ch : d.indexed.chunks) {
            chunks += json(ch).dump() + "\n";
            const auto key = semantic::EntryKey::chunk(ch.doc_id, static_cast<std::int64_t>(ch.chunk_id));
            if (auto v = d.indexed.index.vector(key)) {
                if (!combined) combined.emplace(v->dim());
                combined->insert(key, *v);
            }
        }
    }
    write_json(dir / "documents.json", docs);
    write_atomic(dir / "chunks.jsonl", chunks);
    auto& art = run.artifacts["ingest"];
    art = {rel(run, dir / "documents.json"), rel(run, dir / "chunks.jsonl")};
    if (combined) {
        combined->save(dir / "index.json");
        art.push_back(rel(run, dir / "index.json"));
    }
    art.push_back(rel(run, review::write_skipped(corpus.skipped, dir)));
    run.stats["ingest"] = {{"documents", corpus.docs.size()}, {"skipped", corpus.skipped.size()}};
}

void stage_table(PipelineRun& run, const SuiteConfig& c, Providers& p, Carry& carry) {
    auto result = review::table_from_corpus(*carry.corpus, c.queries, p.review(), table_params(c));
    carry.rows = std::move(result.rows);
    carry.skipped = std::move(result.skipped);
    const auto dir = run.run_dir / "table";
    auto& art = run.artifacts["table"];
    art.clear();
    for (const auto& path : review::export_table(carry.rows, dir)) art.push_back(rel(run, path));
    write_json(dir / "rows.json", carry.rows);
    art.push_back(rel(run, dir / "rows.json"));
    art.push_back(rel(run, review::write_skipped(carry.skipped, dir)));
    std::set<std::string> groups;
    for (const auto& r : carry.rows) groups.insert(r.group);
    run.stats["table"] = {{"row_count", carry.rows.size()}, {"groups", groups}, {"skipped", carry.skipped.size()}};
}

void stage_cluster(PipelineRun& run, const SuiteConfig& c, Providers& p, Carry& carry) {
    carry.clusters = review::cluster_rows(carry.rows, c.cluster_k, *p.embedder);
    const auto dir = run.run_dir / "cluster";
    fs::create_directories(dir);
    write_json(dir / "clusters.json", carry.clusters);
    const auto doc = review::export_clusters_doc(carry.clusters, carry.rows, dir);
    run.artifacts["cluster"] = {rel(run, dir / "clusters.json"), rel(run, doc)};
    json sizes = json::array();
    for (const auto& cl : carry.clusters) sizes.push_back(cl.member_rows.size());
    run.stats["cluster"] = {{"clusters", carry.clusters.size()}, {"sizes", sizes}};
}

void stage_synthesize(PipelineRun& run, Providers& p, Carry& carry) {
    const auto sections = review::synthesize(carry.clusters, carry.rows, *p.chat);
    const auto dir = run.run_dir / "synthesize";
    write_atomic(dir / "synthesis.md", review::render_synthesis(sections));
    write_json(dir / "synthesis.json", sections);
    run.artifacts["synthesize"] = {rel(run, dir / "synthesis.md"), rel(run, dir / "synthesis.json")};
    std::size_t warnings = 0;
    for (const auto& s : sections) warnings += s.warnings.size();
    run.stats["synthesize"] = {{"sections", sections.size()}, {"warnings", warnings}};
}

}  // namespace

PipelineRun start_run(const SuiteConfig& config, const Input& input) {
    config.validate();
    PipelineRun run;
    if (const auto* q = std::get_if<harvest::SearchQuery>(&input)) {
        try {
            q->validate();
        } catch (const Error& e) {
            throw Error("invalid-input", e.detail());
        }
        run.input = {{"kind", "query"}, {"query", *q}};
    } else {
        const auto& folder = std::get<fs::path>(input);
        std::error_code ec;
        if (!fs::is_directory(folder, ec)) throw Error("invalid-input", folder.string() + " is not a directory");
        run.input = {{"kind", "folder"}, {"folder", fs::weakly_canonical(folder).generic_string()}};
    }
    run.stages = planned_stages(input);
    run.run_id = allocate_run_id(config.workspace);
    run.run_dir = config.workspace / "runs" / run.run_id;
    persist(run);
    return run;
}

void execute_run(PipelineRun& run, const SuiteConfig& config, Providers& providers, const Observer& observer) {
    Input input;
    if (run.input.at("kind") == "query") {
        input = run.input.at("query").get<harvest::SearchQuery>();
    } else {
        input = fs::path(run.input.at("folder").get<std::string>());
    }
    Carry carry;
    if (const auto* folder = std::get_if<fs::path>(&input)) carry.corpus_root = *folder;
    for (const auto& stage : run.stages) {
        try {
            if (stage == "search") stage_search(run, input, providers, carry);
            else if (stage == "harvest") stage_harvest(run, config, providers, carry);
            else if (stage == "ingest") stage_ingest(run, config, providers, carry);
            else if (stage == "table") stage_table(run, config, providers, carry);
            else if (stage == "cluster") stage_cluster(run, config, providers, carry);
            else if (stage == "synthesize") stage_synthesize(run, providers, carry);
            run.stages_completed.push_back(stage);
        } catch (const Error& e) {
            run.errors[stage] = {e.code(), e.detail()};
        } catch (const std::exception& e) {
            run.errors[stage] = {"internal", e.what()};
        }
        if (run.errors.count(stage)) {
            run.status = "failed";
            persist(run);
            if (observer) observer(run);
            return;
        }
        persist(run);
        if (observer) observer(run);
    }
    run.status = "completed";
    persist(run);
    if (observer) observer(run);
}

PipelineRun run_pipeline(const SuiteConfig& config, const Input& input) {
    config.validate();
    auto providers = make_providers(config);
    auto run = start_run(config, input);
    execute_run(run, config, providers);
    return run;
}

PipelineRun load_run(const fs::path& workspace, const std::string& run_id) {
    static const std::regex pattern(R"(run-[0-9]{6,})");
    if (!std::regex_match(run_id, pattern)) throw Error("unknown-run", "malformed run id '" + run_id + "'");
    const auto path = workspace / "runs" / run_id / "run.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("unknown-run", "no run '" + run_id + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        auto run = run_from_json(json::parse(ss.str()));
        run.run_dir = workspace / "runs" / run_id;
        return run;
    } catch (const json::exception& e) {
        throw Error("malformed-response", "run.json for " + run_id + ": " + e.what());
    }
}

json to_json(const PipelineRun& run) {
    json errors = json::object();
    for (const auto& [stage, e] : run.errors) errors[stage] = {{"error", e.code}, {"detail", e.detail}};
    json stats = json::object();
    for (const auto& [stage, s] : run.stats) stats[stage] = s;
    return json{{"run_id", run.run_id},
                {"status", run.status},
                {"input", run.input},
                {"stages", run.stages},
                {"stages_completed", run.stages_completed},
                {"artifacts", run.artifacts},
                {"errors", errors},
                {"stats", stats}};
}

PipelineRun run_from_json(const json& j) {
    PipelineRun run;
    run.run_id = j.at("run_id").get<std::string>();
    run.status = j.at("status").get<std::string>();
    run.input = j.at("input");
    run.stages = j.at("stages").get<std::vector<std::string>>();
    run.stages_completed = j.at("stages_completed").get<std::vector<std::string>>();
    run.artifacts = j.at("artifacts").get<std::map<std::string, std::vector<std::string>>>();
    for (const auto& [stage, e] : j.at("errors").items()) {
        run.errors[stage] = {e.at("error").get<std::string>(), e.value("detail", "")};
    }
    const auto stats = j.value("stats", json::object());
    for (const auto& [stage, s] : stats.items()) run.stats[stage] = s;
    return run;
}

}  // namespace litpipe::pipeline
