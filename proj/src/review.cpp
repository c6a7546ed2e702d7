#include "litpipe/review.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "litpipe/bibkit.hpp"
#include "litpipe/csv.hpp"
#include "litpipe/error.hpp"
#include "litpipe/office.hpp"
#include "litpipe/text.hpp"

namespace litpipe::review {

using nlohmann::json;
using semantic::EmbeddingVector;

const std::string kSummaryPreamble =
    "Summarize the requested aspect of one research article using only the context passages provided. "
    "Do not use outside knowledge. If the context does not cover it, reply exactly: not found in the document";

const std::string kSynthesisPreamble =
    "You write one section of a literature review from the grouped works below. Start with a line "
    "'# <theme title>', then write paragraphs separated by blank lines that distill, compare, and contrast "
    "the works. Cite every claim with the exact in-text citations given as context keys, and cite no other "
    "sources.";

QuerySet QuerySet::defaults() {
    return {"Summarize the background, motivation, and aims of this article.",
            "Summarize the methods and experimental design.",
            "Summarize the main results and findings, with key quantities."};
}

void QuerySet::validate() const {
    if (text::is_blank(intro_q) || text::is_blank(methods_q) || text::is_blank(results_q)) {
        throw Error("invalid-config", "table queries must be nonempty");
    }
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_pdf_name(const fs::path& p) { return text::to_lower_ascii(p.extension().string()) == ".pdf"; }

std::string summarize(const chat::IndexedDocument& doc, const std::string& query, ingest::SectionLabel label,
                      const ReviewProviders& providers, std::size_t k) {
    chat::PromptBundle bundle;
    bundle.purpose = chat::Purpose::summary;
    bundle.system_preamble = kSummaryPreamble;
    bundle.question = query;
    if (doc.index.size() > 0) {
        std::set<std::size_t> in_section;
        for (const auto& c : doc.chunks) {
            if (c.section == label) in_section.insert(c.chunk_id);
        }
        std::function<bool(const semantic::EntryKey&)> filter;
        if (!in_section.empty()) {
            filter = [&](const semantic::EntryKey& key) {
                return in_section.count(static_cast<std::size_t>(*key.sub)) > 0;
            };
        }
        const auto q = semantic::embed_texts({query}, providers.embedder).front();
        for (const auto& hit : doc.index.search_topk(q, k, filter)) {
            const auto id = static_cast<std::size_t>(*hit.key.sub);
            const auto it = std::find_if(doc.chunks.begin(), doc.chunks.end(),
                                         [&](const ingest::Chunk& c) { return c.chunk_id == id; });
            bundle.context_blocks.push_back({hit.key.str(), it->text, it->start});
        }
    }
    return std::string(text::trim(providers.chat.complete(bundle)));
}

}  // namespace

std::vector<fs::path> find_pdfs(const fs::path& root) {
    std::vector<fs::path> out;
    for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file() && is_pdf_name(it->path())) out.push_back(it->path());
    }
    std::sort(out.begin(), out.end(), [&](const fs::path& a, const fs::path& b) {
        return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
    });
    return out;
}

std::string resolve_intext(const fs::path& pdf, const std::string& full_text, harvest::MetadataProvider* metadata) {
    auto apa = pdf;
    apa.replace_extension(".apa.txt");
    std::error_code ec;
    if (fs::is_regular_file(apa, ec)) {
        const auto line = std::string(text::trim(text::split(read_file(apa), '\n').front()));
        if (auto rec = parse_apa_reference(line)) return format_apa_intext(*rec);
    }
    if (metadata) {
        if (auto doi = find_doi(full_text)) {
            try {
                return format_apa_intext(metadata->lookup(*doi));
            } catch (const Error&) {
            }
        }
    }
    return "(" + pdf.stem().string() + ", n.d.)";
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
    };
    const auto threads = std::max<std::size_t>(1, std::min(workers, n));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
}

void validate_params(const TableParams& params) {
    params.chunk.validate();
    if (params.k == 0) throw Error("invalid-config", "k must be at least 1");
}

}  // namespace

Corpus ingest_corpus(const fs::path& root, const ReviewProviders& providers, const TableParams& params) {
    validate_params(params);
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw Error("no-pdfs-found", root.string() + " is not a directory");
    const auto pdfs = find_pdfs(root);
    if (pdfs.empty()) throw Error("no-pdfs-found", "no PDF files under " + root.string());

    std::vector<std::optional<IngestedDoc>> docs(pdfs.size());
    std::vector<std::optional<Skipped>> skipped(pdfs.size());
    parallel_for(pdfs.size(), params.workers, [&](std::size_t i) {
        const auto& pdf = pdfs[i];
        const auto rel = pdf.lexically_relative(root);
        try {
            auto doc = ingest::extract_text(pdf, providers.extractor, rel.generic_string());
            auto intext = resolve_intext(pdf, doc.full_text, providers.metadata);
            docs[i] = IngestedDoc{rel.generic_string(), rel.parent_path().generic_string(), rel, std::move(intext),
                                  chat::index_document(std::move(doc), params.chunk, providers.embedder)};
        } catch (const Error& e) {
            skipped[i] = Skipped{rel, e.code(), e.detail()};
        } catch (const std::exception& e) {
            skipped[i] = Skipped{rel, "internal", e.what()};
        }
    });
    Corpus corpus;
    corpus.root = root;
    for (auto& d : docs) {
        if (d) corpus.docs.push_back(std::move(*d));
    }
    for (auto& s : skipped) {
        if (s) corpus.skipped.push_back(std::move(*s));
    }
    return corpus;
}

TableResult table_from_corpus(const Corpus& corpus, const QuerySet& queries, const ReviewProviders& providers,
                              const TableParams& params) {
    queries.validate();
    validate_params(params);
    std::vector<std::optional<ReviewRow>> rows(corpus.docs.size());
    std::vector<std::optional<Skipped>> skipped(corpus.docs.size());
    parallel_for(corpus.docs.size(), params.workers, [&](std::size_t i) {
        const auto& d = corpus.docs[i];
        try {
            ReviewRow row;
            row.row_id = d.row_id;
            row.group = d.group;
            row.source_path = d.source_path;
            row.apa_intext = d.apa_intext;
            row.intro_summary =
                summarize(d.indexed, queries.intro_q, ingest::SectionLabel::introduction, providers, params.k);
            row.methods_summary =
                summarize(d.indexed, queries.methods_q, ingest::SectionLabel::methods, providers, params.k);
            row.results_summary =
                summarize(d.indexed, queries.results_q, ingest::SectionLabel::results, providers, params.k);
            rows[i] = std::move(row);
        } catch (const Error& e) {
            skipped[i] = Skipped{d.source_path, e.code(), e.detail()};
        } catch (const std::exception& e) {
            skipped[i] = Skipped{d.source_path, "internal", e.what()};
        }
    });
    TableResult result;
    result.skipped = corpus.skipped;
    for (auto& r : rows) {
        if (r) result.rows.push_back(std::move(*r));
    }
    for (auto& s : skipped) {
        if (s) result.skipped.push_back(std::move(*s));
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const ReviewRow& a, const ReviewRow& b) {
        return std::tie(a.group, a.apa_intext, a.row_id) < std::tie(b.group, b.apa_intext, b.row_id);
    });
    std::sort(result.skipped.begin(), result.skipped.end(),
              [](const Skipped& a, const Skipped& b) { return a.path < b.path; });
    return result;
}

TableResult build_table(const fs::path& root, const QuerySet& queries, const ReviewProviders& providers,
                        const TableParams& params) {
    queries.validate();
    return table_from_corpus(ingest_corpus(root, providers, params), queries, providers, params);
}

std::string group_file_stem(const std::string& group) {
    if (group.empty()) return "root";
    std::string out = group;
    std::replace(out.begin(), out.end(), '/', '_');
    return out;
}

namespace {

void ensure_dir(const fs::path& dest) {
    std::error_code ec;
    fs::create_directories(dest, ec);
    if (!fs::is_directory(dest, ec)) throw Error("dest-unwritable", "cannot create directory " + dest.string());
}

std::map<std::string, std::vector<const ReviewRow*>> by_group(const std::vector<ReviewRow>& rows) {
    std::map<std::string, std::vector<const ReviewRow*>> groups;
    for (const auto& r : rows) groups[r.group].push_back(&r);
    return groups;
}

const std::vector<std::string> kTableHeader = {"citation", "introduction", "methods", "results", "source"};

}  // namespace

std::vector<fs::path> export_table(const std::vector<ReviewRow>& rows, const fs::path& dest, ExportExtras extras) {
    if (rows.empty()) throw Error("empty-rows", "no rows to export");
    ensure_dir(dest);
    const auto groups = by_group(rows);
    std::vector<fs::path> written;
    std::set<std::string> used;
    json manifest_groups = json::object();
    std::vector<office::Sheet> sheets;
    for (const auto& [group, members] : groups) {
        auto stem = group_file_stem(group);
        for (int n = 2; used.count(stem); ++n) stem = collision_variant(group_file_stem(group), n);
        used.insert(stem);
        std::vector<csv::Row> table{kTableHeader};
        for (const auto* r : members) {
            table.push_back({r->apa_intext, r->intro_summary, r->methods_summary, r->results_summary,
                             r->source_path.generic_string()});
        }
        const auto path = dest / (stem + ".csv");
        office::write_file(path, csv::write(table));
        written.push_back(path);
        manifest_groups[group] = stem + ".csv";
        sheets.push_back({stem, table});
    }
    const auto manifest = dest / "manifest.json";
    office::write_file(manifest, json{{"groups", manifest_groups}, {"row_count", rows.size()}}.dump(2) + "\n");
    written.push_back(manifest);
    if (extras == ExportExtras::spreadsheet) {
        const auto book = dest / "table.fods";
        office::write_file(book, office::flat_ods(sheets));
        written.push_back(book);
    }
    return written;
}

fs::path write_skipped(const std::vector<Skipped>& skipped, const fs::path& dest) {
    ensure_dir(dest);
    const auto path = dest / "skipped.json";
    office::write_file(path, json(skipped).dump(2) + "\n");
    return path;
}

std::string cluster_text(const ReviewRow& row) {
    return row.apa_intext + "\n" + row.intro_summary + "\n" + row.methods_summary + "\n" + row.results_summary;
}

std::vector<Cluster> greedy_clusters(const std::vector<std::string>& ids, const std::vector<EmbeddingVector>& vectors,
                                     std::size_t K) {
    if (K == 0) throw Error("invalid-argument", "K must be at least 1");
    if (ids.size() != vectors.size()) throw Error("invalid-argument", "ids and vectors differ in length");
    const auto n = ids.size();
    std::vector<bool> assigned(n, false);
    std::vector<Cluster> out;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (assigned[seed]) continue;
        assigned[seed] = true;
        std::vector<std::pair<double, std::size_t>> candidates;
        for (std::size_t j = 0; j < n; ++j) {
            if (!assigned[j]) candidates.emplace_back(semantic::dot(vectors[seed], vectors[j]), j);
        }
        const auto take = std::min(K - 1, candidates.size());
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                          candidates.end(), [&](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return ids[a.second] < ids[b.second];
                          });
        Cluster c;
        c.cluster_id = out.size();
        std::vector<std::size_t> members{seed};
        for (std::size_t t = 0; t < take; ++t) members.push_back(candidates[t].second);
        EmbeddingVector mean;
        mean.values.assign(vectors[seed].dim(), 0.0);
        for (auto m : members) {
            assigned[m] = true;
            c.member_rows.push_back(ids[m]);
            for (std::size_t d = 0; d < mean.dim(); ++d) mean.values[d] += vectors[m].values[d];
        }
        for (auto& v : mean.values) v /= static_cast<double>(members.size());
        try {
            c.centroid = semantic::normalized(mean);
        } catch (const Error&) {
            c.centroid = vectors[seed];
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Cluster> cluster_rows(const std::vector<ReviewRow>& rows, std::size_t K,
                                  semantic::EmbeddingProvider& embedder) {
    if (K == 0) throw Error("invalid-argument", "K must be at least 1");
    if (rows.empty()) throw Error("empty-rows", "no rows to cluster");
    std::vector<const ReviewRow*> order;
    for (const auto& r : rows) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](const ReviewRow* a, const ReviewRow* b) {
        return std::tie(a->group, a->apa_intext, a->row_id) < std::tie(b->group, b->apa_intext, b->row_id);
    });
    std::vector<std::string> ids;
    std::vector<std::string> texts;
    std::set<std::string> seen;
    for (const auto* r : order) {
        if (!seen.insert(r->row_id).second) throw Error("duplicate-key", "duplicate row_id " + r->row_id);
        ids.push_back(r->row_id);
        texts.push_back(cluster_text(*r));
    }
    return greedy_clusters(ids, semantic::embed_texts(texts, embedder), K);
}

std::string markdown_escape(std::string_view s) {
    static const std::string specials = "\\`*_[]<>#|~";
    std::string out;
    for (char c : s) {
        if (c == '\r') continue;
        if (c == '\n') {
            out += ' ';
            continue;
        }
        if (specials.find(c) != std::string::npos) out += '\\';
        out += c;
    }
    return out;
}

namespace {

std::map<std::string, const ReviewRow*> row_index(const std::vector<Cluster>& clusters,
                                                  const std::vector<ReviewRow>& rows) {
    std::map<std::string, const ReviewRow*> index;
    for (const auto& r : rows) index[r.row_id] = &r;
    std::set<std::string> covered;
    for (const auto& c : clusters) {
        for (const auto& id : c.member_rows) {
            if (!index.count(id)) throw Error("invalid-argument", "cluster member " + id + " is not a row");
            if (!covered.insert(id).second) throw Error("invalid-argument", "row " + id + " is in two clusters");
        }
    }
    if (covered.size() != index.size()) throw Error("invalid-argument", "clusters do not cover every row");
    return index;
}

std::string row_line(const ReviewRow& r) {
    return "**" + markdown_escape(r.apa_intext) + "** — Introduction: " + markdown_escape(r.intro_summary) +
           " Methods: " + markdown_escape(r.methods_summary) + " Results: " + markdown_escape(r.results_summary);
}

}  // namespace

std::string render_clusters_doc(const std::vector<Cluster>& clusters, const std::vector<ReviewRow>& rows) {
    const auto index = row_index(clusters, rows);
    std::string out = "# Literature Clusters\n";
    for (const auto& c : clusters) {
        out += "\n## Cluster " + std::to_string(c.cluster_id) + "\n";
        for (const auto& id : c.member_rows) out += "\n" + row_line(*index.at(id)) + "\n";
    }
    return out;
}

fs::path export_clusters_doc(const std::vector<Cluster>& clusters, const std::vector<ReviewRow>& rows,
                             const fs::path& dest, DocFormat format) {
    auto path = dest;
    std::error_code ec;
    if (fs::is_directory(dest, ec)) path = dest / (format == DocFormat::markdown ? "clusters.md" : "clusters.fodt");
    if (format == DocFormat::markdown) {
        office::write_file(path, render_clusters_doc(clusters, rows));
        return path;
    }
    const auto index = row_index(clusters, rows);
    std::vector<office::Paragraph> paras{{office::Paragraph::Kind::title, "Literature Clusters"}};
    for (const auto& c : clusters) {
        paras.push_back({office::Paragraph::Kind::heading, "Cluster " + std::to_string(c.cluster_id)});
        for (const auto& id : c.member_rows) {
            const auto& r = *index.at(id);
            paras.push_back({office::Paragraph::Kind::body, r.apa_intext + " — Introduction: " + r.intro_summary +
                                                                " Methods: " + r.methods_summary +
                                                                " Results: " + r.results_summary});
        }
    }
    office::write_file(path, office::flat_odt(paras));
    return path;
}

std::vector<std::string> citation_markers(std::string_view text) {
    static const std::regex group(R"(\(([^()]*?(?:[0-9]{4}[a-z]?|n\.d\.))\))");
    std::vector<std::string> out;
    const std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), group); it != std::sregex_iterator(); ++it) {
        const auto inner = (*it)[1].str();
        std::size_t start = 0;
        while (true) {
            const auto sep = inner.find("; ", start);
            out.push_back("(" + inner.substr(start, sep == std::string::npos ? std::string::npos : sep - start) + ")");
            if (sep == std::string::npos) break;
            start = sep + 2;
        }
    }
    return out;
}

chat::PromptBundle synthesis_prompt(const Cluster& cluster, const std::vector<ReviewRow>& rows) {
    std::map<std::string, const ReviewRow*> index;
    for (const auto& r : rows) index[r.row_id] = &r;
    chat::PromptBundle bundle;
    bundle.purpose = chat::Purpose::synthesis;
    bundle.system_preamble = kSynthesisPreamble;
    std::string allowed;
    for (std::size_t i = 0; i < cluster.member_rows.size(); ++i) {
        const auto it = index.find(cluster.member_rows[i]);
        if (it == index.end()) throw Error("invalid-argument", "cluster member " + cluster.member_rows[i] + " is not a row");
        const auto& r = *it->second;
        bundle.context_blocks.push_back({r.apa_intext,
                                         "Introduction: " + r.intro_summary + "\nMethods: " + r.methods_summary +
                                             "\nResults: " + r.results_summary,
                                         i});
        allowed += (allowed.empty() ? "" : " ") + r.apa_intext;
    }
    bundle.question = "Compare and contrast these works, citing every claim with one of: " + allowed;
    return bundle;
}

namespace {

struct ParsedResponse {
    std::string title;
    std::vector<std::string> paragraphs;
};

ParsedResponse parse_response(const std::string& response) {
    ParsedResponse out;
    std::string current;
    auto flush = [&] {
        auto t = std::string(text::trim(current));
        if (!t.empty()) out.paragraphs.push_back(text::collapse_whitespace(t));
        current.clear();
    };
    for (const auto& raw : text::split(response, '\n')) {
        const auto line = text::trim(raw);
        if (line.empty()) {
            flush();
        } else if (line.starts_with("#")) {
            flush();
            if (out.title.empty()) out.title = std::string(text::trim(line.substr(line.find_first_not_of('#'))));
        } else {
            current += std::string(line) + " ";
        }
    }
    flush();
    return out;
}

bool needs_retry(const ParsedResponse& parsed, const std::set<std::string>& allowed) {
    bool any_valid = false;
    for (const auto& p : parsed.paragraphs) {
        for (const auto& m : citation_markers(p)) {
            if (!allowed.count(m)) return true;
            any_valid = true;
        }
    }
    return !any_valid;
}

std::string strip_foreign(const std::string& paragraph, const std::set<std::string>& allowed,
                          std::vector<std::string>& warnings) {
    static const std::regex group(R"(\s?\(([^()]*?(?:[0-9]{4}[a-z]?|n\.d\.))\))");
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(paragraph.begin(), paragraph.end(), group); it != std::sregex_iterator();
         ++it) {
        const auto& m = *it;
        out += paragraph.substr(last, static_cast<std::size_t>(m.position()) - last);
        last = static_cast<std::size_t>(m.position() + m.length());
        std::vector<std::string> kept;
        for (const auto& marker : citation_markers(m.str())) {
            if (allowed.count(marker)) {
                kept.push_back(marker.substr(1, marker.size() - 2));
            } else {
                warnings.push_back("stripped citation not in cluster: " + marker);
            }
        }
        if (kept.empty()) continue;
        std::string joined;
        for (const auto& k : kept) joined += (joined.empty() ? "" : "; ") + k;
        out += (m.str().front() == '(' ? "(" : " (") + joined + ")";
    }
    out += paragraph.substr(last);
    return out;
}

}  // namespace

std::vector<SynthesisSection> synthesize(const std::vector<Cluster>& clusters, const std::vector<ReviewRow>& rows,
                                         chat::ChatProvider& provider) {
    row_index(clusters, rows);
    std::map<std::string, const ReviewRow*> index;
    for (const auto& r : rows) index[r.row_id] = &r;
    std::vector<SynthesisSection> out;
    for (const auto& cluster : clusters) {
        std::set<std::string> allowed;
        for (const auto& id : cluster.member_rows) allowed.insert(index.at(id)->apa_intext);
        auto bundle = synthesis_prompt(cluster, rows);
        SynthesisSection section;
        section.cluster_id = cluster.cluster_id;
        auto parsed = parse_response(provider.complete(bundle));
        if (needs_retry(parsed, allowed)) {
            section.warnings.push_back("response cited sources outside the cluster or none; asked again");
            bundle.question += "\nYour previous answer cited sources that are not in this group or cited none. "
                               "Use only the listed citations.";
            parsed = parse_response(provider.complete(bundle));
        }
        for (const auto& p : parsed.paragraphs) {
            auto cleaned = text::collapse_whitespace(strip_foreign(p, allowed, section.warnings));
            if (citation_markers(cleaned).empty()) {
                section.warnings.push_back("dropped paragraph without a cluster citation");
                continue;
            }
            for (const auto& sentence : text::split_sentences(cleaned)) {
                if (citation_markers(sentence).empty()) {
                    section.warnings.push_back("sentence without citation: " + sentence);
                }
            }
            section.paragraphs.push_back(std::move(cleaned));
        }
        if (section.paragraphs.empty()) {
            throw Error("provider-noncompliant",
                        "no paragraph with a valid citation for cluster " + std::to_string(cluster.cluster_id));
        }
        section.theme_title = parsed.title.empty() ? "Cluster " + std::to_string(cluster.cluster_id) : parsed.title;
        out.push_back(std::move(section));
    }
    return out;
}

std::string render_synthesis(const std::vector<SynthesisSection>& sections) {
    std::string out = "# Literature Synthesis\n";
    for (const auto& s : sections) {
        out += "\n## " + s.theme_title + "\n";
        for (const auto& p : s.paragraphs) out += "\n" + p + "\n";
    }
    return out;
}

void to_json(json& j, const ReviewRow& r) {
    j = json{{"row_id", r.row_id},
             {"group", r.group},
             {"apa_intext", r.apa_intext},
             {"intro_summary", r.intro_summary},
             {"methods_summary", r.methods_summary},
             {"results_summary", r.results_summary},
             {"source_path", r.source_path.generic_string()}};
}

void from_json(const json& j, ReviewRow& r) {
    try {
        r.row_id = j.at("row_id").get<std::string>();
        r.group = j.at("group").get<std::string>();
        r.apa_intext = j.at("apa_intext").get<std::string>();
        r.intro_summary = j.at("intro_summary").get<std::string>();
        r.methods_summary = j.at("methods_summary").get<std::string>();
        r.results_summary = j.at("results_summary").get<std::string>();
        r.source_path = j.at("source_path").get<std::string>();
    } catch (const json::exception& e) {
        throw Error("invalid-record", std::string("review row: ") + e.what());
    }
}

void to_json(json& j, const QuerySet& q) {
    j = json{{"intro_q", q.intro_q}, {"methods_q", q.methods_q}, {"results_q", q.results_q}};
}

void from_json(const json& j, QuerySet& q) {
    const auto d = QuerySet::defaults();
    q.intro_q = j.value("intro_q", d.intro_q);
    q.methods_q = j.value("methods_q", d.methods_q);
    q.results_q = j.value("results_q", d.results_q);
}

void to_json(json& j, const Skipped& s) {
    j = json{{"path", s.path.generic_string()}, {"reason", s.reason}, {"detail", s.detail}};
}

void to_json(json& j, const Cluster& c) {
    j = json{{"cluster_id", c.cluster_id}, {"member_rows", c.member_rows}, {"centroid", c.centroid.values}};
}

void from_json(const json& j, Cluster& c) {
    try {
        c.cluster_id = j.at("cluster_id").get<std::size_t>();
        c.member_rows = j.at("member_rows").get<std::vector<std::string>>();
        c.centroid.values = j.value("centroid", std::vector<double>{});
    } catch (const json::exception& e) {
        throw Error("invalid-record", std::string("cluster: ") + e.what());
    }
}

void to_json(json& j, const SynthesisSection& s) {
    j = json{{"cluster_id", s.cluster_id},
             {"theme_title", s.theme_title},
             {"paragraphs", s.paragraphs},
             {"warnings", s.warnings}};
}

}  // namespace litpipe::review
