#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "litpipe/chat.hpp"
#include "litpipe/harvest.hpp"
#include "litpipe/ingest.hpp"
#include "litpipe/semantic.hpp"

namespace litpipe::review {

namespace fs = std::filesystem;

struct ReviewRow {
    std::string row_id;  // source path relative to the table root
    std::string group;   // parent folder relative to the root, "" for the root itself
    std::string apa_intext;
    std::string intro_summary;
    std::string methods_summary;
    std::string results_summary;
    fs::path source_path;

    bool operator==(const ReviewRow&) const = default;
};

struct QuerySet {
    std::string intro_q;
    std::string methods_q;
    std::string results_q;

    static QuerySet defaults();
    /// Throws Error("invalid-config") on a blank query.
    void validate() const;
};

struct Skipped {
    fs::path path;
    std::string reason;  // error code
    std::string detail;
};

struct TableParams {
    ingest::ChunkParams chunk;
    std::size_t k = 6;
    std::size_t workers = 4;
};

struct ReviewProviders {
    ingest::TextExtractor& extractor;
    semantic::EmbeddingProvider& embedder;
    chat::ChatProvider& chat;
    harvest::MetadataProvider* metadata = nullptr;
};

struct TableResult {
    std::vector<ReviewRow> rows;
    std::vector<Skipped> skipped;
};

extern const std::string kSummaryPreamble;

/// All `*.pdf` files under root, recursively, in sorted relative-path order.
std::vector<fs::path> find_pdfs(const fs::path& root);

/// In-text citation for a PDF: the sibling `.apa.txt`, then a metadata
/// lookup of the first DOI in the text, then `(<stem>, n.d.)`.
std::string resolve_intext(const fs::path& pdf, const std::string& full_text, harvest::MetadataProvider* metadata);

struct IngestedDoc {
    std::string row_id;
    std::string group;
    fs::path source_path;  // relative to the corpus root
    std::string apa_intext;
    chat::IndexedDocument indexed;
};

struct Corpus {
    fs::path root;
    std::vector<IngestedDoc> docs;  // sorted by row_id
    std::vector<Skipped> skipped;
};

/// Extracts, chunks and indexes every PDF under root with bounded
/// parallelism. Throws Error("no-pdfs-found"); per-PDF failures go to
/// `skipped`.
Corpus ingest_corpus(const fs::path& root, const ReviewProviders& providers, const TableParams& params = {});

/// Section-scoped summaries for each ingested document. Summary failures
/// move the document to `skipped`.
TableResult table_from_corpus(const Corpus& corpus, const QuerySet& queries, const ReviewProviders& providers,
                              const TableParams& params = {});

/// ingest_corpus followed by table_from_corpus.
TableResult build_table(const fs::path& root, const QuerySet& queries, const ReviewProviders& providers,
                        const TableParams& params = {});

enum class ExportExtras { none, spreadsheet };

/// One CSV per group plus manifest.json (and table.fods with a sheet per
/// group when requested). Returns the written paths.
std::vector<fs::path> export_table(const std::vector<ReviewRow>& rows, const fs::path& dest,
                                   ExportExtras extras = ExportExtras::none);

/// `<dest>/skipped.json`.
fs::path write_skipped(const std::vector<Skipped>& skipped, const fs::path& dest);

/// CSV file name for a group: `root` for "", otherwise the path with `/`
/// replaced by `_`.
std::string group_file_stem(const std::string& group);

struct Cluster {
    std::size_t cluster_id = 0;
    std::vector<std::string> member_rows;
    semantic::EmbeddingVector centroid;
};

/// Row text embedded for clustering.
std::string cluster_text(const ReviewRow& row);

/// Greedy seed rule over unit vectors listed in visit order: each unassigned
/// item seeds a cluster and claims its K-1 most similar unassigned items,
/// ties broken by ascending id.
std::vector<Cluster> greedy_clusters(const std::vector<std::string>& ids,
                                     const std::vector<semantic::EmbeddingVector>& unit_vectors, std::size_t K);

/// Rows are visited in (group, apa_intext, row_id) order.
std::vector<Cluster> cluster_rows(const std::vector<ReviewRow>& rows, std::size_t K,
                                  semantic::EmbeddingProvider& embedder);

/// Backslash-escapes Markdown specials and folds newlines into spaces.
std::string markdown_escape(std::string_view s);

std::string render_clusters_doc(const std::vector<Cluster>& clusters, const std::vector<ReviewRow>& rows);

enum class DocFormat { markdown, flat_odt };

/// Writes `dest` (or `dest/clusters.md|.fodt` for a directory).
fs::path export_clusters_doc(const std::vector<Cluster>& clusters, const std::vector<ReviewRow>& rows,
                             const fs::path& dest, DocFormat format = DocFormat::markdown);

struct SynthesisSection {
    std::size_t cluster_id = 0;
    std::string theme_title;
    std::vector<std::string> paragraphs;
    std::vector<std::string> warnings;
};

extern const std::string kSynthesisPreamble;

/// Parenthesized in-text citation markers, split on "; " so that
/// `(A, 2020; B, 2021)` yields `(A, 2020)` and `(B, 2021)`.
std::vector<std::string> citation_markers(std::string_view text);

chat::PromptBundle synthesis_prompt(const Cluster& cluster, const std::vector<ReviewRow>& rows);

/// Throws Error("provider-noncompliant") when no paragraph with a member
/// citation survives the retry and filtering.
std::vector<SynthesisSection> synthesize(const std::vector<Cluster>& clusters, const std::vector<ReviewRow>& rows,
                                         chat::ChatProvider& provider);

std::string render_synthesis(const std::vector<SynthesisSection>& sections);

void to_json(nlohmann::json& j, const ReviewRow& r);
void from_json(const nlohmann::json& j, ReviewRow& r);
void to_json(nlohmann::json& j, const QuerySet& q);
void from_json(const nlohmann::json& j, QuerySet& q);
void to_json(nlohmann::json& j, const Skipped& s);
void to_json(nlohmann::json& j, const Cluster& c);
void from_json(const nlohmann::json& j, Cluster& c);
void to_json(nlohmann::json& j, const SynthesisSection& s);

}  // namespace litpipe::review
