#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace litpipe::ingest {

namespace fs = std::filesystem;

enum class SectionLabel { introduction, methods, results, discussion, references, other };

std::string to_string(SectionLabel label);
SectionLabel section_label_from_string(std::string_view s);

/// Half-open byte range [start, end) of full_text. Offsets always fall on
/// UTF-8 codepoint boundaries.
struct Section {
    SectionLabel label = SectionLabel::other;
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Section&) const = default;
};

struct DocumentText {
    std::string doc_id;
    fs::path source_path;
    std::string full_text;
    std::vector<Section> sections;
};

struct Chunk {
    std::string doc_id;
    std::size_t chunk_id = 0;
    std::string text;
    std::size_t start = 0;
    std::size_t end = 0;
    SectionLabel section = SectionLabel::other;

    bool operator==(const Chunk&) const = default;
};

struct ChunkParams {
    std::size_t max_chunk_chars = 2000;
    std::size_t overlap_chars = 200;

    /// Throws Error("invalid-config").
    void validate() const;
};

/// Produces raw text for one PDF file.
class TextExtractor {
public:
    virtual ~TextExtractor() = default;
    virtual std::string extract(const fs::path& pdf_path) = 0;
};

/// Runs `<tool> <pdf_path>` and captures standard output. A nonzero exit
/// throws Error("extractor-failed") carrying the status and stderr.
class CommandExtractor final : public TextExtractor {
public:
    explicit CommandExtractor(fs::path tool) : tool_(std::move(tool)) {}
    std::string extract(const fs::path& pdf_path) override;

private:
    fs::path tool_;
};

/// Pre-baked text keyed by file name (e.g. "paper.pdf"). With a directory,
/// `<dir>/<stem>.txt` is read for `<stem>.pdf`.
class FixtureExtractor final : public TextExtractor {
public:
    explicit FixtureExtractor(std::map<std::string, std::string> texts) : texts_(std::move(texts)) {}
    explicit FixtureExtractor(fs::path dir) : dir_(std::move(dir)) {}
    std::string extract(const fs::path& pdf_path) override;

private:
    std::map<std::string, std::string> texts_;
    fs::path dir_;
};

/// In-process reader for simple PDFs (see pdf::extract_text).
class BuiltinExtractor final : public TextExtractor {
public:
    std::string extract(const fs::path& pdf_path) override;
};

/// NFC normalization plus CRLF/CR -> LF.
std::string normalize_text(std::string_view raw);

/// Heading-based segmentation; total over any input. Sections are
/// contiguous and cover [0, size) exactly (empty text -> one empty Other section).
std::vector<Section> segment_sections(std::string_view full_text);

/// Returns the label for a heading line, if the line is one.
std::optional<SectionLabel> heading_label(std::string_view line);

DocumentText extract_text(const fs::path& pdf_path, TextExtractor& extractor, std::string doc_id = {});

/// Greedy per-section windows of at most max_chunk_chars bytes, split at the
/// last sentence boundary in the window when one lies past the overlap, with
/// each next window starting overlap_chars before the previous end.
/// Whitespace-only windows are dropped.
std::vector<Chunk> chunk_document(const DocumentText& doc, const ChunkParams& params);

void to_json(nlohmann::json& j, const Section& s);
void to_json(nlohmann::json& j, const Chunk& c);

}  // namespace litpipe::ingest
