#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace litpipe {

struct Author {
    std::string family;
    std::optional<std::string> given;

    bool operator==(const Author&) const = default;
};

enum class RecordSource { search_provider, metadata_provider, local_file };

std::string to_string(RecordSource source);
RecordSource record_source_from_string(std::string_view text);

/// Bibliographic metadata for one article.
struct BibRecord {
    std::string id;
    std::optional<std::string> doi;
    std::string title;
    std::vector<Author> authors;
    std::optional<int> year;
    std::optional<std::string> venue;
    std::optional<std::string> abstract;
    std::vector<std::string> pdf_urls;
    RecordSource source = RecordSource::local_file;

    bool operator==(const BibRecord&) const = default;
};

/// Throws Error("invalid-record") if any record invariant is violated.
void validate(const BibRecord& record);

/// Lowercases, strips `https://doi.org/` (and the `http://`, `doi.org/`,
/// `doi:` variants) and checks the `10.<digits>/<suffix>` shape.
std::optional<std::string> normalize_doi(std::string_view raw);

/// First DOI-shaped substring of free text, normalized.
std::optional<std::string> find_doi(std::string_view text);

/// Duplicate identity: normalized DOIs when both records carry one,
/// otherwise (lowercased title, year, first-author family).
bool same_work(const BibRecord& a, const BibRecord& b);

/// Drops later duplicates (per same_work), keeping first occurrences in order.
std::vector<BibRecord> dedup_records(const std::vector<BibRecord>& records);

/// APA 7th edition reference entry, one line.
std::string format_apa_reference(const BibRecord& record);

/// APA 7th edition parenthetical in-text citation, e.g. `(Smith et al., 2020)`.
std::string format_apa_intext(const BibRecord& record);

/// Recovers the author families and year from a reference line produced by
/// format_apa_reference. Only those fields (and the title, for author-less
/// records) are populated.
std::optional<BibRecord> parse_apa_reference(std::string_view line);

/// `Family_Year_Title-slug` restricted to `[A-Za-z0-9._-]`, at most max_len
/// characters. max_len must be at least 16.
std::string safe_filename(const BibRecord& record, std::size_t max_len = 120);

/// `stem` for n <= 1, `stem-n` otherwise.
std::string collision_variant(const std::string& stem, int n);

void to_json(nlohmann::json& j, const Author& a);
void from_json(const nlohmann::json& j, Author& a);
void to_json(nlohmann::json& j, const BibRecord& r);
void from_json(const nlohmann::json& j, BibRecord& r);

}  // namespace litpipe
