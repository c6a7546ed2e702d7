#include "litpipe/bibkit.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "litpipe/error.hpp"
#include "litpipe/text.hpp"

namespace litpipe {

namespace {

bool ends_with_terminal(std::string_view s) {
    return !s.empty() && (s.back() == '.' || s.back() == '?' || s.back() == '!');
}

std::string with_period(std::string_view s) {
    std::string out(text::trim(s));
    if (!ends_with_terminal(out)) out.push_back('.');
    return out;
}

std::string first_char_upper(std::string_view word) {
    if (word.empty()) return {};
    std::int32_t i = 0;
    UChar32 c = 0;
    U8_NEXT(word.data(), i, static_cast<std::int32_t>(word.size()), c);
    if (c < 0) return std::string(word.substr(0, 1));
    char buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, u_toupper(c), error);
    return error ? std::string(word.substr(0, static_cast<std::size_t>(i))) : std::string(buf, static_cast<std::size_t>(n));
}

// "Ann Marie" -> "A. M.", "Jean-Paul" -> "J.-P."
std::string initials(std::string_view given) {
    std::vector<std::string> parts;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        std::vector<std::string> pieces;
        for (const auto& piece : text::split(current, '-')) {
            if (!piece.empty()) pieces.push_back(first_char_upper(piece) + ".");
        }
        std::string joined;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (i) joined += "-";
            joined += pieces[i];
        }
        if (!joined.empty()) parts.push_back(joined);
        current.clear();
    };
    for (char c : given) {
        if (c == ' ' || c == '\t' || c == '.') {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " ";
        out += parts[i];
    }
    return out;
}

std::string format_author(const Author& a) {
    std::string out(text::trim(a.family));
    if (a.given) {
        auto init = initials(*a.given);
        if (!init.empty()) out += ", " + init;
    }
    return out;
}

std::string author_list(const std::vector<Author>& authors) {
    const auto n = authors.size();
    std::string out;
    if (n == 1) return format_author(authors[0]);
    if (n <= 20) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) out += (i + 1 == n) ? ", & " : ", ";
            out += format_author(authors[i]);
        }
        return out;
    }
    for (std::size_t i = 0; i < 19; ++i) {
        if (i > 0) out += ", ";
        out += format_author(authors[i]);
    }
    out += ", . . . " + format_author(authors.back());
    return out;
}

std::string year_text(const BibRecord& r) {
    return r.year ? std::to_string(*r.year) : std::string("n.d.");
}

std::string sanitize_component(std::string_view in) {
    std::string out;
    for (char c : in) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '_' || c == '-';
        const char mapped = ok ? c : '_';
        if (mapped == '_' && !out.empty() && out.back() == '_') continue;
        out.push_back(mapped);
    }
    while (!out.empty() && (out.front() == '_' || out.front() == '.')) out.erase(out.begin());
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

const std::regex& doi_shape() {
    static const std::regex re(R"(^10\.[0-9]+/\S+$)");
    return re;
}

}  // namespace

std::string to_string(RecordSource source) {
    switch (source) {
        case RecordSource::search_provider: return "search-provider";
        case RecordSource::metadata_provider: return "metadata-provider";
        case RecordSource::local_file: return "local-file";
    }
    return "local-file";
}

RecordSource record_source_from_string(std::string_view s) {
    if (s == "search-provider") return RecordSource::search_provider;
    if (s == "metadata-provider") return RecordSource::metadata_provider;
    if (s == "local-file") return RecordSource::local_file;
    throw Error("invalid-record", "unknown record source '" + std::string(s) + "'");
}

std::optional<std::string> normalize_doi(std::string_view raw) {
    std::string s = text::to_lower_ascii(text::trim(raw));
    for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
                                    "http://dx.doi.org/", "doi.org/", "doi:"}) {
        if (s.starts_with(prefix)) {
            s.erase(0, prefix.size());
            break;
        }
    }
    s = std::string(text::trim(s));
    if (!std::regex_match(s, doi_shape())) return std::nullopt;
    return s;
}

std::optional<std::string> find_doi(std::string_view body) {
    static const std::regex re(R"(10\.[0-9]{4,9}/[^\s"<>]+)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(body.begin(), body.end(), m, re)) return std::nullopt;
    std::string candidate = m.str();
    while (!candidate.empty() && std::string_view(".,;:)]}").find(candidate.back()) != std::string_view::npos) {
        candidate.pop_back();
    }
    return normalize_doi(candidate);
}

void validate(const BibRecord& r) {
    if (r.id.empty()) throw Error("invalid-record", "record id is empty");
    if (text::is_blank(r.title)) throw Error("invalid-record", "title is empty (record " + r.id + ")");
    if (r.year && (*r.year < 1400 || *r.year > 2200)) {
        throw Error("invalid-record", "year " + std::to_string(*r.year) + " out of range (record " + r.id + ")");
    }
    if (r.doi && !normalize_doi(*r.doi)) {
        throw Error("invalid-record", "malformed DOI '" + *r.doi + "' (record " + r.id + ")");
    }
    std::set<std::string> seen;
    for (const auto& url : r.pdf_urls) {
        if (!seen.insert(url).second) throw Error("invalid-record", "duplicate pdf url " + url);
    }
}

bool same_work(const BibRecord& a, const BibRecord& b) {
    const auto da = a.doi ? normalize_doi(*a.doi) : std::nullopt;
    const auto db = b.doi ? normalize_doi(*b.doi) : std::nullopt;
    if (da && db) return *da == *db;
    auto family = [](const BibRecord& r) {
        return r.authors.empty() ? std::string() : text::to_lower_ascii(text::trim(r.authors.front().family));
    };
    return text::to_lower_ascii(text::collapse_whitespace(a.title)) ==
               text::to_lower_ascii(text::collapse_whitespace(b.title)) &&
           a.year == b.year && family(a) == family(b);
}

std::vector<BibRecord> dedup_records(const std::vector<BibRecord>& records) {
    std::vector<BibRecord> out;
    for (const auto& r : records) {
        const bool dup = std::any_of(out.begin(), out.end(), [&](const BibRecord& k) { return same_work(k, r); });
        if (!dup) out.push_back(r);
    }
    return out;
}

std::string format_apa_reference(const BibRecord& r) {
    std::string out;
    const std::string year = "(" + year_text(r) + ").";
    if (r.authors.empty()) {
        out = with_period(r.title) + " " + year;
    } else {
        out = with_period(author_list(r.authors)) + " " + year + " " + with_period(r.title);
    }
    if (r.venue && !text::is_blank(*r.venue)) out += " " + with_period(*r.venue);
    if (r.doi) {
        if (auto doi = normalize_doi(*r.doi)) out += " https://doi.org/" + *doi;
    }
    return out;
}

std::string format_apa_intext(const BibRecord& r) {
    std::string who;
    const auto& a = r.authors;
    if (a.empty()) {
        who = std::string(text::trim(r.title));
    } else if (a.size() == 1) {
        who = std::string(text::trim(a[0].family));
    } else if (a.size() == 2) {
        who = std::string(text::trim(a[0].family)) + " & " + std::string(text::trim(a[1].family));
    } else {
        who = std::string(text::trim(a[0].family)) + " et al.";
    }
    return "(" + who + ", " + year_text(r) + ")";
}

std::optional<BibRecord> parse_apa_reference(std::string_view line) {
    static const std::regex year_re(R"( \(([0-9]{4})[a-z]?\)\.| \((n\.d\.)\)\.)");
    const std::string s(text::trim(line));
    std::smatch m;
    if (!std::regex_search(s, m, year_re)) return std::nullopt;
    BibRecord r;
    r.id = "apa";
    if (m[1].matched) r.year = std::stoi(m[1].str());
    const std::string head = s.substr(0, static_cast<std::size_t>(m.position(0)));

    static const std::regex initials_re(
        R"(^(?:[A-Z]|[\xC0-\xF7][\x80-\xBF]+)\.(?:-(?:[A-Z]|[\xC0-\xF7][\x80-\xBF]+)\.)*)"
        R"((?: (?:[A-Z]|[\xC0-\xF7][\x80-\xBF]+)\.(?:-(?:[A-Z]|[\xC0-\xF7][\x80-\xBF]+)\.)*)*$)");
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start <= head.size()) {
        auto pos = head.find(", ", start);
        if (pos == std::string::npos) pos = head.size();
        std::string tok = head.substr(start, pos - start);
        if (tok.starts_with("& ")) tok.erase(0, 2);
        if (tok.starts_with(". . . ")) tok.erase(0, 6);
        if (!tok.empty()) tokens.push_back(tok);
        start = pos + 2;
    }
    if (tokens.empty()) return std::nullopt;
    const bool has_initials = std::any_of(tokens.begin(), tokens.end(),
                                          [](const std::string& t) { return std::regex_match(t, initials_re); });
    const bool authorish = has_initials || head.find(" & ") != std::string::npos ||
                           head.find(". . .") != std::string::npos ||
                           (tokens.size() == 1 && head.find(' ') == std::string::npos);
    if (!authorish) {
        r.title = head.substr(0, head.size() - (head.ends_with('.') ? 1 : 0));
        return r;
    }
    // The list's closing period belongs to the last token unless that token is initials.
    if (tokens.back().ends_with('.') && (tokens.size() == 1 || !std::regex_match(tokens.back(), initials_re))) {
        tokens.back().pop_back();
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        Author a;
        a.family = tokens[i];
        if (i + 1 < tokens.size() && std::regex_match(tokens[i + 1], initials_re)) {
            a.given = tokens[i + 1];
            ++i;
        }
        r.authors.push_back(std::move(a));
    }
    r.title = "untitled";
    return r;
}

std::string safe_filename(const BibRecord& r, std::size_t max_len) {
    max_len = std::max<std::size_t>(max_len, 16);
    std::string family = r.authors.empty() ? std::string() : sanitize_component(r.authors.front().family);
    if (family.empty()) family = "Anon";
    std::string title = sanitize_component(r.title);
    if (title.empty()) title = "untitled";
    std::string out = family + "_" + (r.year ? std::to_string(*r.year) : std::string("nd")) + "_" + title;
    out = sanitize_component(out);
    if (out.size() > max_len) out.resize(max_len);
    while (!out.empty() && (out.back() == '_' || out.back() == '.' || out.back() == '-')) out.pop_back();
    if (out.empty() || out == "." || out == "..") out = "untitled";
    return out;
}

std::string collision_variant(const std::string& stem, int n) {
    return n <= 1 ? stem : stem + "-" + std::to_string(n);
}

void to_json(nlohmann::json& j, const Author& a) {
    j = nlohmann::json{{"family", a.family}, {"given", a.given ? nlohmann::json(*a.given) : nlohmann::json()}};
}

void from_json(const nlohmann::json& j, Author& a) {
    a.family = j.at("family").get<std::string>();
    if (j.contains("given") && !j["given"].is_null()) a.given = j["given"].get<std::string>();
    else a.given.reset();
}

namespace {
template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
}
template <typename T>
std::optional<T> opt_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}
}  // namespace

void to_json(nlohmann::json& j, const BibRecord& r) {
    j = nlohmann::json{{"id", r.id},
                       {"doi", opt(r.doi)},
                       {"title", r.title},
                       {"authors", r.authors},
                       {"year", opt(r.year)},
                       {"venue", opt(r.venue)},
                       {"abstract", opt(r.abstract)},
                       {"pdf_urls", r.pdf_urls},
                       {"source", to_string(r.source)}};
}

void from_json(const nlohmann::json& j, BibRecord& r) {
    try {
        r.id = j.at("id").get<std::string>();
        r.doi = opt_from<std::string>(j, "doi");
        r.title = j.at("title").get<std::string>();
        r.authors = j.value("authors", std::vector<Author>{});
        r.year = opt_from<int>(j, "year");
        r.venue = opt_from<std::string>(j, "venue");
        r.abstract = opt_from<std::string>(j, "abstract");
        r.pdf_urls = j.value("pdf_urls", std::vector<std::string>{});
        r.source = record_source_from_string(j.value("source", std::string("local-file")));
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed-response", std::string("bad BibRecord JSON: ") + e.what());
    }
}

}  // namespace litpipe
