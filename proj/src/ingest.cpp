#include "litpipe/ingest.hpp"

#include <array>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "litpipe/error.hpp"
#include "litpipe/pdf.hpp"
#include "litpipe/text.hpp"

namespace litpipe::ingest {

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct HeadingWord {
    const char* text;
    SectionLabel label;
};

constexpr std::array<HeadingWord, 12> kHeadings{{
    {"introduction", SectionLabel::introduction},
    {"background", SectionLabel::introduction},
    {"methods", SectionLabel::methods},
    {"materials and methods", SectionLabel::methods},
    {"methodology", SectionLabel::methods},
    {"results", SectionLabel::results},
    {"findings", SectionLabel::results},
    {"discussion", SectionLabel::discussion},
    {"conclusion", SectionLabel::discussion},
    {"conclusions", SectionLabel::discussion},
    {"references", SectionLabel::references},
    {"bibliography", SectionLabel::references},
}};

}  // namespace

std::string to_string(SectionLabel label) {
    switch (label) {
        case SectionLabel::introduction: return "Introduction";
        case SectionLabel::methods: return "Methods";
        case SectionLabel::results: return "Results";
        case SectionLabel::discussion: return "Discussion";
        case SectionLabel::references: return "References";
        case SectionLabel::other: return "Other";
    }
    return "Other";
}

SectionLabel section_label_from_string(std::string_view s) {
    for (auto l : {SectionLabel::introduction, SectionLabel::methods, SectionLabel::results, SectionLabel::discussion,
                   SectionLabel::references, SectionLabel::other}) {
        if (text::to_lower_ascii(to_string(l)) == text::to_lower_ascii(s)) return l;
    }
    throw Error("invalid-argument", "unknown section label '" + std::string(s) + "'");
}

void ChunkParams::validate() const {
    if (max_chunk_chars == 0) throw Error("invalid-config", "max_chunk_chars must be positive");
    if (overlap_chars >= max_chunk_chars) {
        throw Error("invalid-config", "overlap_chars (" + std::to_string(overlap_chars) +
                                          ") must be smaller than max_chunk_chars (" +
                                          std::to_string(max_chunk_chars) + ")");
    }
}

std::string CommandExtractor::extract(const fs::path& pdf_path) {
    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) throw Error("extractor-failed", "pipe() failed");
    const std::string tool = tool_.string();
    const std::string arg = pdf_path.string();
    const pid_t pid = fork();
    if (pid < 0) throw Error("extractor-failed", "fork() failed");
    if (pid == 0) {
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(err_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[1]);
        execlp(tool.c_str(), tool.c_str(), arg.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(out_pipe[1]);
    close(err_pipe[1]);
    std::string out;
    std::string err;
    pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    int open_fds = 2;
    char buf[8192];
    while (open_fds > 0) {
        if (poll(fds, 2, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            const auto n = read(fds[i].fd, buf, sizeof buf);
            if (n <= 0) {
                close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
            } else {
                (i == 0 ? out : err).append(buf, static_cast<std::size_t>(n));
            }
        }
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        throw Error("extractor-failed", tool + " exited with status " + std::to_string(code) +
                                            (err.empty() ? std::string() : ": " + std::string(text::trim(err))));
    }
    return out;
}

std::string FixtureExtractor::extract(const fs::path& pdf_path) {
    const auto name = pdf_path.filename().string();
    if (auto it = texts_.find(name); it != texts_.end()) return it->second;
    if (!dir_.empty()) {
        const auto candidate = dir_ / (pdf_path.stem().string() + ".txt");
        if (fs::is_regular_file(candidate)) return read_file(candidate);
    }
    throw Error("extractor-failed", "no fixture text for " + name);
}

std::string BuiltinExtractor::extract(const fs::path& pdf_path) { return pdf::extract_text(read_file(pdf_path)); }

std::string normalize_text(std::string_view raw) {
    std::string lf;
    lf.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\r') {
            lf.push_back('\n');
            if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
        } else {
            lf.push_back(raw[i]);
        }
    }
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("extractor-failed", "ICU NFC normalizer unavailable");
    const auto src = icu::UnicodeString::fromUTF8(lf);
    if (nfc->isNormalized(src, status) && U_SUCCESS(status)) {
        std::string roundtrip;
        src.toUTF8String(roundtrip);
        if (roundtrip == lf) return lf;
    }
    status = U_ZERO_ERROR;
    const auto normalized = nfc->normalize(src, status);
    if (U_FAILURE(status)) throw Error("extractor-failed", "NFC normalization failed");
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::optional<SectionLabel> heading_label(std::string_view line) {
    if (line.size() > 60) return std::nullopt;
    std::string s(text::trim(line));
    if (s.empty()) return std::nullopt;
    static const std::regex numbering(R"(^(?:[0-9]+(?:\.[0-9]+)*\.?|[IVXLCivxlc]+\.|[IVXLC]+)\s+)");
    s = std::regex_replace(s, numbering, "", std::regex_constants::format_first_only);
    std::string alpha;
    for (char c : s) {
        const bool letter = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
        alpha.push_back(letter ? c : ' ');
    }
    alpha = text::to_lower_ascii(text::collapse_whitespace(alpha));
    if (alpha.empty()) return std::nullopt;
    for (const auto& h : kHeadings) {
        if (alpha == h.text) return h.label;
    }
    return std::nullopt;
}

std::vector<Section> segment_sections(std::string_view full_text) {
    const auto n = full_text.size();
    std::vector<std::pair<std::size_t, SectionLabel>> headings;
    std::size_t line_start = 0;
    while (line_start < n) {
        auto line_end = full_text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = n;
        if (auto label = heading_label(full_text.substr(line_start, line_end - line_start))) {
            headings.emplace_back(line_start, *label);
        }
        line_start = line_end + 1;
    }
    std::vector<Section> out;
    if (headings.empty()) {
        out.push_back({SectionLabel::other, 0, n});
        return out;
    }
    if (headings.front().first > 0) out.push_back({SectionLabel::other, 0, headings.front().first});
    for (std::size_t i = 0; i < headings.size(); ++i) {
        const auto end = i + 1 < headings.size() ? headings[i + 1].first : n;
        out.push_back({headings[i].second, headings[i].first, end});
    }
    return out;
}

DocumentText extract_text(const fs::path& pdf_path, TextExtractor& extractor, std::string doc_id) {
    std::ifstream in(pdf_path, std::ios::binary);
    if (!in) throw Error("not-a-pdf", "cannot open " + pdf_path.string());
    char magic[5] = {};
    in.read(magic, 5);
    if (in.gcount() != 5 || !pdf::has_pdf_magic(std::string_view(magic, 5))) {
        throw Error("not-a-pdf", pdf_path.string() + " does not start with %PDF-");
    }
    in.close();

    std::string raw;
    try {
        raw = extractor.extract(pdf_path);
    } catch (const Error& e) {
        if (e.code() == "extractor-failed" || e.code() == "not-a-pdf") throw;
        throw Error("extractor-failed", e.what());
    } catch (const std::exception& e) {
        throw Error("extractor-failed", e.what());
    }
    DocumentText doc;
    doc.doc_id = doc_id.empty() ? pdf_path.stem().string() : std::move(doc_id);
    doc.source_path = pdf_path;
    doc.full_text = normalize_text(raw);
    if (text::is_blank(doc.full_text)) {
        throw Error("empty-extraction", pdf_path.string() + " produced no text");
    }
    doc.sections = segment_sections(doc.full_text);
    return doc;
}

namespace {

// Largest split position b in (lo, hi] that ends a sentence.
std::optional<std::size_t> last_sentence_boundary(std::string_view t, std::size_t lo, std::size_t hi) {
    for (std::size_t b = hi; b > lo; --b) {
        const char prev = t[b - 1];
        if (prev == '\n') return b;
        if (prev == ' ' && b >= 2) {
            const char p2 = t[b - 2];
            if (p2 == '.' || p2 == '?' || p2 == '!') return b;
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<Chunk> chunk_document(const DocumentText& doc, const ChunkParams& params) {
    params.validate();
    const std::string_view t = doc.full_text;
    std::vector<Chunk> out;
    auto emit = [&](std::size_t s, std::size_t e, SectionLabel label) {
        if (text::is_blank(t.substr(s, e - s))) return;
        Chunk c;
        c.doc_id = doc.doc_id;
        c.chunk_id = out.size();
        c.start = s;
        c.end = e;
        c.text = std::string(t.substr(s, e - s));
        c.section = label;
        out.push_back(std::move(c));
    };
    for (const auto& sec : doc.sections) {
        const auto end = std::min(sec.end, t.size());
        if (sec.start >= end || text::is_blank(t.substr(sec.start, end - sec.start))) continue;
        std::size_t pos = sec.start;
        while (true) {
            if (end - pos <= params.max_chunk_chars) {
                emit(pos, end, sec.label);
                break;
            }
            std::size_t window_end = text::utf8_floor(t, pos + params.max_chunk_chars);
            if (window_end <= pos + params.overlap_chars) window_end = pos + params.max_chunk_chars;
            std::size_t split = window_end;
            if (auto b = last_sentence_boundary(t, pos + params.overlap_chars, window_end)) split = *b;
            emit(pos, split, sec.label);
            std::size_t next = text::utf8_floor(t, split - params.overlap_chars);
            if (next <= pos) next = split;
            pos = next;
        }
    }
    return out;
}

void to_json(nlohmann::json& j, const Section& s) {
    j = nlohmann::json{{"label", to_string(s.label)}, {"start", s.start}, {"end", s.end}};
}

void to_json(nlohmann::json& j, const Chunk& c) {
    j = nlohmann::json{{"doc_id", c.doc_id},   {"chunk_id", c.chunk_id}, {"start", c.start},
                       {"end", c.end},         {"section", to_string(c.section)}, {"text", c.text}};
}

}  // namespace litpipe::ingest
