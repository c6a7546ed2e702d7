#include "litpipe/pdf.hpp"

#include <cctype>
#include <cstdio>
#include <optional>
#include <fstream>
#include <sstream>
#include <vector>

#include <zlib.h>

#include "litpipe/error.hpp"

namespace litpipe::pdf {

namespace {

constexpr int kLinesPerPage = 60;

std::string escape_pdf_string(std::string_view line) {
    std::string out;
    for (unsigned char c : line) {
        if (c == '(' || c == ')' || c == '\\') {
            out.push_back('\\');
            out.push_back(static_cast<char>(c));
        } else if (c < 0x20 || c >= 0x7f) {
            char buf[5];
            std::snprintf(buf, sizeof buf, "\\%03o", c);
            out += buf;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string inflate(std::string_view data) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) return {};
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    std::string out;
    char buf[16384];
    int rc = Z_OK;
    while (rc == Z_OK) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc = inflate(&zs, Z_NO_FLUSH);
        out.append(buf, sizeof buf - zs.avail_out);
    }
    inflateEnd(&zs);
    return (rc == Z_STREAM_END || !out.empty()) ? out : std::string();
}

bool is_ws(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0'; }
bool is_delim(char c) {
    return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' || c == '{' || c == '}' ||
           c == '/' || c == '%';
}

struct Operand {
    enum Kind { number, string, array, other } kind = other;
    double num = 0;
    std::string str;
    std::vector<Operand> items;
};

class ContentParser {
public:
    explicit ContentParser(std::string_view s) : s_(s) {}

    void run(std::string& out) {
        std::vector<Operand> stack;
        while (skip_ws(), pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '(') {
                stack.push_back(read_string());
            } else if (c == '<' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '<') {
                pos_ += 2;
                stack.push_back({});
            } else if (c == '>' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
                pos_ += 2;
            } else if (c == '<') {
                stack.push_back(read_hex());
            } else if (c == '[') {
                ++pos_;
                stack.push_back(read_array());
            } else if (c == ']') {
                ++pos_;
            } else if (c == '/') {
                ++pos_;
                read_word();
                stack.push_back({});
            } else if (c == '%') {
                while (pos_ < s_.size() && s_[pos_] != '\n' && s_[pos_] != '\r') ++pos_;
            } else {
                auto word = read_word();
                if (word.empty()) {
                    ++pos_;
                    continue;
                }
                if (auto num = as_number(word)) {
                    Operand o;
                    o.kind = Operand::number;
                    o.num = *num;
                    stack.push_back(o);
                } else {
                    apply(word, stack, out);
                    stack.clear();
                }
            }
        }
    }

private:
    static std::optional<double> as_number(const std::string& w) {
        if (w.empty()) return std::nullopt;
        const char c = w[0];
        if (!(c == '-' || c == '+' || c == '.' || (c >= '0' && c <= '9'))) return std::nullopt;
        try {
            return std::stod(w);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    static void apply(const std::string& op, const std::vector<Operand>& st, std::string& out) {
        if (op == "Tj" && !st.empty() && st.back().kind == Operand::string) {
            out += st.back().str;
        } else if (op == "TJ" && !st.empty() && st.back().kind == Operand::array) {
            for (const auto& it : st.back().items) {
                if (it.kind == Operand::string) out += it.str;
                else if (it.kind == Operand::number && it.num < -200) out.push_back(' ');
            }
        } else if (op == "'" && !st.empty() && st.back().kind == Operand::string) {
            out.push_back('\n');
            out += st.back().str;
        } else if (op == "\"" && !st.empty() && st.back().kind == Operand::string) {
            out.push_back('\n');
            out += st.back().str;
        } else if (op == "T*") {
            out.push_back('\n');
        } else if ((op == "Td" || op == "TD") && st.size() >= 2 && st[st.size() - 1].kind == Operand::number &&
                   st[st.size() - 1].num != 0.0 && !out.empty() && out.back() != '\n') {
            out.push_back('\n');
        }
    }

    void skip_ws() {
        while (pos_ < s_.size() && is_ws(s_[pos_])) ++pos_;
    }

    std::string read_word() {
        const auto start = pos_;
        while (pos_ < s_.size() && !is_ws(s_[pos_]) && !is_delim(s_[pos_])) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Operand read_string() {
        Operand o;
        o.kind = Operand::string;
        ++pos_;
        int depth = 1;
        while (pos_ < s_.size()) {
            char c = s_[pos_++];
            if (c == '\\' && pos_ < s_.size()) {
                char e = s_[pos_++];
                switch (e) {
                    case 'n': o.str.push_back('\n'); break;
                    case 'r': o.str.push_back('\r'); break;
                    case 't': o.str.push_back('\t'); break;
                    case 'b': o.str.push_back('\b'); break;
                    case 'f': o.str.push_back('\f'); break;
                    case '\r':
                        if (pos_ < s_.size() && s_[pos_] == '\n') ++pos_;
                        break;
                    case '\n': break;
                    default:
                        if (e >= '0' && e <= '7') {
                            int v = e - '0';
                            for (int k = 0; k < 2 && pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '7'; ++k) {
                                v = v * 8 + (s_[pos_++] - '0');
                            }
                            o.str.push_back(static_cast<char>(v & 0xff));
                        } else {
                            o.str.push_back(e);
                        }
                }
            } else if (c == '(') {
                ++depth;
                o.str.push_back(c);
            } else if (c == ')') {
                if (--depth == 0) break;
                o.str.push_back(c);
            } else {
                o.str.push_back(c);
            }
        }
        return o;
    }

    Operand read_hex() {
        Operand o;
        o.kind = Operand::string;
        ++pos_;
        std::string digits;
        while (pos_ < s_.size() && s_[pos_] != '>') {
            if (std::isxdigit(static_cast<unsigned char>(s_[pos_]))) digits.push_back(s_[pos_]);
            ++pos_;
        }
        ++pos_;
        if (digits.size() % 2) digits.push_back('0');
        for (std::size_t i = 0; i < digits.size(); i += 2) {
            o.str.push_back(static_cast<char>(std::stoi(digits.substr(i, 2), nullptr, 16)));
        }
        return o;
    }

    Operand read_array() {
        Operand arr;
        arr.kind = Operand::array;
        while (skip_ws(), pos_ < s_.size() && s_[pos_] != ']') {
            const char c = s_[pos_];
            if (c == '(') {
                arr.items.push_back(read_string());
            } else if (c == '<') {
                arr.items.push_back(read_hex());
            } else if (c == '[') {
                ++pos_;
                arr.items.push_back(read_array());
            } else {
                auto w = read_word();
                if (w.empty()) {
                    ++pos_;
                    continue;
                }
                Operand o;
                if (auto n = as_number(w)) {
                    o.kind = Operand::number;
                    o.num = *n;
                }
                arr.items.push_back(o);
            }
        }
        if (pos_ < s_.size()) ++pos_;
        return arr;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

bool has_pdf_magic(std::string_view bytes) { return bytes.starts_with("%PDF-"); }

std::string make_text_pdf(std::string_view text) {
    std::vector<std::string> lines;
    {
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == '\n') {
                lines.emplace_back(text.substr(start, i - start));
                start = i + 1;
            }
        }
        if (!lines.empty() && lines.back().empty()) lines.pop_back();
    }
    std::vector<std::string> pages;
    if (lines.empty()) {
        pages.push_back("q 0.5 g 72 600 200 100 re f Q\n");
    }
    for (std::size_t p = 0; p < lines.size(); p += kLinesPerPage) {
        std::string content = "BT\n/F1 10 Tf\n12 TL\n50 780 Td\n";
        for (std::size_t i = p; i < std::min(lines.size(), p + kLinesPerPage); ++i) {
            if (!lines[i].empty()) content += "(" + escape_pdf_string(lines[i]) + ") Tj ";
            content += "T*\n";
        }
        content += "ET\n";
        pages.push_back(std::move(content));
    }

    // Objects: 1 catalog, 2 pages, 3 font, then (page, content) pairs.
    std::vector<std::string> objects;
    std::string kids;
    for (std::size_t i = 0; i < pages.size(); ++i) kids += std::to_string(4 + 2 * i) + " 0 R ";
    objects.push_back("<< /Type /Catalog /Pages 2 0 R >>");
    objects.push_back("<< /Type /Pages /Kids [" + kids + "] /Count " + std::to_string(pages.size()) + " >>");
    objects.push_back("<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>");
    for (std::size_t i = 0; i < pages.size(); ++i) {
        objects.push_back("<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] /Resources << /Font << /F1 3 0 R >> >> "
                          "/Contents " + std::to_string(5 + 2 * i) + " 0 R >>");
        objects.push_back("<< /Length " + std::to_string(pages[i].size()) + " >>\nstream\n" + pages[i] + "endstream");
    }
    std::string out = "%PDF-1.4\n%\xE2\xE3\xCF\xD3\n";
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        offsets.push_back(out.size());
        out += std::to_string(i + 1) + " 0 obj\n" + objects[i] + "\nendobj\n";
    }
    const auto xref = out.size();
    out += "xref\n0 " + std::to_string(objects.size() + 1) + "\n0000000000 65535 f \n";
    for (auto off : offsets) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%010zu 00000 n \n", off);
        out += buf;
    }
    out += "trailer\n<< /Size " + std::to_string(objects.size() + 1) + " /Root 1 0 R >>\nstartxref\n" +
           std::to_string(xref) + "\n%%EOF\n";
    return out;
}

void write_text_pdf(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("dest-unwritable", "cannot write " + path.string());
    out << make_text_pdf(text);
}

std::string extract_text(std::string_view bytes) {
    if (!has_pdf_magic(bytes)) throw Error("not-a-pdf", "missing %PDF- header");
    std::string out;
    bool found_stream = false;
    std::size_t pos = 0;
    while ((pos = bytes.find("stream", pos)) != std::string_view::npos) {
        if (pos >= 3 && bytes.substr(pos - 3, 3) == "end") {
            pos += 6;
            continue;
        }
        const auto dict_start = bytes.rfind("obj", pos);
        const auto dict = bytes.substr(dict_start == std::string_view::npos ? 0 : dict_start,
                                       pos - (dict_start == std::string_view::npos ? 0 : dict_start));
        auto data_start = pos + 6;
        if (data_start < bytes.size() && bytes[data_start] == '\r') ++data_start;
        if (data_start < bytes.size() && bytes[data_start] == '\n') ++data_start;
        auto data_end = bytes.find("endstream", data_start);
        if (data_end == std::string_view::npos) break;
        pos = data_end + 9;
        if (dict.find("/Image") != std::string_view::npos || dict.find("/Length1") != std::string_view::npos ||
            dict.find("/XRef") != std::string_view::npos || dict.find("/ObjStm") != std::string_view::npos ||
            dict.find("/Metadata") != std::string_view::npos) {
            continue;
        }
        std::string_view data = bytes.substr(data_start, data_end - data_start);
        std::string decoded;
        if (dict.find("/FlateDecode") != std::string_view::npos) {
            decoded = inflate(data);
            if (decoded.empty()) continue;
            data = decoded;
        } else if (dict.find("/Filter") != std::string_view::npos) {
            continue;
        }
        found_stream = true;
        ContentParser(data).run(out);
    }
    if (!found_stream) throw Error("extractor-failed", "no readable content streams");
    return out;
}

}  // namespace litpipe::pdf
