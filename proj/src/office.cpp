#include "litpipe/office.hpp"

#include <fstream>

#include "litpipe/error.hpp"

namespace litpipe::office {

namespace {
constexpr const char* kNamespaces =
    R"( xmlns:office="urn:oasis:names:tc:opendocument:xmlns:office:1.0")"
    R"( xmlns:text="urn:oasis:names:tc:opendocument:xmlns:text:1.0")"
    R"( xmlns:table="urn:oasis:names:tc:opendocument:xmlns:table:1.0")"
    R"( xmlns:style="urn:oasis:names:tc:opendocument:xmlns:style:1.0")"
    R"( office:version="1.2")";
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            case '\n': out += "<text:line-break/>"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string flat_odt(const std::vector<Paragraph>& paragraphs) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<office:document";
    out += kNamespaces;
    out += " office:mimetype=\"application/vnd.oasis.opendocument.text\">\n<office:body><office:text>\n";
    for (const auto& p : paragraphs) {
        switch (p.kind) {
            case Paragraph::Kind::title:
                out += "<text:h text:outline-level=\"1\">" + xml_escape(p.text) + "</text:h>\n";
                break;
            case Paragraph::Kind::heading:
                out += "<text:h text:outline-level=\"2\">" + xml_escape(p.text) + "</text:h>\n";
                break;
            case Paragraph::Kind::body:
                out += "<text:p>" + xml_escape(p.text) + "</text:p>\n";
                break;
        }
    }
    out += "</office:text></office:body>\n</office:document>\n";
    return out;
}

std::string flat_ods(const std::vector<Sheet>& sheets) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<office:document";
    out += kNamespaces;
    out += " office:mimetype=\"application/vnd.oasis.opendocument.spreadsheet\">\n"
           "<office:body><office:spreadsheet>\n";
    for (const auto& sheet : sheets) {
        out += "<table:table table:name=\"" + xml_escape(sheet.name) + "\">\n";
        for (const auto& row : sheet.rows) {
            out += "<table:table-row>";
            for (const auto& cell : row) {
                out += "<table:table-cell office:value-type=\"string\"><text:p>" + xml_escape(cell) +
                       "</text:p></table:table-cell>";
            }
            out += "</table:table-row>\n";
        }
        out += "</table:table>\n";
    }
    out += "</office:spreadsheet></office:body>\n</office:document>\n";
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("dest-unwritable", "cannot write " + path.string());
    out << content;
    if (!out) throw Error("dest-unwritable", "short write to " + path.string());
}

}  // namespace litpipe::office
