#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Flat (single-file XML) OpenDocument writers used by the optional
// word-processor and spreadsheet exporters.
namespace litpipe::office {

struct Paragraph {
    enum class Kind { title, heading, body } kind = Kind::body;
    std::string text;
};

struct Sheet {
    std::string name;
    std::vector<std::vector<std::string>> rows;
};

std::string xml_escape(std::string_view s);

/// `.fodt` text document.
std::string flat_odt(const std::vector<Paragraph>& paragraphs);

/// `.fods` workbook, one table per sheet.
std::string flat_ods(const std::vector<Sheet>& sheets);

/// Throws Error("dest-unwritable").
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace litpipe::office
