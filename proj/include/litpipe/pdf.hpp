#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace litpipe::pdf {

bool has_pdf_magic(std::string_view bytes);

/// Minimal single-font PDF whose content streams draw `text` one line per
/// `Tj`. Non-ASCII bytes are written as octal escapes so extraction returns
/// the original UTF-8. An empty text yields a page holding only a filled
/// rectangle (no text operators).
std::string make_text_pdf(std::string_view text);
void write_text_pdf(const std::filesystem::path& path, std::string_view text);

/// Text from the content streams of a PDF (uncompressed or FlateDecode):
/// string operands of Tj/TJ/'/", with T*, TD/Td vertical moves and ' / "
/// mapped to newlines. Throws Error("extractor-failed") when no page
/// content can be located.
std::string extract_text(std::string_view bytes);

}  // namespace litpipe::pdf
