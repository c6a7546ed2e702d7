#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "litpipe/error.hpp"
#include "litpipe/ingest.hpp"
#include "litpipe/pdf.hpp"
#include "litpipe/text.hpp"

namespace litpipe::ingest {
namespace {

using litpipe::testing::fixtures_dir;
using litpipe::testing::TempDir;

DocumentText make_doc(std::string text) {
    DocumentText d;
    d.doc_id = "d";
    d.full_text = std::move(text);
    d.sections = segment_sections(d.full_text);
    return d;
}

std::string section_text(const DocumentText& d, SectionLabel label) {
    for (const auto& s : d.sections) {
        if (s.label == label) return d.full_text.substr(s.start, s.end - s.start);
    }
    return {};
}

void expect_sections_cover(const std::string& text, const std::vector<Section>& sections) {
    ASSERT_FALSE(sections.empty());
    EXPECT_EQ(sections.front().start, 0u);
    EXPECT_EQ(sections.back().end, text.size());
    for (std::size_t i = 1; i < sections.size(); ++i) EXPECT_EQ(sections[i].start, sections[i - 1].end);
    for (const auto& s : sections) {
        EXPECT_LE(s.start, s.end);
        EXPECT_EQ(text::utf8_floor(text, s.start), s.start);
    }
}

TEST(HeadingLabel, SynonymTable) {
    EXPECT_EQ(heading_label("Introduction"), SectionLabel::introduction);
    EXPECT_EQ(heading_label("BACKGROUND"), SectionLabel::introduction);
    EXPECT_EQ(heading_label("2. Materials and Methods"), SectionLabel::methods);
    EXPECT_EQ(heading_label("Methodology"), SectionLabel::methods);
    EXPECT_EQ(heading_label("III. Results"), SectionLabel::results);
    EXPECT_EQ(heading_label("4 Findings"), SectionLabel::results);
    EXPECT_EQ(heading_label("5.1 Conclusions"), SectionLabel::discussion);
    EXPECT_EQ(heading_label("iv. discussion"), SectionLabel::discussion);
    EXPECT_EQ(heading_label("Bibliography"), SectionLabel::references);
    EXPECT_EQ(heading_label("  References  "), SectionLabel::references);
}

TEST(HeadingLabel, RejectsOrdinaryLines) {
    EXPECT_FALSE(heading_label("The results were good."));
    EXPECT_FALSE(heading_label("Methods and results"));
    EXPECT_FALSE(heading_label(""));
    EXPECT_FALSE(heading_label(std::string(55, ' ') + "Introduction"));
}

TEST(HeadingLabel, InsensitiveToCaseAndNumbering) {
    for (const std::string& prefix : {"", "1. ", "12 ", "2.3 ", "IV. ", "XI "}) {
        for (const std::string& word : {"results", "RESULTS", "Results", "rEsUlTs"}) {
            EXPECT_EQ(heading_label(prefix + word), SectionLabel::results) << prefix + word;
        }
    }
}

TEST(SegmentSections, FiveCanonicalHeadingsPlusLeadingOther) {
    const std::string text =
        "A title\nAuthors\nIntroduction\nWe study things.\nMethods\nWe measured.\nResults\nIt worked.\n"
        "Discussion\nIt matters.\nReferences\nA. (2000).\n";
    const auto sections = segment_sections(text);
    ASSERT_EQ(sections.size(), 6u);
    const std::vector<SectionLabel> labels = {SectionLabel::other,   SectionLabel::introduction,
                                              SectionLabel::methods, SectionLabel::results,
                                              SectionLabel::discussion, SectionLabel::references};
    for (std::size_t i = 0; i < labels.size(); ++i) EXPECT_EQ(sections[i].label, labels[i]);
    EXPECT_EQ(text.substr(sections[0].start, sections[0].end - sections[0].start), "A title\nAuthors\n");
    EXPECT_EQ(text.substr(sections[1].start, sections[1].end - sections[1].start),
              "Introduction\nWe study things.\n");
    expect_sections_cover(text, sections);
}

TEST(SegmentSections, NoHeadingsIsOneOtherSection) {
    const std::string text = "Dear editor,\nplease find our letter.";
    const auto sections = segment_sections(text);
    ASSERT_EQ(sections.size(), 1u);
    EXPECT_EQ(sections[0], (Section{SectionLabel::other, 0, text.size()}));
    EXPECT_EQ(segment_sections("").size(), 1u);
}

TEST(SegmentSections, NumberedMaterialsAndMethods) {
    const auto d = make_doc("Intro text\n2. Materials and Methods\nSamples were collected.\n");
    EXPECT_NE(section_text(d, SectionLabel::methods).find("Samples were collected."), std::string::npos);
}

TEST(SegmentSections, CoverageOnRandomText) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto text = litpipe::testing::random_text(seed, 200 * seed);
        expect_sections_cover(text, segment_sections(text));
    }
}

TEST(ChunkParams, Validation) {
    EXPECT_NO_THROW((ChunkParams{2000, 200}.validate()));
    EXPECT_THROW((ChunkParams{200, 200}.validate()), Error);
    EXPECT_THROW((ChunkParams{0, 0}.validate()), Error);
}

TEST(ChunkDocument, ShortSectionIsOneChunk) {
    const std::string body(100, 'x');
    const auto d = make_doc(body);
    const auto chunks = chunk_document(d, {});
    ASSERT_EQ(chunks.size(), 1u);
    EXPECT_EQ(chunks[0].text, body);
    EXPECT_EQ(chunks[0].chunk_id, 0u);
}

TEST(ChunkDocument, WindowArithmeticWithoutSentenceBoundaries) {
    std::string text;
    while (text.size() < 5000) text += "abcd ";
    text.resize(5000);
    const auto chunks = chunk_document(make_doc(text), {2000, 200});
    // Hard cuts: [0,2000), then each window starts 200 before the previous end.
    std::vector<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t start = 0;;) {
        const auto end = std::min(start + 2000, text.size());
        expected.emplace_back(start, end);
        if (end == text.size()) break;
        start = end - 200;
    }
    ASSERT_EQ(expected.size(), 3u);
    ASSERT_EQ(chunks.size(), expected.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        EXPECT_EQ(chunks[i].start, expected[i].first);
        EXPECT_EQ(chunks[i].end, expected[i].second);
    }
}

TEST(ChunkDocument, PrefersSentenceBoundaries) {
    std::string text;
    for (int i = 0; text.size() < 5000; ++i) text += "Sentence number " + std::to_string(i) + " ends here. ";
    const auto chunks = chunk_document(make_doc(text), {2000, 200});
    ASSERT_GE(chunks.size(), 3u);
    for (std::size_t i = 0; i + 1 < chunks.size(); ++i) {
        EXPECT_TRUE(chunks[i].text.ends_with(". ")) << i;
        EXPECT_EQ(chunks[i + 1].start, chunks[i].end - 200);
    }
}

TEST(ChunkDocument, WhitespaceSectionHasNoChunks) {
    const auto d = make_doc("  \n\t\n\nIntroduction\nText here.\n");
    ASSERT_EQ(d.sections.size(), 2u);
    EXPECT_EQ(d.sections[0].label, SectionLabel::other);
    const auto chunks = chunk_document(d, {});
    ASSERT_EQ(chunks.size(), 1u);
    EXPECT_EQ(chunks[0].section, SectionLabel::introduction);
    EXPECT_EQ(chunks[0].chunk_id, 0u);
}

TEST(ChunkDocument, InvariantsAndDeterminism) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 30; ++i) {
        const auto text = litpipe::testing::random_text(500 + i, rng() % 12000);
        const auto d = make_doc(text);
        const ChunkParams p{100 + rng() % 1900, 0};
        const ChunkParams params{p.max_chunk_chars, rng() % (p.max_chunk_chars / 2)};
        const auto chunks = chunk_document(d, params);
        EXPECT_EQ(chunks, chunk_document(d, params));
        for (std::size_t c = 0; c < chunks.size(); ++c) {
            const auto& ch = chunks[c];
            EXPECT_EQ(ch.chunk_id, c);
            EXPECT_FALSE(text::is_blank(ch.text));
            EXPECT_LE(ch.end - ch.start, params.max_chunk_chars);
            EXPECT_EQ(ch.text, text.substr(ch.start, ch.end - ch.start));
            EXPECT_EQ(text::utf8_floor(text, ch.start), ch.start);
            EXPECT_EQ(text::utf8_floor(text, ch.end), ch.end);
        }
        EXPECT_EQ(oracle::strip_whitespace(oracle::deoverlap(chunks)), oracle::strip_whitespace(text));
    }
}

TEST(NormalizeText, NfcAndLineEndings) {
    EXPECT_EQ(normalize_text("cafe\xCC\x81\r\nline\rend"), "caf\xC3\xA9\nline\nend");
    EXPECT_EQ(normalize_text("already fine\n"), "already fine\n");
}

TEST(ExtractText, FixturePdfIntroductionSection) {
    TempDir dir;
    pdf::write_text_pdf(dir / "paper.pdf", "Title\nIntroduction\nWe study gait.\nMethods\nWe measured it.\n");
    BuiltinExtractor extractor;
    const auto doc = extract_text(dir / "paper.pdf", extractor);
    EXPECT_EQ(doc.doc_id, "paper");
    EXPECT_NE(section_text(doc, SectionLabel::introduction).find("We study"), std::string::npos);
    EXPECT_EQ(section_text(doc, SectionLabel::introduction).find("We measured"), std::string::npos);
}

TEST(ExtractText, NonPdfIsRejected) {
    TempDir dir;
    litpipe::testing::write_file(dir / "notes.pdf", "plain text pretending");
    BuiltinExtractor extractor;
    try {
        extract_text(dir / "notes.pdf", extractor);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "not-a-pdf");
    }
}

TEST(ExtractText, ImageOnlyPdfIsEmptyExtraction) {
    TempDir dir;
    pdf::write_text_pdf(dir / "scan.pdf", "");
    BuiltinExtractor extractor;
    try {
        extract_text(dir / "scan.pdf", extractor);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "empty-extraction");
    }
}

TEST(ExtractText, FixtureExtractorNormalizes) {
    TempDir dir;
    pdf::write_text_pdf(dir / "a.pdf", "ignored");
    FixtureExtractor extractor(std::map<std::string, std::string>{{"a.pdf", "Re\xCC\x81sume\xCC\x81\r\nResults\r\n"}});
    const auto doc = extract_text(dir / "a.pdf", extractor, "custom");
    EXPECT_EQ(doc.doc_id, "custom");
    EXPECT_EQ(doc.full_text, "R\xC3\xA9sum\xC3\xA9\nResults\n");
}

TEST(ExtractText, FixtureExtractorDirectory) {
    TempDir dir;
    pdf::write_text_pdf(dir / "b.pdf", "ignored");
    litpipe::testing::write_file(dir / "texts/b.txt", "From the fixture directory");
    FixtureExtractor extractor(dir / "texts");
    EXPECT_EQ(extract_text(dir / "b.pdf", extractor).full_text, "From the fixture directory");
}

#ifdef LITPIPE_PDF2TEXT
TEST(CommandExtractor, RunsExternalTool) {
    CommandExtractor extractor(LITPIPE_PDF2TEXT);
    const auto path = fixtures_dir() / "planted" / "instrument.pdf";
    const auto doc = extract_text(path, extractor);
    EXPECT_EQ(doc.full_text,
              normalize_text(litpipe::testing::read_file(fixtures_dir() / "src" / "planted" / "instrument.txt")));
}
#endif

TEST(CommandExtractor, NonzeroExitIsExtractorFailed) {
    TempDir dir;
    pdf::write_text_pdf(dir / "a.pdf", "text");
    CommandExtractor extractor("/bin/false");
    try {
        extract_text(dir / "a.pdf", extractor);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "extractor-failed");
    }
}

TEST(CommandExtractor, MissingToolIsExtractorFailed) {
    TempDir dir;
    pdf::write_text_pdf(dir / "a.pdf", "text");
    CommandExtractor extractor(dir / "no-such-tool");
    try {
        extract_text(dir / "a.pdf", extractor);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "extractor-failed");
    }
}

TEST(CommandExtractor, PathsWithSpacesAndQuotes) {
    TempDir dir;
    const auto path = dir / "it's a file.pdf";
    pdf::write_text_pdf(path, "quoted");
#ifdef LITPIPE_PDF2TEXT
    CommandExtractor extractor(LITPIPE_PDF2TEXT);
    EXPECT_EQ(extract_text(path, extractor).full_text, "quoted\n");
#endif
}

TEST(SectionLabel, StringRoundTrip) {
    for (auto l : {SectionLabel::introduction, SectionLabel::methods, SectionLabel::results, SectionLabel::discussion,
                   SectionLabel::references, SectionLabel::other}) {
        EXPECT_EQ(section_label_from_string(to_string(l)), l);
    }
}

}  // namespace
}  // namespace litpipe::ingest
