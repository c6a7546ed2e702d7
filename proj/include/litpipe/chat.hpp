#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "litpipe/ingest.hpp"
#include "litpipe/net.hpp"
#include "litpipe/semantic.hpp"

namespace litpipe::chat {

namespace fs = std::filesystem;

enum class Role { user, assistant };
enum class Mode { document, general };

std::string to_string(Role r);
std::string to_string(Mode m);
Role role_from_string(std::string_view s);
Mode mode_from_string(std::string_view s);

struct ChunkRef {
    std::string doc_id;
    std::size_t chunk_id = 0;

    std::string str() const { return doc_id + "#" + std::to_string(chunk_id); }
    bool operator==(const ChunkRef&) const = default;
};

struct Turn {
    Role role = Role::user;
    std::string text;
    Mode mode = Mode::document;
    std::vector<ChunkRef> cited_chunks;
    std::string timestamp;  // ISO-8601 UTC
};

struct Conversation {
    std::string conv_id;
    std::string doc_id;
    std::vector<Turn> turns;
};

/// What a prompt is for; lets offline providers pick a strategy.
enum class Purpose { question, summary, synthesis };

struct ContextBlock {
    std::string key;
    std::string text;
    std::size_t position = 0;  // source order (chunk start offset, member index)
};

struct PromptBundle {
    Purpose purpose = Purpose::question;
    std::string system_preamble;
    std::vector<ContextBlock> context_blocks;
    std::vector<Turn> history;
    std::string question;

    std::size_t size() const;
};

extern const std::string kNotFound;
extern const std::string kDocumentPreamble;
extern const std::string kGeneralPreamble;
extern const std::string kGeneralOfflineAnswer;

/// Drops oldest history, then lowest-ranked context (keeping at least one
/// block, truncated if need be) until bundle.size() <= budget.
void fit_to_budget(PromptBundle& bundle, std::size_t budget);

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const PromptBundle& bundle) = 0;
};

/// Up to three context sentences most similar (hash-embedding cosine) to the
/// question, in document order; kNotFound when the best score is below 0.1.
std::string extractive_answer(std::string_view question, const std::vector<ContextBlock>& blocks);

/// The most central sentences of the blocks (cosine to the block centroid),
/// in document order. Used for table summaries.
std::string extractive_summary(const std::vector<ContextBlock>& blocks, std::size_t max_sentences = 3);

/// Deterministic offline provider built on extractive_answer/extractive_summary.
/// Synthesis prompts get one paragraph quoting each member's first summary
/// sentence followed by its block key (the in-text citation).
class ExtractiveChatProvider final : public ChatProvider {
public:
    std::string complete(const PromptBundle& bundle) override;
};

/// POSTs `{"system": ..., "messages": [{"role","content"}...]}` and reads
/// `{"content": ...}`.
class RemoteChatProvider final : public ChatProvider {
public:
    RemoteChatProvider(std::string url, std::string api_key, net::HttpTransport& transport, net::RateLimit limits,
                       net::Clock& clock = net::system_clock());
    std::string complete(const PromptBundle& bundle) override;
    static nlohmann::json request_body(const PromptBundle& bundle);

private:
    std::string url_;
    std::string key_;
    net::HttpTransport& transport_;
    net::RateLimit limits_;
    net::Clock& clock_;
    net::RateLimiter limiter_;
};

struct IndexedDocument {
    ingest::DocumentText doc;
    std::vector<ingest::Chunk> chunks;
    semantic::VectorIndex index;
};

IndexedDocument index_document(ingest::DocumentText doc, const ingest::ChunkParams& params,
                               semantic::EmbeddingProvider& embedder);

/// Thread-safe registry of indexed documents.
class DocumentStore {
public:
    /// Stores the document under its doc_id; an existing id is replaced.
    std::shared_ptr<const IndexedDocument> add(IndexedDocument doc);
    std::shared_ptr<const IndexedDocument> get(const std::string& doc_id) const;
    std::vector<std::shared_ptr<const IndexedDocument>> list() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const IndexedDocument>> docs_;
};

/// Per-document conversations. Distinct conversations run concurrently;
/// asks on one conversation are serialized.
class ChatEngine {
public:
    ChatEngine(DocumentStore& docs, semantic::EmbeddingProvider& embedder, ChatProvider& provider,
               std::size_t prompt_budget = 24000);

    /// Throws Error("unknown-document").
    std::string create_conversation(const std::string& doc_id);

    /// Appends the user turn and the assistant turn on success only.
    Turn ask(const std::string& conv_id, const std::string& question, Mode mode, std::size_t k = 6);

    Conversation conversation(const std::string& conv_id) const;
    std::vector<std::string> conversation_ids() const;

private:
    struct Slot {
        std::mutex mu;
        Conversation conv;
    };
    std::shared_ptr<Slot> slot(const std::string& conv_id) const;

    DocumentStore& docs_;
    semantic::EmbeddingProvider& embedder_;
    ChatProvider& provider_;
    std::size_t budget_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Slot>> convs_;
    std::size_t next_id_ = 1;
};

/// Markdown transcript: title, `Document:` line, then per turn a
/// `**User:**`/`**Assistant:**` header tagged with the mode, the text as a
/// `> ` block quote, and `Sources:` for document-mode answers.
std::string render_transcript(const Conversation& conv);

enum class TranscriptFormat { markdown, flat_odt };

/// Writes to `dest` (or `dest/<conv_id>.md|.fodt` when dest is a directory).
fs::path export_transcript(const Conversation& conv, const fs::path& dest,
                           TranscriptFormat format = TranscriptFormat::markdown);

void to_json(nlohmann::json& j, const ChunkRef& c);
void to_json(nlohmann::json& j, const Turn& t);
void to_json(nlohmann::json& j, const Conversation& c);

}  // namespace litpipe::chat
