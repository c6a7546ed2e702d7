#include "litpipe/chat.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>

#include "litpipe/error.hpp"
#include "litpipe/office.hpp"
#include "litpipe/text.hpp"

namespace litpipe::chat {

using nlohmann::json;
using semantic::EmbeddingVector;

const std::string kNotFound = "not found in the document";

const std::string kDocumentPreamble =
    "You answer questions about one research article. Use only the context passages provided below, "
    "which were retrieved from the selected document. Do not use outside knowledge. If the context "
    "does not contain the answer, reply exactly: not found in the document";

const std::string kGeneralPreamble =
    "You are a research assistant. Answer the question from general knowledge; no document context is provided.";

const std::string kGeneralOfflineAnswer =
    "General questions need a configured chat provider; the offline provider only answers from document context.";

std::string to_string(Role r) { return r == Role::user ? "user" : "assistant"; }
std::string to_string(Mode m) { return m == Mode::document ? "document" : "general"; }

Role role_from_string(std::string_view s) {
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    throw Error("invalid-argument", "unknown role '" + std::string(s) + "'");
}

Mode mode_from_string(std::string_view s) {
    if (s == "document") return Mode::document;
    if (s == "general") return Mode::general;
    throw Error("invalid-argument", "unknown mode '" + std::string(s) + "'");
}

std::size_t PromptBundle::size() const {
    std::size_t n = system_preamble.size() + question.size();
    for (const auto& b : context_blocks) n += b.text.size();
    for (const auto& t : history) n += t.text.size();
    return n;
}

void fit_to_budget(PromptBundle& bundle, std::size_t budget) {
    while (bundle.size() > budget && !bundle.history.empty()) bundle.history.erase(bundle.history.begin());
    while (bundle.size() > budget && bundle.context_blocks.size() > 1) bundle.context_blocks.pop_back();
    if (bundle.size() > budget && !bundle.context_blocks.empty()) {
        const auto over = bundle.size() - budget;
        auto& t = bundle.context_blocks.front().text;
        t.resize(text::utf8_floor(t, t.size() > over ? t.size() - over : 0));
    }
}

namespace {

struct Sentence {
    std::size_t block_position;
    std::size_t block_index;
    std::size_t order;
    std::string text;
    std::optional<EmbeddingVector> vec;
};

std::vector<Sentence> collect_sentences(const std::vector<ContextBlock>& blocks) {
    std::vector<Sentence> out;
    std::set<std::string> seen;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        std::size_t order = 0;
        for (auto& s : text::split_sentences(blocks[b].text)) {
            if (ingest::heading_label(s)) continue;
            if (!seen.insert(s).second) continue;
            Sentence sen{blocks[b].position, b, order++, s, std::nullopt};
            try {
                sen.vec = semantic::hash_embed(s);
            } catch (const Error&) {
                continue;
            }
            out.push_back(std::move(sen));
        }
    }
    return out;
}

std::string join_in_document_order(std::vector<const Sentence*> picked) {
    std::sort(picked.begin(), picked.end(), [](const Sentence* a, const Sentence* b) {
        return std::tie(a->block_position, a->block_index, a->order) <
               std::tie(b->block_position, b->block_index, b->order);
    });
    std::string out;
    for (const auto* s : picked) {
        if (!out.empty()) out += " ";
        out += s->text;
    }
    return out;
}

std::vector<const Sentence*> top_by_score(const std::vector<Sentence>& sentences, const std::vector<double>& scores,
                                          std::size_t n) {
    std::vector<std::size_t> idx(sentences.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<const Sentence*> picked;
    for (std::size_t i = 0; i < std::min(n, idx.size()); ++i) picked.push_back(&sentences[idx[i]]);
    return picked;
}

std::string first_sentence(std::string_view s) {
    auto sentences = text::split_sentences(s);
    for (auto& sen : sentences) {
        if (!ingest::heading_label(sen)) return sen;
    }
    return std::string(text::trim(s));
}

}  // namespace

std::string extractive_answer(std::string_view question, const std::vector<ContextBlock>& blocks) {
    EmbeddingVector q;
    try {
        q = semantic::hash_embed(question);
    } catch (const Error&) {
        return kNotFound;
    }
    const auto sentences = collect_sentences(blocks);
    if (sentences.empty()) return kNotFound;
    std::vector<double> scores;
    for (const auto& s : sentences) scores.push_back(semantic::dot(q, *s.vec));
    if (*std::max_element(scores.begin(), scores.end()) < 0.1) return kNotFound;
    return join_in_document_order(top_by_score(sentences, scores, 3));
}

std::string extractive_summary(const std::vector<ContextBlock>& blocks, std::size_t max_sentences) {
    const auto sentences = collect_sentences(blocks);
    if (sentences.empty()) return kNotFound;
    EmbeddingVector centroid;
    centroid.values.assign(semantic::kHashDim, 0.0);
    for (const auto& s : sentences) {
        for (std::size_t i = 0; i < semantic::kHashDim; ++i) centroid.values[i] += s.vec->values[i];
    }
    std::vector<double> scores;
    for (const auto& s : sentences) scores.push_back(semantic::dot(centroid, *s.vec));
    return join_in_document_order(top_by_score(sentences, scores, max_sentences));
}

std::string ExtractiveChatProvider::complete(const PromptBundle& bundle) {
    switch (bundle.purpose) {
        case Purpose::question:
            if (bundle.context_blocks.empty()) return kGeneralOfflineAnswer;
            return extractive_answer(bundle.question, bundle.context_blocks);
        case Purpose::summary:
            return extractive_summary(bundle.context_blocks);
        case Purpose::synthesis: {
            std::string paragraph;
            std::map<std::string, int> freq;
            for (const auto& b : bundle.context_blocks) {
                for (auto& tok : semantic::tokenize(b.text)) {
                    if (tok.size() >= 6) ++freq[tok];
                }
            }
            std::vector<std::pair<std::string, int>> ranked(freq.begin(), freq.end());
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.second > b.second; });
            std::string title;
            for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i) {
                title += (i ? ", " : "") + ranked[i].first;
            }
            for (const auto& b : bundle.context_blocks) {
                std::string claim = first_sentence(b.text);
                for (std::string_view label : {"Introduction: ", "Methods: ", "Results: "}) {
                    if (claim.starts_with(label)) claim.erase(0, label.size());
                }
                while (!claim.empty() && (claim.back() == '.' || claim.back() == ' ')) claim.pop_back();
                if (claim.empty()) claim = "This work is part of the group";
                if (!paragraph.empty()) paragraph += " ";
                paragraph += claim + " " + b.key + ".";
            }
            return "# " + (title.empty() ? std::string("Related works") : "Themes: " + title) + "\n\n" + paragraph;
        }
    }
    return kNotFound;
}

RemoteChatProvider::RemoteChatProvider(std::string url, std::string api_key, net::HttpTransport& transport,
                                       net::RateLimit limits, net::Clock& clock)
    : url_(std::move(url)),
      key_(std::move(api_key)),
      transport_(transport),
      limits_(limits),
      clock_(clock),
      limiter_(limits.requests_per_second, clock) {}

json RemoteChatProvider::request_body(const PromptBundle& bundle) {
    json messages = json::array();
    for (const auto& t : bundle.history) messages.push_back({{"role", to_string(t.role)}, {"content", t.text}});
    std::string content;
    if (!bundle.context_blocks.empty()) {
        content += "Context:\n";
        for (const auto& b : bundle.context_blocks) content += "[" + b.key + "]\n" + b.text + "\n\n";
        content += "Question: ";
    }
    content += bundle.question;
    messages.push_back({{"role", "user"}, {"content", content}});
    return json{{"system", bundle.system_preamble}, {"messages", std::move(messages)}};
}

std::string RemoteChatProvider::complete(const PromptBundle& bundle) {
    net::HttpRequest req;
    req.method = "POST";
    req.url = url_;
    req.body = request_body(bundle).dump();
    if (!key_.empty()) req.headers.emplace_back("Authorization", "Bearer " + key_);
    const auto resp = net::send_with_retries(transport_, req, limits_, clock_, &limiter_);
    try {
        return json::parse(resp.body).at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error("malformed-response", std::string("chat response: ") + e.what());
    }
}

IndexedDocument index_document(ingest::DocumentText doc, const ingest::ChunkParams& params,
                               semantic::EmbeddingProvider& embedder) {
    auto chunks = ingest::chunk_document(doc, params);
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);
    // Chunks without any token (punctuation-only) cannot be embedded; drop them.
    std::vector<ingest::Chunk> kept;
    std::vector<std::string> kept_texts;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (semantic::tokenize(texts[i]).empty()) continue;
        kept.push_back(chunks[i]);
        kept_texts.push_back(texts[i]);
    }
    auto vectors = semantic::embed_texts(kept_texts, embedder);
    semantic::VectorIndex index(vectors.empty() ? semantic::kHashDim : vectors.front().dim());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        index.insert(semantic::EntryKey::chunk(kept[i].doc_id, static_cast<std::int64_t>(kept[i].chunk_id)),
                     vectors[i]);
    }
    return IndexedDocument{std::move(doc), std::move(kept), std::move(index)};
}

std::shared_ptr<const IndexedDocument> DocumentStore::add(IndexedDocument doc) {
    auto ptr = std::make_shared<const IndexedDocument>(std::move(doc));
    std::lock_guard lock(mu_);
    docs_[ptr->doc.doc_id] = ptr;
    return ptr;
}

std::shared_ptr<const IndexedDocument> DocumentStore::get(const std::string& doc_id) const {
    std::lock_guard lock(mu_);
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) throw Error("unknown-document", "no document '" + doc_id + "'");
    return it->second;
}

std::vector<std::shared_ptr<const IndexedDocument>> DocumentStore::list() const {
    std::lock_guard lock(mu_);
    std::vector<std::shared_ptr<const IndexedDocument>> out;
    for (const auto& [id, d] : docs_) out.push_back(d);
    return out;
}

ChatEngine::ChatEngine(DocumentStore& docs, semantic::EmbeddingProvider& embedder, ChatProvider& provider,
                       std::size_t prompt_budget)
    : docs_(docs), embedder_(embedder), provider_(provider), budget_(prompt_budget) {}

std::string ChatEngine::create_conversation(const std::string& doc_id) {
    docs_.get(doc_id);
    std::lock_guard lock(mu_);
    auto id = "c" + std::to_string(next_id_++);
    auto s = std::make_shared<Slot>();
    s->conv.conv_id = id;
    s->conv.doc_id = doc_id;
    convs_.emplace(id, std::move(s));
    return id;
}

std::shared_ptr<ChatEngine::Slot> ChatEngine::slot(const std::string& conv_id) const {
    std::lock_guard lock(mu_);
    auto it = convs_.find(conv_id);
    if (it == convs_.end()) throw Error("unknown-conversation", "no conversation '" + conv_id + "'");
    return it->second;
}

namespace {
std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}
}  // namespace

Turn ChatEngine::ask(const std::string& conv_id, const std::string& question, Mode mode, std::size_t k) {
    auto s = slot(conv_id);
    if (text::is_blank(question)) throw Error("empty-question", "question is empty");
    if (k == 0) throw Error("invalid-argument", "k must be at least 1");
    std::lock_guard lock(s->mu);

    PromptBundle bundle;
    bundle.question = question;
    bundle.history = s->conv.turns;
    std::vector<ChunkRef> cited;
    if (mode == Mode::document) {
        const auto doc = docs_.get(s->conv.doc_id);
        bundle.system_preamble = kDocumentPreamble;
        if (doc->index.size() > 0) {
            const auto query = semantic::embed_texts({question}, embedder_).front();
            const auto hits = doc->index.search_topk(query, k);
            for (const auto& h : hits) {
                const auto id = static_cast<std::size_t>(*h.key.sub);
                const auto it = std::find_if(doc->chunks.begin(), doc->chunks.end(),
                                             [&](const ingest::Chunk& c) { return c.chunk_id == id; });
                bundle.context_blocks.push_back({h.key.str(), it->text, it->start});
            }
        }
    } else {
        bundle.system_preamble = kGeneralPreamble;
    }
    fit_to_budget(bundle, budget_);
    if (mode == Mode::document) {
        for (const auto& b : bundle.context_blocks) {
            const auto hash = b.key.rfind('#');
            cited.push_back({b.key.substr(0, hash), std::stoul(b.key.substr(hash + 1))});
        }
    }

    auto answer = provider_.complete(bundle);

    Turn user{Role::user, question, mode, {}, now_iso8601()};
    Turn assistant{Role::assistant, std::move(answer), mode, std::move(cited), now_iso8601()};
    s->conv.turns.push_back(std::move(user));
    s->conv.turns.push_back(assistant);
    return assistant;
}

Conversation ChatEngine::conversation(const std::string& conv_id) const {
    auto s = slot(conv_id);
    std::lock_guard lock(s->mu);
    return s->conv;
}

std::vector<std::string> ChatEngine::conversation_ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, _] : convs_) out.push_back(id);
    return out;
}

std::string render_transcript(const Conversation& conv) {
    std::string out = "# Transcript " + conv.conv_id + "\n\nDocument: " + conv.doc_id + "\n";
    for (const auto& t : conv.turns) {
        out += "\n**" + std::string(t.role == Role::user ? "User" : "Assistant") + ":** _(" + to_string(t.mode) +
               ")_\n\n";
        for (const auto& line : text::split(t.text, '\n')) out += line.empty() ? ">\n" : "> " + line + "\n";
        if (t.role == Role::assistant && t.mode == Mode::document) {
            out += "\nSources: ";
            if (t.cited_chunks.empty()) out += "none";
            for (std::size_t i = 0; i < t.cited_chunks.size(); ++i) {
                if (i) out += ", ";
                out += t.cited_chunks[i].str();
            }
            out += "\n";
        }
    }
    return out;
}

fs::path export_transcript(const Conversation& conv, const fs::path& dest, TranscriptFormat format) {
    if (conv.turns.empty()) throw Error("empty-conversation", "conversation " + conv.conv_id + " has no turns");
    auto path = dest;
    std::error_code ec;
    if (fs::is_directory(dest, ec)) {
        path = dest / (conv.conv_id + (format == TranscriptFormat::markdown ? ".md" : ".fodt"));
    }
    if (format == TranscriptFormat::markdown) {
        office::write_file(path, render_transcript(conv));
        return path;
    }
    std::vector<office::Paragraph> paras;
    paras.push_back({office::Paragraph::Kind::title, "Transcript " + conv.conv_id});
    paras.push_back({office::Paragraph::Kind::body, "Document: " + conv.doc_id});
    for (const auto& t : conv.turns) {
        paras.push_back({office::Paragraph::Kind::heading,
                         std::string(t.role == Role::user ? "User" : "Assistant") + " (" + to_string(t.mode) + ")"});
        paras.push_back({office::Paragraph::Kind::body, t.text});
        if (t.role == Role::assistant && t.mode == Mode::document) {
            std::string src = "Sources: ";
            for (std::size_t i = 0; i < t.cited_chunks.size(); ++i) src += (i ? ", " : "") + t.cited_chunks[i].str();
            paras.push_back({office::Paragraph::Kind::body, src});
        }
    }
    office::write_file(path, office::flat_odt(paras));
    return path;
}

void to_json(json& j, const ChunkRef& c) { j = json{{"doc_id", c.doc_id}, {"chunk_id", c.chunk_id}}; }

void to_json(json& j, const Turn& t) {
    j = json{{"role", to_string(t.role)},
             {"text", t.text},
             {"mode", to_string(t.mode)},
             {"cited_chunks", t.cited_chunks},
             {"timestamp", t.timestamp}};
}

void to_json(json& j, const Conversation& c) {
    j = json{{"conv_id", c.conv_id}, {"doc_id", c.doc_id}, {"turns", c.turns}};
}

}  // namespace litpipe::chat
