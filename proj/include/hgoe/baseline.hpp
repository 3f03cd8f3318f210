#pragma once

// Inverted-index baseline: a document index and an entity index built from
// the same keyword profiles as the hypergraph, TF-IDF and BM25 scoring, and a
// more-like-this query for entity list completion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hgoe/corpus.hpp"
#include "hgoe/error.hpp"
#include "hgoe/keywords.hpp"
#include "hgoe/parallel.hpp"
#include "hgoe/ranking.hpp"
#include "hgoe/text.hpp"

namespace hgoe {

struct Posting {
    std::uint32_t item;
    std::uint32_t tf;

    bool operator==(const Posting&) const = default;
};

class InvertedIndex {
public:
    /// Adds an item with its term frequencies. Item ids must be unique.
    void add(const std::string& item_id, const std::map<std::string, std::uint32_t>& term_freqs) {
        if (item_lookup_.count(item_id)) throw ParameterError("duplicate item '" + item_id + "' in inverted index");
        const auto slot = static_cast<std::uint32_t>(items_.size());
        items_.push_back(item_id);
        item_lookup_.emplace(item_id, slot);
        std::uint64_t length = 0;
        for (const auto& [term, tf] : term_freqs) {
            if (tf == 0) continue;
            postings_[term].push_back({slot, tf});
            length += tf;
        }
        lengths_.push_back(length);
        total_length_ += length;
    }

    std::span<const Posting> postings(const std::string& term) const {
        auto it = postings_.find(term);
        if (it == postings_.end()) return {};
        return it->second;
    }

    std::size_t df(const std::string& term) const { return postings(term).size(); }
    std::size_t size() const { return items_.size(); }
    double avgdl() const { return items_.empty() ? 0.0 : static_cast<double>(total_length_) / static_cast<double>(items_.size()); }
    const std::string& item(std::uint32_t slot) const { return items_.at(slot); }
    std::uint64_t length(std::uint32_t slot) const { return lengths_.at(slot); }
    bool contains(const std::string& item_id) const { return item_lookup_.count(item_id) != 0; }
    std::size_t vocabulary_size() const { return postings_.size(); }
    const std::map<std::string, std::vector<Posting>>& all_postings() const { return postings_; }

    /// Approximate on-disk footprint: term strings, postings and lengths.
    std::uint64_t byte_size() const {
        std::uint64_t bytes = 0;
        for (const auto& [term, list] : postings_) bytes += term.size() + 4 + list.size() * sizeof(Posting);
        for (const auto& item : items_) bytes += item.size() + 4 + 8;
        return bytes;
    }

private:
    std::vector<std::string> items_;
    std::unordered_map<std::string, std::uint32_t> item_lookup_;
    std::vector<std::uint64_t> lengths_;
    std::uint64_t total_length_ = 0;
    std::map<std::string, std::vector<Posting>> postings_;
};

enum class ProfileMode {
    Keywords, ///< each retained keyword once (tf = 1)
    FullText  ///< every preprocessed term with its full-document tf
};

inline std::map<std::string, std::uint32_t> index_terms(const KeywordProfile& profile, ProfileMode mode) {
    if (mode == ProfileMode::FullText) return profile.tf;
    std::map<std::string, std::uint32_t> out;
    for (const auto& k : profile.keywords) out[k.term] = 1;
    return out;
}

inline InvertedIndex build_document_index(std::span<const KeywordProfile> profiles, ProfileMode mode = ProfileMode::Keywords) {
    InvertedIndex index;
    for (const auto& p : profiles) index.add(p.doc_id, index_terms(p, mode));
    return index;
}

// --- Entity virtual documents ----------------------------------------------

/// Splits on '.', '!' or '?' followed by whitespace, and on newlines. Pieces
/// that are blank after trimming are dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    auto flush = [&](std::size_t begin, std::size_t end) {
        auto piece = text.substr(begin, end - begin);
        const auto first = piece.find_first_not_of(" \t\r\n");
        if (first == std::string_view::npos) return;
        const auto last = piece.find_last_not_of(" \t\r\n");
        out.emplace_back(piece.substr(first, last - first + 1));
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') {
            flush(start, i);
            start = i + 1;
        } else if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size() &&
                   (text[i + 1] == ' ' || text[i + 1] == '\t' || text[i + 1] == '\r' || text[i + 1] == '\n')) {
            flush(start, i + 1);
            start = i + 1;
        }
    }
    flush(start, text.size());
    return out;
}

/// True when `needle` occurs as a contiguous token run in `haystack`.
inline bool contains_token_run(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

struct EntityVirtualDocument {
    std::string entity_label;
    std::string text;
    KeywordProfile profile;
};

struct EntityIndex {
    InvertedIndex index;
    std::map<std::string, EntityVirtualDocument> documents;
    /// Entities seen in the corpus without any sentence mentioning them.
    std::vector<std::string> excluded;
};

/// A sentence mentions an entity when it contains the mention's surface form
/// or the entity label as a contiguous run of tokens. Sentences are gathered
/// in corpus order and each contributes at most once per entity.
inline EntityIndex build_entity_index(std::span<const Document> corpus, const KeywordOptions& options,
                                      ProfileMode mode = ProfileMode::Keywords, const TokenizerOptions& tokenizer = {},
                                      unsigned threads = 1) {
    std::map<std::string, std::vector<std::string>> sentences;
    std::set<std::string> all_entities;
    for (const auto& doc : corpus) {
        std::map<std::string, std::vector<std::vector<std::string>>> forms;
        for (const auto& m : doc.mentions) {
            auto& f = forms[m.entity_label];
            f.push_back(tokenize(m.entity_label));
            if (m.surface) f.push_back(tokenize(*m.surface));
        }
        for (const auto& [label, f] : forms) all_entities.insert(label);
        for (const auto& l : doc.links) {
            all_entities.insert(l.subject);
            all_entities.insert(l.objects.begin(), l.objects.end());
        }
        if (forms.empty()) continue;
        for (const auto& sentence : split_sentences(doc.text)) {
            const auto tokens = tokenize(sentence);
            for (const auto& [label, f] : forms)
                if (std::any_of(f.begin(), f.end(), [&](const auto& form) { return contains_token_run(tokens, form); }))
                    sentences[label].push_back(sentence);
        }
    }

    EntityIndex out;
    std::vector<std::string> labels;
    for (const auto& label : all_entities) {
        if (sentences.count(label))
            labels.push_back(label);
        else
            out.excluded.push_back(label);
    }
    std::vector<EntityVirtualDocument> docs(labels.size());
    parallel_for(labels.size(), threads, [&](std::size_t i, unsigned) {
        auto& vd = docs[i];
        vd.entity_label = labels[i];
        vd.text = join(sentences[labels[i]], " ");
        vd.profile = extract_keywords(labels[i], preprocess(vd.text, tokenizer), options);
    });
    for (auto& vd : docs) {
        out.index.add(vd.entity_label, index_terms(vd.profile, mode));
        out.documents.emplace(vd.entity_label, std::move(vd));
    }
    return out;
}

// --- Scoring ----------------------------------------------------------------

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

enum class Scorer { TfIdf, Bm25 };

/// ln(1 + N/df)
inline double tfidf_idf(std::size_t n, std::size_t df) {
    return std::log(1.0 + static_cast<double>(n) / static_cast<double>(df));
}

/// ln(1 + (N - df + 0.5) / (df + 0.5))
inline double bm25_idf(std::size_t n, std::size_t df) {
    return std::log(1.0 + (static_cast<double>(n) - static_cast<double>(df) + 0.5) / (static_cast<double>(df) + 0.5));
}

namespace detail {

template <typename TermScore>
RankedList score_terms(std::span<const std::string> query_terms, const InvertedIndex& index, TargetKind target,
                       TermScore&& term_score) {
    RankedList out;
    out.target = target;
    std::set<std::string> distinct(query_terms.begin(), query_terms.end());
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& term : distinct) {
        const auto postings = index.postings(term);
        if (postings.empty()) continue;
        for (const auto& p : postings) acc[p.item] += term_score(p, postings.size());
    }
    if (distinct.empty()) out.no_seeds = true;
    for (const auto& [slot, s] : acc) out.entries.push_back({index.item(slot), s});
    sort_entries(out.entries);
    return out;
}

} // namespace detail

/// Sum over distinct query terms of tf * ln(1 + N/df).
inline RankedList score_tfidf(std::span<const std::string> query_terms, const InvertedIndex& index,
                              TargetKind target = TargetKind::DocumentEdge) {
    const auto n = index.size();
    return detail::score_terms(query_terms, index, target, [&](const Posting& p, std::size_t df) {
        return static_cast<double>(p.tf) * tfidf_idf(n, df);
    });
}

/// Robertson BM25 over distinct query terms.
inline RankedList score_bm25(std::span<const std::string> query_terms, const InvertedIndex& index,
                             const Bm25Params& params = {}, TargetKind target = TargetKind::DocumentEdge) {
    const auto n = index.size();
    const double avgdl = index.avgdl();
    return detail::score_terms(query_terms, index, target, [&](const Posting& p, std::size_t df) {
        const double tf = p.tf;
        const double norm = 1.0 - params.b + params.b * static_cast<double>(index.length(p.item)) / avgdl;
        return bm25_idf(n, df) * tf * (params.k1 + 1.0) / (tf + params.k1 * norm);
    });
}

inline RankedList score_query(std::span<const std::string> query_terms, const InvertedIndex& index, Scorer scorer,
                              const Bm25Params& bm25 = {}, TargetKind target = TargetKind::DocumentEdge) {
    return scorer == Scorer::Bm25 ? score_bm25(query_terms, index, bm25, target) : score_tfidf(query_terms, index, target);
}

inline constexpr std::size_t kMoreLikeThisTerms = 25;

struct MoreLikeThisResult {
    RankedList ranking;
    std::vector<std::string> query_terms;
    std::vector<std::string> unresolved;
};

/// Concatenates the example entities' profiles (each keyword counts once), keeps
/// the `top_terms` terms with the highest TF-IDF over the entity index (with
/// tf = 1 this is IDF order, ties by term), and issues them as a query. The
/// examples are removed from the ranking.
inline MoreLikeThisResult more_like_this_completion(std::span<const std::string> entities, const EntityIndex& entity_index,
                                                    Scorer scorer = Scorer::Bm25, std::size_t top_terms = kMoreLikeThisTerms,
                                                    const Bm25Params& bm25 = {}) {
    MoreLikeThisResult out;
    out.ranking.target = TargetKind::EntityNode;
    std::set<std::string> pool;
    for (const auto& e : entities) {
        auto it = entity_index.documents.find(e);
        if (it == entity_index.documents.end()) {
            out.unresolved.push_back(e);
            continue;
        }
        for (const auto& k : it->second.profile.keywords) pool.insert(k.term);
    }
    if (pool.empty()) {
        out.ranking.no_seeds = true;
        return out;
    }

    const auto n = entity_index.index.size();
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& term : pool) {
        const auto df = entity_index.index.df(term);
        if (df == 0) continue;
        scored.emplace_back(tfidf_idf(n, df), term);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (scored.size() > top_terms) scored.resize(top_terms);
    for (auto& s : scored) out.query_terms.push_back(s.second);

    out.ranking = score_query(out.query_terms, entity_index.index, scorer, bm25, TargetKind::EntityNode);
    const std::set<std::string> exclude(entities.begin(), entities.end());
    std::erase_if(out.ranking.entries, [&](const RankedEntry& r) { return exclude.count(r.item_id) != 0; });
    return out;
}

} // namespace hgoe
