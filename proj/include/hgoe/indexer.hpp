#pragma once

// Builds the hypergraph-of-entity from keyword profiles and entity
// annotations, and applies the optional synonym, context and TF-bin
// extensions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hgoe/corpus.hpp"
#include "hgoe/error.hpp"
#include "hgoe/hypergraph.hpp"
#include "hgoe/keywords.hpp"
#include "hgoe/parallel.hpp"
#include "hgoe/text.hpp"

namespace hgoe {

enum class Extension { Syns, Context, TfBins };

struct IndexConfig {
    double ratio = 0.05;
    int window = 4;
    std::set<Extension> extensions;
    int tf_bins = 2;
    int context_k = 5;
    double context_threshold = 0.5;
    double default_weight = kDefaultEdgeWeight;
    /// Also insert out-of-index synonyms of indexed terms as new term nodes.
    bool add_new_synonyms = false;
    std::string synonyms_path;
    std::string embeddings_path;
    TokenizerOptions tokenizer;
    PageRankOptions pagerank;

    KeywordOptions keyword_options() const { return {ratio, window, pagerank}; }

    void validate() const {
        if (!(ratio > 0.0 && ratio <= 1.0)) throw ParameterError("ratio must lie in (0,1]");
        if (window < 2) throw ParameterError("window must be >= 2");
        if (tf_bins < 2) throw ParameterError("tf_bins must be >= 2");
        if (context_k < 1) throw ParameterError("context k must be >= 1");
        if (!(default_weight > 0.0 && default_weight <= 1.0)) throw ParameterError("default weight must lie in (0,1]");
        if (extensions.count(Extension::Syns) && synonyms_path.empty())
            throw ParameterError("synonym extension needs a synset file");
        if (extensions.count(Extension::Context) && embeddings_path.empty())
            throw ParameterError("context extension needs an embedding file");
    }
};

// --- Extension inputs -------------------------------------------------------

/// One synonym group per line, whitespace-separated, lowercased on read.
inline std::vector<std::vector<std::string>> read_synsets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synset file '" + path + "'");
    std::vector<std::vector<std::string>> synsets;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<std::string> group;
        for (std::string w; ss >> w;) {
            for (auto& c : w)
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            group.push_back(std::move(w));
        }
        if (!group.empty()) synsets.push_back(std::move(group));
    }
    return synsets;
}

/// Word vectors, L2-normalized at load time so cosine similarity is a dot product.
class EmbeddingTable {
public:
    void add(std::string word, std::vector<float> vec) {
        if (dim_ == 0) dim_ = vec.size();
        if (vec.size() != dim_ || dim_ == 0) throw ParseError("embedding for '" + word + "' has wrong dimension");
        double norm = 0.0;
        for (float x : vec) norm += static_cast<double>(x) * x;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (auto& x : vec) x = static_cast<float>(x / norm);
        const auto slot = index_.size();
        if (!index_.emplace(std::move(word), slot).second) return;
        data_.insert(data_.end(), vec.begin(), vec.end());
    }

    const float* find(const std::string& word) const {
        auto it = index_.find(word);
        return it == index_.end() ? nullptr : data_.data() + it->second * dim_;
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return index_.size(); }

private:
    std::size_t dim_ = 0;
    std::map<std::string, std::size_t> index_;
    std::vector<float> data_;
};

/// word2vec text format: `word v1 v2 ...` per line; an optional `count dim`
/// header line is skipped.
inline EmbeddingTable read_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file '" + path + "'");
    EmbeddingTable table;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word)) continue;
        std::vector<float> vec;
        for (float x; ss >> x;) vec.push_back(x);
        if (!ss.eof()) throw ParseError("non-numeric embedding component", n);
        if (n == 1 && vec.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos) continue;
        try {
            table.add(std::move(word), std::move(vec));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), n);
        }
    }
    return table;
}

inline double cosine(const float* a, const float* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

// --- Reports ----------------------------------------------------------------

struct SynonymReport {
    std::size_t edges_added = 0;
    std::size_t nodes_added = 0;
    std::size_t synsets_skipped = 0;
    std::vector<std::string> warnings;
};

struct ContextReport {
    std::size_t edges_added = 0;
    std::size_t duplicate_sets = 0;
    std::size_t terms_without_vector = 0;
};

struct TfBinReport {
    std::size_t edges_added = 0;
    std::size_t single_member_bins = 0;
};

/// Partition of one document's keywords into TF bins; bin 0 holds the least
/// frequent terms.
struct TfBinning {
    std::vector<std::vector<std::string>> bins;
};

/// Quantile thresholds over the keyword TFs (linear interpolation; the single
/// threshold for two bins is the median). A term goes to the bin equal to the
/// number of thresholds its TF reaches, so ties move to the upper bin.
inline TfBinning tf_bins_for(const KeywordProfile& profile, int num_bins) {
    if (num_bins < 2) throw ParameterError("tf_bins must be >= 2");
    TfBinning out;
    out.bins.resize(static_cast<std::size_t>(num_bins));
    if (profile.keywords.empty()) return out;

    auto tf_of = [&](const std::string& term) -> double {
        auto it = profile.tf.find(term);
        return it == profile.tf.end() ? 0.0 : static_cast<double>(it->second);
    };
    std::vector<double> tfs;
    for (const auto& k : profile.keywords) tfs.push_back(tf_of(k.term));
    std::sort(tfs.begin(), tfs.end());
    const auto n = tfs.size();
    std::vector<double> thresholds;
    for (int b = 1; b < num_bins; ++b) {
        const double h = static_cast<double>(n - 1) * b / num_bins;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, n - 1);
        thresholds.push_back(tfs[lo] + (h - static_cast<double>(lo)) * (tfs[hi] - tfs[lo]));
    }
    for (const auto& k : profile.keywords) {
        const double tf = tf_of(k.term);
        std::size_t bin = 0;
        for (double t : thresholds)
            if (tf >= t) ++bin;
        out.bins[bin].push_back(k.term);
    }
    for (auto& b : out.bins) std::sort(b.begin(), b.end());
    return out;
}

struct IndexReport {
    std::size_t documents = 0;
    std::size_t empty_profiles = 0;
    std::size_t documents_without_edge = 0;
    std::size_t degenerate_document_edges = 0;
    std::size_t entities_without_name_terms = 0;
    SynonymReport synonyms;
    ContextReport context;
    TfBinReport tf_bins;
};

// --- Builder ----------------------------------------------------------------

class IndexBuilder {
public:
    explicit IndexBuilder(IndexConfig config = {}) : config_(std::move(config)) {
        config_.validate();
        graph_.set_default_weight(config_.default_weight);
    }

    /// Adds one document: its keyword and entity nodes, the document
    /// hyperedge, subject-grouped related-to edges and the contained-in edge of
    /// every newly seen entity.
    void index_document(const KeywordProfile& profile, const Document& doc) {
        ++report_.documents;
        if (profile.empty()) ++report_.empty_profiles;

        std::vector<NodeId> members;
        for (const auto& k : profile.keywords) members.push_back(graph_.add_node(NodeKind::Term, k.term));
        for (const auto& m : doc.mentions) members.push_back(entity_node(m.entity_label));
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());

        if (members.empty()) {
            ++report_.documents_without_edge;
        } else {
            if (members.size() == 1) ++report_.degenerate_document_edges;
            graph_.add_undirected(EdgeKind::Document, members, std::nullopt, doc.doc_id);
        }

        for (const auto& link : doc.links) {
            std::vector<NodeId> tail{entity_node(link.subject)};
            std::vector<NodeId> head;
            for (const auto& o : link.objects) head.push_back(entity_node(o));
            add_directed_once(EdgeKind::RelatedTo, std::move(tail), std::move(head));
        }
    }

    SynonymReport extend_synonyms(const std::vector<std::vector<std::string>>& synsets) {
        SynonymReport rep;
        if (synsets.empty()) {
            rep.warnings.push_back("synset source is empty; synonym extension skipped");
            report_.synonyms = rep;
            return rep;
        }
        std::set<std::vector<NodeId>> seen;
        for (const auto& synset : synsets) {
            std::vector<NodeId> members;
            std::vector<std::string> missing;
            for (const auto& word : synset) {
                if (auto id = graph_.find_node(NodeKind::Term, word))
                    members.push_back(*id);
                else
                    missing.push_back(word);
            }
            if (!members.empty() && config_.add_new_synonyms) {
                for (const auto& word : missing) {
                    const auto before = graph_.node_count();
                    members.push_back(graph_.add_node(NodeKind::Term, word));
                    if (graph_.node_count() > before) ++rep.nodes_added;
                }
            }
            std::sort(members.begin(), members.end());
            members.erase(std::unique(members.begin(), members.end()), members.end());
            if (members.size() < 2 || !seen.insert(members).second) {
                ++rep.synsets_skipped;
                continue;
            }
            graph_.add_undirected(EdgeKind::Synonym, members);
            ++rep.edges_added;
        }
        report_.synonyms = rep;
        return rep;
    }

    /// Groups every term with its k most similar in-index terms whose cosine
    /// similarity is at least `threshold`.
    ContextReport extend_context(const EmbeddingTable& embeddings, int k, double threshold, unsigned threads = 1) {
        if (k < 1) throw ParameterError("context k must be >= 1");
        ContextReport rep;
        struct Candidate {
            NodeId node;
            const float* vec;
        };
        std::vector<Candidate> terms;
        for (NodeId v = 0; v < graph_.node_count(); ++v) {
            if (graph_.node_kind(v) != NodeKind::Term) continue;
            if (const float* vec = embeddings.find(graph_.node_label(v)))
                terms.push_back({v, vec});
            else
                ++rep.terms_without_vector;
        }

        const auto dim = embeddings.dim();
        std::vector<std::vector<NodeId>> groups(terms.size());
        parallel_for(terms.size(), threads, [&](std::size_t i, unsigned) {
            std::vector<std::pair<double, std::size_t>> scored;
            for (std::size_t j = 0; j < terms.size(); ++j) {
                if (j == i) continue;
                const double sim = cosine(terms[i].vec, terms[j].vec, dim);
                if (sim >= threshold) scored.emplace_back(sim, j);
            }
            const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
            std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                              [&](const auto& a, const auto& b) {
                                  if (a.first != b.first) return a.first > b.first;
                                  return graph_.node_label(terms[a.second].node) < graph_.node_label(terms[b.second].node);
                              });
            if (keep == 0) return;
            auto& g = groups[i];
            g.push_back(terms[i].node);
            for (std::size_t s = 0; s < keep; ++s) g.push_back(terms[scored[s].second].node);
            std::sort(g.begin(), g.end());
        });

        std::set<std::vector<NodeId>> seen;
        for (auto& g : groups) {
            if (g.size() < 2) continue;
            if (!seen.insert(g).second) {
                ++rep.duplicate_sets;
                continue;
            }
            graph_.add_undirected(EdgeKind::Context, g);
            ++rep.edges_added;
        }
        report_.context = rep;
        return rep;
    }

    /// One weighted TF-bin edge per non-empty bin of each document; bins with a
    /// single term are skipped.
    TfBinReport extend_tf_bins(std::span<const KeywordProfile> profiles, int num_bins) {
        TfBinReport rep;
        for (const auto& profile : profiles) {
            const auto binning = tf_bins_for(profile, num_bins);
            for (std::size_t b = 0; b < binning.bins.size(); ++b) {
                const auto& terms = binning.bins[b];
                if (terms.empty()) continue;
                if (terms.size() < 2) {
                    ++rep.single_member_bins;
                    continue;
                }
                std::vector<NodeId> members;
                for (const auto& t : terms) members.push_back(graph_.add_node(NodeKind::Term, t));
                const double weight = static_cast<double>(b + 1) / num_bins;
                graph_.add_undirected(EdgeKind::TfBin, members, weight, profile.doc_id);
                ++rep.edges_added;
            }
        }
        report_.tf_bins = rep;
        return rep;
    }

    const Hypergraph& graph() const { return graph_; }
    const IndexReport& report() const { return report_; }
    const IndexConfig& config() const { return config_; }

    /// Seals the graph and hands it over; the builder is spent afterwards.
    Hypergraph finish() {
        graph_.seal();
        return std::move(graph_);
    }

private:
    NodeId entity_node(const std::string& label) {
        const auto before = graph_.node_count();
        const NodeId id = graph_.add_node(NodeKind::Entity, label);
        if (graph_.node_count() > before) add_contained_in(id, label);
        return id;
    }

    // Terms of the entity's name point at the entity; created once per entity.
    void add_contained_in(NodeId entity, const std::string& label) {
        std::vector<NodeId> tail;
        for (const auto& term : preprocess(label, config_.tokenizer)) tail.push_back(graph_.add_node(NodeKind::Term, term));
        if (tail.empty()) {
            ++report_.entities_without_name_terms;
            return;
        }
        add_directed_once(EdgeKind::ContainedIn, std::move(tail), {entity});
    }

    void add_directed_once(EdgeKind kind, std::vector<NodeId> tail, std::vector<NodeId> head) {
        std::sort(tail.begin(), tail.end());
        tail.erase(std::unique(tail.begin(), tail.end()), tail.end());
        std::sort(head.begin(), head.end());
        head.erase(std::unique(head.begin(), head.end()), head.end());
        if (!directed_seen_.emplace(kind, tail, head).second) return;
        graph_.add_directed(kind, std::move(tail), std::move(head));
    }

    IndexConfig config_;
    Hypergraph graph_;
    IndexReport report_;
    std::set<std::tuple<EdgeKind, std::vector<NodeId>, std::vector<NodeId>>> directed_seen_;
};

// --- Whole-corpus build -----------------------------------------------------

inline std::vector<KeywordProfile> compute_profiles(std::span<const Document> docs, const KeywordOptions& options,
                                                    const TokenizerOptions& tokenizer = {}, unsigned threads = 1) {
    std::vector<KeywordProfile> profiles(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i, unsigned) {
        const auto tokens = preprocess(docs[i].text, tokenizer);
        profiles[i] = extract_keywords(docs[i].doc_id, tokens, options);
    });
    return profiles;
}

struct BuiltIndex {
    Hypergraph graph;
    std::vector<KeywordProfile> profiles;
    IndexReport report;
};

/// Profiles are computed in parallel; graph insertion runs in corpus order on
/// the calling thread, so the result does not depend on `threads`.
inline BuiltIndex build_index(std::span<const Document> docs, const IndexConfig& config, unsigned threads = 1) {
    config.validate();
    IndexBuilder builder(config);
    auto profiles = compute_profiles(docs, config.keyword_options(), config.tokenizer, threads);
    for (std::size_t i = 0; i < docs.size(); ++i) builder.index_document(profiles[i], docs[i]);
    if (config.extensions.count(Extension::Syns)) builder.extend_synonyms(read_synsets(config.synonyms_path));
    if (config.extensions.count(Extension::Context))
        builder.extend_context(read_embeddings(config.embeddings_path), config.context_k, config.context_threshold,
                               threads);
    if (config.extensions.count(Extension::TfBins)) builder.extend_tf_bins(profiles, config.tf_bins);
    auto report = builder.report();
    return {builder.finish(), std::move(profiles), std::move(report)};
}

} // namespace hgoe
