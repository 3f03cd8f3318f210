#pragma once

// Simplified TextRank: a co-occurrence graph over the preprocessed tokens of
// one document, PageRank over that graph, and a ratio cutoff that keeps the
// top-ranked terms as the document's keyword profile. No part-of-speech
// filtering and no multi-word keyword collapse.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hgoe/error.hpp"

namespace hgoe {

/// Undirected term graph. `terms` is sorted; edges are keyed by (i, j) with
/// i < j over indexes into `terms`, so the graph is symmetric by construction.
struct CooccurrenceGraph {
    std::vector<std::string> terms;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> edges;

    std::size_t index_of(const std::string& term) const {
        auto it = std::lower_bound(terms.begin(), terms.end(), term);
        if (it == terms.end() || *it != term) throw ParameterError("term '" + term + "' not in graph");
        return static_cast<std::size_t>(it - terms.begin());
    }

    /// Co-occurrence count between two terms, 0 when not adjacent.
    std::uint32_t count(const std::string& a, const std::string& b) const {
        auto i = static_cast<std::uint32_t>(index_of(a));
        auto j = static_cast<std::uint32_t>(index_of(b));
        if (i > j) std::swap(i, j);
        auto it = edges.find({i, j});
        return it == edges.end() ? 0 : it->second;
    }
};

/// Every token pair at positional distance < window adds one co-occurrence.
inline CooccurrenceGraph build_cooccurrence_graph(std::span<const std::string> tokens, int window) {
    if (window < 2) throw ParameterError("co-occurrence window must be >= 2");
    CooccurrenceGraph g;
    g.terms.assign(tokens.begin(), tokens.end());
    std::sort(g.terms.begin(), g.terms.end());
    g.terms.erase(std::unique(g.terms.begin(), g.terms.end()), g.terms.end());

    std::vector<std::uint32_t> ids(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i)
        ids[i] = static_cast<std::uint32_t>(
            std::lower_bound(g.terms.begin(), g.terms.end(), tokens[i]) - g.terms.begin());

    const auto w = static_cast<std::size_t>(window);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size() && j - i < w; ++j) {
            auto a = ids[i], b = ids[j];
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            ++g.edges[{a, b}];
        }
    }
    return g;
}

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-9;
    int max_iter = 100;
    /// Use co-occurrence counts as transition weights; false treats every edge as 1.
    bool weighted = true;
};

/// Power iteration on the undirected co-occurrence graph. Mass held by nodes
/// without neighbours is spread uniformly, so scores always sum to 1.
inline std::vector<double> pagerank_vector(const CooccurrenceGraph& graph, const PageRankOptions& options = {}) {
    if (graph.terms.empty()) throw ParameterError("pagerank on an empty graph");
    if (!(options.damping > 0.0 && options.damping < 1.0)) throw ParameterError("damping must lie in (0,1)");
    if (!(options.tol > 0.0)) throw ParameterError("tolerance must be positive");
    if (options.max_iter < 1) throw ParameterError("max_iter must be >= 1");

    const std::size_t n = graph.terms.size();
    struct Arc {
        std::uint32_t to;
        double weight;
    };
    std::vector<std::vector<Arc>> adj(n);
    std::vector<double> strength(n, 0.0);
    for (const auto& [key, count] : graph.edges) {
        const double w = options.weighted ? static_cast<double>(count) : 1.0;
        adj[key.first].push_back({key.second, w});
        adj[key.second].push_back({key.first, w});
        strength[key.first] += w;
        strength[key.second] += w;
    }

    const double d = options.damping;
    const double nd = static_cast<double>(n);
    std::vector<double> rank(n, 1.0 / nd), next(n);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        double dangling = 0.0;
        for (std::size_t v = 0; v < n; ++v)
            if (strength[v] == 0.0) dangling += rank[v];
        const double base = (1.0 - d) / nd + d * dangling / nd;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t u = 0; u < n; ++u) {
            if (strength[u] == 0.0) continue;
            const double share = d * rank[u] / strength[u];
            for (const auto& arc : adj[u]) next[arc.to] += share * arc.weight;
        }
        double delta = 0.0;
        for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - rank[v]);
        rank.swap(next);
        if (delta < options.tol) break;
    }
    return rank;
}

inline std::map<std::string, double> pagerank(const CooccurrenceGraph& graph, const PageRankOptions& options = {}) {
    const auto rank = pagerank_vector(graph, options);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < rank.size(); ++i) out.emplace(graph.terms[i], rank[i]);
    return out;
}

struct KeywordOptions {
    double ratio = 0.05;
    int window = 4;
    PageRankOptions pagerank;
};

struct Keyword {
    std::string term;
    double score = 0.0;

    bool operator==(const Keyword&) const = default;
};

struct KeywordProfile {
    std::string doc_id;
    /// Descending score; equal scores ordered by term.
    std::vector<Keyword> keywords;
    double ratio = 0.05;
    int window = 4;
    /// Term frequencies over the full preprocessed token list, before the cutoff.
    std::map<std::string, std::uint32_t> tf;

    bool empty() const { return keywords.empty(); }
    bool operator==(const KeywordProfile&) const = default;
};

/// Number of keywords retained: ceil(ratio * distinct), at least 1 when any
/// term exists. The epsilon guards against products such as 0.3 * 10 landing
/// one ulp above an integer.
inline std::size_t keyword_cutoff(double ratio, std::size_t distinct_terms) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ParameterError("keyword ratio must lie in (0,1]");
    if (distinct_terms == 0) return 0;
    const double exact = ratio * static_cast<double>(distinct_terms);
    auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
    return std::clamp<std::size_t>(k, 1, distinct_terms);
}

inline KeywordProfile extract_keywords(std::string doc_id, std::span<const std::string> tokens,
                                       const KeywordOptions& options = {}) {
    keyword_cutoff(options.ratio, 1);
    if (options.window < 2) throw ParameterError("co-occurrence window must be >= 2");

    KeywordProfile profile;
    profile.doc_id = std::move(doc_id);
    profile.ratio = options.ratio;
    profile.window = options.window;
    for (const auto& t : tokens) ++profile.tf[t];
    if (tokens.empty()) return profile;

    const auto graph = build_cooccurrence_graph(tokens, options.window);
    const auto rank = pagerank_vector(graph, options.pagerank);

    // Scores are compared at 1e-12 resolution so that terms in symmetric graph
    // positions tie exactly and fall back to lexicographic order.
    std::vector<std::size_t> order(rank.size());
    std::vector<long long> key(rank.size());
    for (std::size_t i = 0; i < rank.size(); ++i) {
        order[i] = i;
        key[i] = std::llround(rank[i] * 1e12);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] > key[b];
        return graph.terms[a] < graph.terms[b];
    });

    const auto keep = keyword_cutoff(options.ratio, graph.terms.size());
    profile.keywords.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) profile.keywords.push_back({graph.terms[order[i]], rank[order[i]]});
    return profile;
}

// --- Serialization ----------------------------------------------------------

inline nlohmann::json to_json_value(const KeywordProfile& p) {
    nlohmann::json kws = nlohmann::json::array();
    for (const auto& k : p.keywords) kws.push_back(nlohmann::json::array({k.term, k.score}));
    return {{"doc_id", p.doc_id}, {"ratio", p.ratio}, {"window", p.window}, {"keywords", kws}, {"tf", p.tf}};
}

inline KeywordProfile profile_from_json(const nlohmann::json& j) {
    KeywordProfile p;
    p.doc_id = j.at("doc_id").get<std::string>();
    p.ratio = j.at("ratio").get<double>();
    p.window = j.at("window").get<int>();
    for (const auto& k : j.at("keywords")) p.keywords.push_back({k.at(0).get<std::string>(), k.at(1).get<double>()});
    p.tf = j.at("tf").get<std::map<std::string, std::uint32_t>>();
    return p;
}

} // namespace hgoe
