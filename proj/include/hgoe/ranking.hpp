#pragma once

// Random walk score: r repeated walks of length at most l from every seed
// node, counting visits to every node entered and every hyperedge traversed,
// then ranking the elements of the requested target type by visit share.
// The four entity-oriented search tasks differ only in their seeds and target.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hgoe/corpus.hpp"
#include "hgoe/error.hpp"
#include "hgoe/hypergraph.hpp"
#include "hgoe/parallel.hpp"
#include "hgoe/random.hpp"
#include "hgoe/text.hpp"

namespace hgoe {

struct RwsParams {
    int walk_length = 2;
    int repeats = 10000;
    bool expansion = false;
    bool directed = true;
    bool weighted = false;
    /// Fatigue parameters are carried for configuration parity; only 0 is accepted.
    int node_fatigue = 0;
    int edge_fatigue = 0;
    std::uint64_t rng_seed = 42;
    unsigned threads = 1;

    void validate() const {
        if (walk_length < 1) throw ParameterError("walk length must be >= 1");
        if (repeats < 1) throw ParameterError("repeats must be >= 1");
        if (node_fatigue < 0 || edge_fatigue < 0) throw ParameterError("fatigue must be >= 0");
        if (node_fatigue != 0 || edge_fatigue != 0)
            throw ParameterError("node/edge fatigue other than 0 is not supported");
    }
};

enum class TargetKind { DocumentEdge, EntityNode, TermNode };

inline const char* to_string(TargetKind t) {
    switch (t) {
    case TargetKind::DocumentEdge: return "document";
    case TargetKind::EntityNode: return "entity";
    case TargetKind::TermNode: return "term";
    }
    return "?";
}

struct RankedEntry {
    std::string item_id;
    double score = 0.0;

    bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
    std::string topic_id;
    TargetKind target = TargetKind::DocumentEdge;
    std::vector<RankedEntry> entries;
    /// Set when the query resolved to no seed nodes.
    bool no_seeds = false;
    std::vector<std::string> unresolved;

    bool operator==(const RankedList&) const = default;
};

/// Orders by descending score, ascending item id among equal scores.
inline void sort_entries(std::vector<RankedEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item_id < b.item_id;
    });
}

// --- Seeds ------------------------------------------------------------------

/// Term nodes for the preprocessed query; with expansion, the entity nodes
/// sharing any hyperedge with those terms instead.
inline std::vector<NodeId> seeds_from_keyword_query(std::string_view query, const Hypergraph& graph, bool expansion,
                                                    const TokenizerOptions& tokenizer = {}) {
    std::set<NodeId> terms;
    for (const auto& t : preprocess(query, tokenizer))
        if (auto id = graph.find_node(NodeKind::Term, t)) terms.insert(*id);
    if (!expansion) return {terms.begin(), terms.end()};
    std::set<NodeId> entities;
    for (NodeId t : terms)
        for (EdgeId e : graph.incidence(t))
            for (NodeId v : graph.edge_nodes(e))
                if (graph.node_kind(v) == NodeKind::Entity) entities.insert(v);
    return {entities.begin(), entities.end()};
}

struct SeedResolution {
    std::vector<NodeId> seeds;
    std::vector<std::string> unresolved;
};

inline SeedResolution seeds_from_entities(std::span<const std::string> labels, const Hypergraph& graph) {
    std::set<NodeId> found;
    SeedResolution out;
    for (const auto& label : labels) {
        if (auto id = graph.find_node(NodeKind::Entity, label))
            found.insert(*id);
        else
            out.unresolved.push_back(label);
    }
    out.seeds.assign(found.begin(), found.end());
    return out;
}

// --- Walks ------------------------------------------------------------------

struct Step {
    EdgeId edge;
    NodeId node;

    bool operator==(const Step&) const = default;
};

/// One transition: pick a candidate edge (uniformly, or proportionally to
/// edge weight), then a destination uniformly from the edge's other side.
/// Returns nothing at a dead end.
inline std::optional<Step> walk_step(NodeId current, const Hypergraph& graph, const RwsParams& params, Rng& rng) {
    const auto candidates = graph.walk_candidates(current, params.directed);
    if (candidates.empty()) return std::nullopt;
    std::size_t pick;
    if (params.weighted) {
        const auto cumulative = graph.walk_cumulative_weights(current, params.directed);
        const double u = rng.uniform() * cumulative.back();
        pick = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        pick = std::min(pick, candidates.size() - 1);
    } else {
        pick = static_cast<std::size_t>(rng.below(candidates.size()));
    }
    const EdgeId e = candidates[pick];

    if (!graph.edge_directed(e)) {
        const auto members = graph.members(e);
        const auto self = static_cast<std::size_t>(std::lower_bound(members.begin(), members.end(), current) - members.begin());
        auto idx = static_cast<std::size_t>(rng.below(members.size() - 1));
        if (idx >= self) ++idx;
        return Step{e, members[idx]};
    }
    const auto tail = graph.tail(e);
    const bool forward = std::binary_search(tail.begin(), tail.end(), current);
    const auto dest = forward ? graph.head(e) : tail;
    return Step{e, dest[static_cast<std::size_t>(rng.below(dest.size()))]};
}

struct VisitCounts {
    std::map<NodeId, std::uint64_t> nodes;
    std::map<EdgeId, std::uint64_t> edges;

    bool operator==(const VisitCounts&) const = default;
};

namespace detail {

/// Walks are split into fixed-size blocks; each (seed node, block) pair owns
/// an RNG stream derived from the run seed, so the counts do not depend on
/// the number of workers or on the order in which seeds were given.
inline constexpr int kWalkBlock = 1024;

} // namespace detail

inline VisitCounts random_walks(std::span<const NodeId> seeds, const Hypergraph& graph, const RwsParams& params) {
    params.validate();
    std::vector<NodeId> unique(seeds.begin(), seeds.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (NodeId s : unique)
        if (s >= graph.node_count()) throw ParameterError("unknown seed node " + std::to_string(s));

    const auto blocks_per_seed = static_cast<std::size_t>((params.repeats + detail::kWalkBlock - 1) / detail::kWalkBlock);
    const auto work = unique.size() * blocks_per_seed;
    const auto workers = std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(params.threads), work));

    struct Local {
        std::unordered_map<NodeId, std::uint64_t> nodes;
        std::unordered_map<EdgeId, std::uint64_t> edges;
    };
    std::vector<Local> local(workers);
    parallel_for(work, static_cast<unsigned>(workers), [&](std::size_t item, unsigned worker) {
        const NodeId seed = unique[item / blocks_per_seed];
        const auto block = item % blocks_per_seed;
        const auto begin = block * detail::kWalkBlock;
        const auto end = std::min<std::size_t>(begin + detail::kWalkBlock, static_cast<std::size_t>(params.repeats));
        Rng rng(mix_seed(mix_seed(params.rng_seed, seed), block));
        auto& acc = local[worker];
        for (std::size_t w = begin; w < end; ++w) {
            NodeId at = seed;
            for (int step = 0; step < params.walk_length; ++step) {
                const auto next = walk_step(at, graph, params, rng);
                if (!next) break;
                ++acc.edges[next->edge];
                ++acc.nodes[next->node];
                at = next->node;
            }
        }
    });

    VisitCounts out;
    for (const auto& l : local) {
        for (const auto& [v, c] : l.nodes) out.nodes[v] += c;
        for (const auto& [e, c] : l.edges) out.edges[e] += c;
    }
    return out;
}

/// Ranks elements of `target` by their share of visits, after removing
/// `exclude` (entity labels). Scores of the returned entries sum to 1.
inline RankedList random_walk_score(std::span<const NodeId> seeds, const Hypergraph& graph, const RwsParams& params,
                                    TargetKind target, const std::set<std::string>& exclude = {}) {
    params.validate();
    RankedList out;
    out.target = target;
    if (seeds.empty()) {
        out.no_seeds = true;
        return out;
    }
    const auto visits = random_walks(seeds, graph, params);

    std::map<std::string, std::uint64_t> counts;
    if (target == TargetKind::DocumentEdge) {
        for (const auto& [e, c] : visits.edges)
            if (graph.edge_kind(e) == EdgeKind::Document) counts[graph.edge_doc_id(e)] += c;
    } else {
        const auto kind = target == TargetKind::EntityNode ? NodeKind::Entity : NodeKind::Term;
        for (const auto& [v, c] : visits.nodes)
            if (graph.node_kind(v) == kind) counts[graph.node_label(v)] += c;
    }
    for (const auto& x : exclude) counts.erase(x);

    std::uint64_t total = 0;
    for (const auto& [id, c] : counts) total += c;
    if (total == 0) return out;
    out.entries.reserve(counts.size());
    for (const auto& [id, c] : counts)
        out.entries.push_back({id, static_cast<double>(c) / static_cast<double>(total)});
    sort_entries(out.entries);
    return out;
}

// --- Tasks ------------------------------------------------------------------

enum class Task { Docs, Entities, RelatedEntities, EntityListCompletion };

inline const char* to_string(Task t) {
    switch (t) {
    case Task::Docs: return "docs";
    case Task::Entities: return "entities";
    case Task::RelatedEntities: return "ref";
    case Task::EntityListCompletion: return "elc";
    }
    return "?";
}

inline Task parse_task(const std::string& s) {
    if (s == "docs") return Task::Docs;
    if (s == "entities") return Task::Entities;
    if (s == "ref") return Task::RelatedEntities;
    if (s == "elc") return Task::EntityListCompletion;
    throw ParameterError("unknown task '" + s + "' (expected docs, entities, ref or elc)");
}

/// Whether a topic of this kind is a valid input for the task.
inline bool task_accepts(Task task, const Topic& topic) {
    switch (task) {
    case Task::Docs:
    case Task::Entities: return topic.kind == TopicKind::Keyword;
    case Task::RelatedEntities: return topic.kind != TopicKind::Keyword && topic.entities.size() == 1;
    case Task::EntityListCompletion: return topic.kind == TopicKind::EntitySet && !topic.entities.empty();
    }
    return false;
}

inline RankedList ad_hoc_document_retrieval(std::string_view query, const Hypergraph& graph, const RwsParams& params,
                                            const TokenizerOptions& tokenizer = {}) {
    const auto seeds = seeds_from_keyword_query(query, graph, params.expansion, tokenizer);
    return random_walk_score(seeds, graph, params, TargetKind::DocumentEdge);
}

inline RankedList ad_hoc_entity_retrieval(std::string_view query, const Hypergraph& graph, const RwsParams& params,
                                          const TokenizerOptions& tokenizer = {}) {
    const auto seeds = seeds_from_keyword_query(query, graph, params.expansion, tokenizer);
    return random_walk_score(seeds, graph, params, TargetKind::EntityNode);
}

/// Ranks entities similar to the examples; the examples never appear in the output.
inline RankedList entity_list_completion(std::span<const std::string> entities, const Hypergraph& graph,
                                         const RwsParams& params) {
    if (entities.empty()) throw ParameterError("entity list completion needs at least one entity");
    auto resolved = seeds_from_entities(entities, graph);
    const std::set<std::string> exclude(entities.begin(), entities.end());
    auto out = random_walk_score(resolved.seeds, graph, params, TargetKind::EntityNode, exclude);
    out.unresolved = std::move(resolved.unresolved);
    return out;
}

/// Entity list completion with a single example.
inline RankedList related_entity_finding(const std::string& entity, const Hypergraph& graph, const RwsParams& params) {
    const std::string one[] = {entity};
    return entity_list_completion(one, graph, params);
}

inline RankedList run_topic(const Topic& topic, Task task, const Hypergraph& graph, const RwsParams& params,
                            const TokenizerOptions& tokenizer = {}) {
    if (!task_accepts(task, topic))
        throw ParameterError(std::string("topic ") + topic.topic_id + " of kind " + to_string(topic.kind) +
                             " is not valid input for task " + to_string(task));
    RankedList out;
    switch (task) {
    case Task::Docs: out = ad_hoc_document_retrieval(*topic.keyword_query, graph, params, tokenizer); break;
    case Task::Entities: out = ad_hoc_entity_retrieval(*topic.keyword_query, graph, params, tokenizer); break;
    case Task::RelatedEntities: out = related_entity_finding(topic.entities.front(), graph, params); break;
    case Task::EntityListCompletion: out = entity_list_completion(topic.entities, graph, params); break;
    }
    out.topic_id = topic.topic_id;
    return out;
}

} // namespace hgoe
