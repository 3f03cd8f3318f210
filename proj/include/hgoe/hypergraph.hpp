#pragma once

// Mixed hypergraph of typed nodes (terms, entities) and typed hyperedges.
// Undirected hyperedges group a member set; directed hyperedges connect a tail
// set to a head set. The graph is built by a single writer, then sealed; a
// sealed graph is immutable and may be shared freely between threads.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hgoe/error.hpp"

namespace hgoe {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Term = 0, Entity = 1 };
inline constexpr std::size_t kNodeKindCount = 2;

enum class EdgeKind : std::uint8_t { Document = 0, RelatedTo, ContainedIn, Synonym, Context, TfBin };
inline constexpr std::size_t kEdgeKindCount = 6;

inline constexpr bool is_directed(EdgeKind kind) noexcept {
    return kind == EdgeKind::RelatedTo || kind == EdgeKind::ContainedIn;
}

inline constexpr const char* to_string(NodeKind kind) noexcept {
    return kind == NodeKind::Term ? "term" : "entity";
}

inline constexpr const char* to_string(EdgeKind kind) noexcept {
    switch (kind) {
    case EdgeKind::Document: return "document";
    case EdgeKind::RelatedTo: return "related_to";
    case EdgeKind::ContainedIn: return "contained_in";
    case EdgeKind::Synonym: return "synonym";
    case EdgeKind::Context: return "context";
    case EdgeKind::TfBin: return "tf_bin";
    }
    return "?";
}

enum class IncidenceRole {
    Any,           ///< every edge touching the node
    AsTail,        ///< directed edges with the node in their tail
    AsMemberOrTail ///< AsTail plus undirected edges containing the node
};

struct GraphStats {
    std::array<std::size_t, kNodeKindCount> nodes_by_kind{};
    std::array<std::size_t, kEdgeKindCount> edges_by_kind{};
    std::size_t total_nodes = 0;
    std::size_t total_edges = 0;
    /// Undirected edges with a single member (one-keyword documents).
    std::size_t degenerate_edges = 0;

    std::size_t nodes(NodeKind k) const { return nodes_by_kind[static_cast<std::size_t>(k)]; }
    std::size_t edges(EdgeKind k) const { return edges_by_kind[static_cast<std::size_t>(k)]; }
    bool operator==(const GraphStats&) const = default;
};

/// Edge weight used wherever an edge carries none.
inline constexpr double kDefaultEdgeWeight = 0.5;

/// On-disk format identifiers; see docs/index-format.md.
inline constexpr char kIndexMagic[8] = {'H', 'G', 'O', 'E', 'I', 'D', 'X', '\0'};
inline constexpr std::uint32_t kIndexVersion = 1;

namespace detail {

inline constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint32_t fourcc(const char (&s)[5]) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void raw(std::string_view s) { buf_.append(s); }
    std::string& buffer() { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        const auto n = u32();
        return std::string(take(n));
    }
    std::string_view take(std::size_t n) {
        if (n > data_.size() - pos_) throw FormatError("index truncated: needed " + std::to_string(n) +
                                                       " bytes at offset " + std::to_string(pos_));
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t offset() const { return pos_; }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

} // namespace detail

class Hypergraph {
public:
    Hypergraph() { edge_offset_.push_back(0); }

    // --- Build phase --------------------------------------------------------

    /// Returns the existing id when (kind, label) is already present.
    NodeId add_node(NodeKind kind, std::string_view label) {
        require_unsealed();
        if (label.empty()) throw ParameterError("node label must be non-empty");
        auto& table = symbols_[static_cast<std::size_t>(kind)];
        std::string key(label);
        if (auto it = table.find(key); it != table.end()) return it->second;
        const auto id = static_cast<NodeId>(node_kind_.size());
        node_kind_.push_back(kind);
        node_label_.push_back(key);
        table.emplace(std::move(key), id);
        return id;
    }

    EdgeId add_undirected(EdgeKind kind, std::vector<NodeId> members, std::optional<double> weight = {},
                          std::string doc_id = {}) {
        require_unsealed();
        if (is_directed(kind)) throw ParameterError(std::string(to_string(kind)) + " hyperedges are directed");
        normalize(members);
        if (members.empty()) throw ParameterError("undirected hyperedge needs at least one member");
        if (members.size() < 2 && kind != EdgeKind::Document)
            throw ParameterError(std::string(to_string(kind)) + " hyperedge needs at least two members");
        return push_edge(kind, false, members, {}, weight, std::move(doc_id));
    }

    EdgeId add_directed(EdgeKind kind, std::vector<NodeId> tail, std::vector<NodeId> head,
                        std::optional<double> weight = {}) {
        require_unsealed();
        if (!is_directed(kind)) throw ParameterError(std::string(to_string(kind)) + " hyperedges are undirected");
        normalize(tail);
        normalize(head);
        if (tail.empty() || head.empty()) throw ParameterError("directed hyperedge needs non-empty tail and head");
        return push_edge(kind, true, tail, head, weight, {});
    }

    void set_default_weight(double w) {
        require_unsealed();
        check_weight(w);
        default_weight_ = w;
    }

    /// Freezes the graph and builds incidence and traversal indexes.
    void seal() {
        require_unsealed();
        build_incidence();
        build_walk_index();
        sealed_ = true;
    }

    bool sealed() const noexcept { return sealed_; }

    // --- Lookup -------------------------------------------------------------

    std::size_t node_count() const noexcept { return node_kind_.size(); }
    std::size_t edge_count() const noexcept { return edge_kind_.size(); }
    double default_weight() const noexcept { return default_weight_; }

    std::optional<NodeId> find_node(NodeKind kind, std::string_view label) const {
        const auto& table = symbols_[static_cast<std::size_t>(kind)];
        auto it = table.find(std::string(label));
        if (it == table.end()) return std::nullopt;
        return it->second;
    }

    NodeKind node_kind(NodeId v) const { return node_kind_.at(v); }
    const std::string& node_label(NodeId v) const { return node_label_.at(v); }

    EdgeKind edge_kind(EdgeId e) const { return edge_kind_.at(e); }
    bool edge_directed(EdgeId e) const { return is_directed(edge_kind_.at(e)); }
    std::optional<double> edge_weight(EdgeId e) const { return edge_weight_.at(e); }
    double effective_weight(EdgeId e) const { return edge_weight_.at(e).value_or(default_weight_); }
    const std::string& edge_doc_id(EdgeId e) const { return edge_doc_.at(e); }

    /// All nodes of the edge: members, or tail followed by head.
    std::span<const NodeId> edge_nodes(EdgeId e) const {
        check_edge(e);
        return {edge_nodes_.data() + edge_offset_[e], edge_offset_[e + 1] - edge_offset_[e]};
    }
    std::span<const NodeId> members(EdgeId e) const { return edge_directed(e) ? std::span<const NodeId>{} : edge_nodes(e); }
    std::span<const NodeId> tail(EdgeId e) const {
        return edge_directed(e) ? edge_nodes(e).first(edge_split_[e]) : std::span<const NodeId>{};
    }
    std::span<const NodeId> head(EdgeId e) const {
        return edge_directed(e) ? edge_nodes(e).subspan(edge_split_[e]) : std::span<const NodeId>{};
    }

    /// Incident edges in ascending id order.
    std::vector<EdgeId> incident_edges(NodeId v, IncidenceRole role = IncidenceRole::Any) const {
        require_sealed();
        check_node(v);
        auto all = incidence(v);
        if (role == IncidenceRole::Any) return {all.begin(), all.end()};
        std::vector<EdgeId> out;
        for (EdgeId e : all) {
            if (edge_directed(e)) {
                auto t = tail(e);
                if (std::binary_search(t.begin(), t.end(), v)) out.push_back(e);
            } else if (role == IncidenceRole::AsMemberOrTail) {
                out.push_back(e);
            }
        }
        return out;
    }

    std::span<const EdgeId> incidence(NodeId v) const {
        require_sealed();
        check_node(v);
        return {incident_.data() + incident_offset_[v], incident_offset_[v + 1] - incident_offset_[v]};
    }

    /// Edges a walker at `v` may leave through: those with a non-empty
    /// destination set under the given direction mode, ascending id.
    std::span<const EdgeId> walk_candidates(NodeId v, bool directed) const {
        require_sealed();
        const auto& w = walk_[directed ? 1 : 0];
        return {w.edges.data() + w.offset[v], w.offset[v + 1] - w.offset[v]};
    }

    /// Running sums of effective weights aligned with walk_candidates().
    std::span<const double> walk_cumulative_weights(NodeId v, bool directed) const {
        require_sealed();
        const auto& w = walk_[directed ? 1 : 0];
        return {w.cumulative.data() + w.offset[v], w.offset[v + 1] - w.offset[v]};
    }

    GraphStats stats() const {
        GraphStats s;
        for (auto k : node_kind_) ++s.nodes_by_kind[static_cast<std::size_t>(k)];
        for (EdgeId e = 0; e < edge_count(); ++e) {
            ++s.edges_by_kind[static_cast<std::size_t>(edge_kind_[e])];
            if (!edge_directed(e) && edge_nodes(e).size() == 1) ++s.degenerate_edges;
        }
        s.total_nodes = node_count();
        s.total_edges = edge_count();
        return s;
    }

    // --- Persistence --------------------------------------------------------

    /// Serializes a sealed graph to the versioned, checksummed container.
    std::string serialize() const {
        require_sealed();
        using detail::fourcc;
        detail::ByteWriter payload;
        auto section = [&](std::uint32_t tag, auto&& fill) {
            detail::ByteWriter body;
            fill(body);
            payload.u32(tag);
            payload.u64(body.buffer().size());
            payload.raw(body.buffer());
        };

        std::vector<std::string_view> symbols;
        std::unordered_map<std::string_view, std::uint32_t> symbol_ids;
        auto intern = [&](std::string_view s) {
            auto [it, inserted] = symbol_ids.emplace(s, static_cast<std::uint32_t>(symbols.size()));
            if (inserted) symbols.push_back(s);
            return it->second;
        };
        std::vector<std::uint32_t> node_sym(node_count());
        for (NodeId v = 0; v < node_count(); ++v) node_sym[v] = intern(node_label_[v]);
        std::vector<std::uint32_t> doc_sym(edge_count(), kNoSymbol);
        for (EdgeId e = 0; e < edge_count(); ++e)
            if (!edge_doc_[e].empty()) doc_sym[e] = intern(edge_doc_[e]);

        section(fourcc("META"), [&](detail::ByteWriter& w) { w.f64(default_weight_); });
        section(fourcc("SYMS"), [&](detail::ByteWriter& w) {
            w.u32(static_cast<std::uint32_t>(symbols.size()));
            for (auto s : symbols) w.str(s);
        });
        section(fourcc("NODE"), [&](detail::ByteWriter& w) {
            w.u32(static_cast<std::uint32_t>(node_count()));
            for (NodeId v = 0; v < node_count(); ++v) {
                w.u8(static_cast<std::uint8_t>(node_kind_[v]));
                w.u32(node_sym[v]);
            }
        });
        section(fourcc("EDGE"), [&](detail::ByteWriter& w) {
            w.u32(static_cast<std::uint32_t>(edge_count()));
            for (EdgeId e = 0; e < edge_count(); ++e) {
                const bool directed = edge_directed(e);
                w.u8(static_cast<std::uint8_t>(edge_kind_[e]));
                w.u8(static_cast<std::uint8_t>((directed ? 1 : 0) | (edge_weight_[e] ? 2 : 0) |
                                               (doc_sym[e] != kNoSymbol ? 4 : 0)));
                w.f64(edge_weight_[e].value_or(0.0));
                w.u32(doc_sym[e]);
                auto nodes = edge_nodes(e);
                const auto first = directed ? edge_split_[e] : static_cast<std::uint32_t>(nodes.size());
                w.u32(first);
                w.u32(static_cast<std::uint32_t>(nodes.size()) - first);
                for (NodeId v : nodes) w.u32(v);
            }
        });
        section(fourcc("INCI"), [&](detail::ByteWriter& w) {
            w.u32(static_cast<std::uint32_t>(node_count()));
            for (NodeId v = 0; v < node_count(); ++v) {
                auto inc = incidence(v);
                w.u32(static_cast<std::uint32_t>(inc.size()));
                for (EdgeId e : inc) w.u32(e);
            }
        });

        detail::ByteWriter file;
        file.raw(std::string_view(kIndexMagic, sizeof kIndexMagic));
        file.u32(kIndexVersion);
        file.u32(5);
        file.u64(payload.buffer().size());
        file.raw(payload.buffer());
        file.u64(detail::fnv1a64(payload.buffer()));
        return std::move(file.buffer());
    }

    static Hypergraph deserialize(std::string_view bytes) {
        using detail::fourcc;
        detail::ByteReader header(bytes);
        if (header.remaining() < 24) throw FormatError("index truncated: header incomplete");
        if (header.take(8) != std::string_view(kIndexMagic, sizeof kIndexMagic))
            throw FormatError("not an index file (bad magic)");
        const auto version = header.u32();
        if (version != kIndexVersion)
            throw FormatError("unsupported index format version " + std::to_string(version) + " (expected " +
                              std::to_string(kIndexVersion) + ")");
        const auto section_count = header.u32();
        const auto payload_size = header.u64();
        if (header.remaining() < 8 || payload_size > header.remaining() - 8)
            throw FormatError("index truncated: payload declares " + std::to_string(payload_size) + " bytes, " +
                              std::to_string(header.remaining()) + " available including checksum");
        const auto payload = header.take(payload_size);
        const auto stored = header.u64();
        if (header.remaining() != 0) throw FormatError("trailing bytes after index checksum");
        if (stored != detail::fnv1a64(payload)) throw FormatError("index checksum mismatch (file is corrupt)");

        Hypergraph g;
        std::vector<std::string> symbols;
        std::vector<std::uint32_t> node_sym;
        std::vector<std::vector<EdgeId>> stored_incidence;
        bool seen_node = false, seen_edge = false, seen_inci = false;
        detail::ByteReader in(payload);
        for (std::uint32_t s = 0; s < section_count; ++s) {
            const auto tag = in.u32();
            const auto length = in.u64();
            detail::ByteReader body(in.take(length));
            if (tag == fourcc("META")) {
                g.default_weight_ = body.f64();
                check_weight(g.default_weight_);
            } else if (tag == fourcc("SYMS")) {
                const auto n = body.u32();
                symbols.reserve(n);
                for (std::uint32_t i = 0; i < n; ++i) symbols.push_back(body.str());
            } else if (tag == fourcc("NODE")) {
                const auto n = body.u32();
                for (std::uint32_t i = 0; i < n; ++i) {
                    const auto kind = body.u8();
                    const auto sym = body.u32();
                    if (kind >= kNodeKindCount) throw FormatError("invalid node kind " + std::to_string(kind));
                    if (sym >= symbols.size()) throw FormatError("node symbol out of range");
                    if (g.add_node(static_cast<NodeKind>(kind), symbols[sym]) != i)
                        throw FormatError("duplicate node label '" + symbols[sym] + "'");
                }
                seen_node = true;
            } else if (tag == fourcc("EDGE")) {
                if (!seen_node) throw FormatError("edge section precedes node section");
                const auto n = body.u32();
                for (std::uint32_t i = 0; i < n; ++i) {
                    const auto kind_raw = body.u8();
                    const auto flags = body.u8();
                    const auto weight = body.f64();
                    const auto doc = body.u32();
                    const auto first = body.u32();
                    const auto second = body.u32();
                    if (kind_raw >= kEdgeKindCount) throw FormatError("invalid edge kind " + std::to_string(kind_raw));
                    const auto kind = static_cast<EdgeKind>(kind_raw);
                    if (((flags & 1) != 0) != is_directed(kind)) throw FormatError("edge direction flag mismatch");
                    std::vector<NodeId> a(first), b(second);
                    for (auto& v : a) v = body.u32();
                    for (auto& v : b) v = body.u32();
                    for (auto v : a) g.check_node_format(v);
                    for (auto v : b) g.check_node_format(v);
                    std::optional<double> w;
                    if (flags & 2) w = weight;
                    std::string doc_id;
                    if (flags & 4) {
                        if (doc >= symbols.size()) throw FormatError("edge doc symbol out of range");
                        doc_id = symbols[doc];
                    }
                    try {
                        if (is_directed(kind))
                            g.add_directed(kind, std::move(a), std::move(b), w);
                        else
                            g.add_undirected(kind, std::move(a), w, std::move(doc_id));
                    } catch (const ParameterError& e) {
                        throw FormatError(std::string("invalid edge: ") + e.what());
                    }
                }
                seen_edge = true;
            } else if (tag == fourcc("INCI")) {
                const auto n = body.u32();
                stored_incidence.resize(n);
                for (auto& list : stored_incidence) {
                    list.resize(body.u32());
                    for (auto& e : list) e = body.u32();
                }
                seen_inci = true;
            } else {
                throw FormatError("unknown section tag " + std::to_string(tag));
            }
            if (body.remaining() != 0) throw FormatError("section has trailing bytes");
        }
        if (in.remaining() != 0) throw FormatError("payload has trailing bytes");
        if (!seen_node || !seen_edge || !seen_inci) throw FormatError("index is missing required sections");
        g.seal();
        if (stored_incidence.size() != g.node_count()) throw FormatError("incidence section size mismatch");
        for (NodeId v = 0; v < g.node_count(); ++v) {
            auto inc = g.incidence(v);
            if (!std::equal(inc.begin(), inc.end(), stored_incidence[v].begin(), stored_incidence[v].end()))
                throw FormatError("incidence section disagrees with edge list at node " + std::to_string(v));
        }
        return g;
    }

    void save(const std::string& path) const {
        const auto bytes = serialize();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write index file '" + path + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for index file '" + path + "'");
    }

    static Hypergraph load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open index file '" + path + "'");
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        try {
            return deserialize(bytes);
        } catch (const FormatError& e) {
            throw FormatError(path + ": " + e.what());
        }
    }

private:
    static constexpr std::uint32_t kNoSymbol = 0xFFFFFFFFu;

    struct WalkIndex {
        std::vector<std::uint64_t> offset;
        std::vector<EdgeId> edges;
        std::vector<double> cumulative;
    };

    static void check_weight(double w) {
        if (!(w > 0.0 && w <= 1.0)) throw ParameterError("weights must lie in (0,1]");
    }

    void require_unsealed() const {
        if (sealed_) throw StateError("hypergraph is sealed");
    }
    void require_sealed() const {
        if (!sealed_) throw StateError("hypergraph must be sealed first");
    }
    void check_node(NodeId v) const {
        if (v >= node_count()) throw ParameterError("unknown node id " + std::to_string(v));
    }
    void check_node_format(NodeId v) const {
        if (v >= node_count()) throw FormatError("edge references unknown node " + std::to_string(v));
    }
    void check_edge(EdgeId e) const {
        if (e >= edge_count()) throw ParameterError("unknown edge id " + std::to_string(e));
    }

    void normalize(std::vector<NodeId>& ids) const {
        for (auto v : ids) check_node(v);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }

    EdgeId push_edge(EdgeKind kind, bool directed, const std::vector<NodeId>& first, const std::vector<NodeId>& second,
                     std::optional<double> weight, std::string doc_id) {
        if (weight) check_weight(*weight);
        if (edge_count() >= kNoSymbol) throw StateError("edge id space exhausted");
        const auto id = static_cast<EdgeId>(edge_kind_.size());
        edge_kind_.push_back(kind);
        edge_weight_.push_back(weight);
        edge_doc_.push_back(std::move(doc_id));
        edge_nodes_.insert(edge_nodes_.end(), first.begin(), first.end());
        edge_nodes_.insert(edge_nodes_.end(), second.begin(), second.end());
        edge_split_.push_back(directed ? static_cast<std::uint32_t>(first.size()) : 0);
        edge_offset_.push_back(edge_nodes_.size());
        return id;
    }

    void build_incidence() {
        const auto n = node_count();
        std::vector<std::uint64_t> degree(n + 1, 0);
        auto each_distinct = [&](EdgeId e, auto&& fn) {
            auto nodes = edge_nodes(e);
            if (!edge_directed(e)) {
                for (auto v : nodes) fn(v);
                return;
            }
            auto t = tail(e), h = head(e);
            for (auto v : t) fn(v);
            for (auto v : h)
                if (!std::binary_search(t.begin(), t.end(), v)) fn(v);
        };
        for (EdgeId e = 0; e < edge_count(); ++e) each_distinct(e, [&](NodeId v) { ++degree[v + 1]; });
        for (std::size_t v = 0; v < n; ++v) degree[v + 1] += degree[v];
        incident_offset_ = degree;
        incident_.assign(incident_offset_[n], 0);
        std::vector<std::uint64_t> cursor(incident_offset_.begin(), incident_offset_.end() - 1);
        // Edges are visited in ascending id order, so every list comes out sorted.
        for (EdgeId e = 0; e < edge_count(); ++e) each_distinct(e, [&](NodeId v) { incident_[cursor[v]++] = e; });
    }

    // Destination rules: undirected edges lead to the other members; directed
    // edges lead forward to the head when the node is in the tail, and (only
    // when direction is ignored) backward to the tail otherwise. Edges whose
    // destination set would be empty are not candidates.
    void build_walk_index() {
        const auto n = node_count();
        for (int mode = 0; mode < 2; ++mode) {
            const bool directed = mode == 1;
            auto& w = walk_[mode];
            w.offset.assign(n + 1, 0);
            w.edges.clear();
            w.cumulative.clear();
            for (NodeId v = 0; v < n; ++v) {
                double running = 0.0;
                for (EdgeId e : incidence_unchecked(v)) {
                    bool candidate;
                    if (!edge_directed(e)) {
                        candidate = edge_nodes(e).size() >= 2;
                    } else {
                        auto t = tail(e);
                        candidate = !directed || std::binary_search(t.begin(), t.end(), v);
                    }
                    if (!candidate) continue;
                    running += effective_weight(e);
                    w.edges.push_back(e);
                    w.cumulative.push_back(running);
                }
                w.offset[v + 1] = w.edges.size();
            }
        }
    }

    std::span<const EdgeId> incidence_unchecked(NodeId v) const {
        return {incident_.data() + incident_offset_[v], incident_offset_[v + 1] - incident_offset_[v]};
    }

    bool sealed_ = false;
    double default_weight_ = kDefaultEdgeWeight;

    std::vector<NodeKind> node_kind_;
    std::vector<std::string> node_label_;
    std::array<std::unordered_map<std::string, NodeId>, kNodeKindCount> symbols_;

    std::vector<EdgeKind> edge_kind_;
    std::vector<std::optional<double>> edge_weight_;
    std::vector<std::string> edge_doc_;
    std::vector<NodeId> edge_nodes_;
    std::vector<std::uint64_t> edge_offset_;
    std::vector<std::uint32_t> edge_split_;

    std::vector<std::uint64_t> incident_offset_{0};
    std::vector<EdgeId> incident_;
    std::array<WalkIndex, 2> walk_;
};

} // namespace hgoe
