#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hgoe/indexer.hpp"
#include "hgoe/random.hpp"
#include "hgoe/synthetic.hpp"
#include "test_util.hpp"

using namespace hgoe;

namespace {

/// Profile with the given keywords, in order, and their term frequencies.
KeywordProfile profile(std::string doc_id, std::vector<std::pair<std::string, std::uint32_t>> terms) {
    KeywordProfile p;
    p.doc_id = std::move(doc_id);
    double score = 1.0;
    for (auto& [t, tf] : terms) {
        p.keywords.push_back({t, score});
        p.tf[t] = tf;
        score /= 2;
    }
    return p;
}

Document doc(std::string id, std::vector<std::string> mentions, std::vector<EntityLink> links = {}) {
    Document d;
    d.doc_id = std::move(id);
    for (auto& m : mentions) d.mentions.push_back({m, std::nullopt});
    d.links = std::move(links);
    return d;
}

std::set<std::string> labels(const Hypergraph& g, std::span<const NodeId> nodes) {
    std::set<std::string> out;
    for (auto v : nodes) out.insert(g.node_label(v));
    return out;
}

std::vector<std::set<std::string>> edges_of(const Hypergraph& g, EdgeKind kind) {
    std::vector<std::set<std::string>> out;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (g.edge_kind(e) == kind) out.push_back(labels(g, g.edge_nodes(e)));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(Indexer, SingleDocumentConstruction) {
    IndexBuilder b;
    b.index_document(profile("d1", {{"aa", 1}, {"bb", 1}}), doc("d1", {"aa bb"}));
    const auto g = b.finish();
    const auto s = g.stats();
    EXPECT_EQ(s.nodes(NodeKind::Term), 2u);
    EXPECT_EQ(s.nodes(NodeKind::Entity), 1u);
    EXPECT_EQ(s.edges(EdgeKind::Document), 1u);
    EXPECT_EQ(s.edges(EdgeKind::ContainedIn), 1u);
    EXPECT_EQ(s.total_edges, 2u);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (g.edge_kind(e) == EdgeKind::Document) {
            EXPECT_EQ(labels(g, g.edge_nodes(e)), (std::set<std::string>{"aa", "bb", "aa bb"}));
            EXPECT_EQ(g.edge_doc_id(e), "d1");
        } else {
            EXPECT_EQ(labels(g, g.tail(e)), (std::set<std::string>{"aa", "bb"}));
            EXPECT_EQ(labels(g, g.head(e)), (std::set<std::string>{"aa bb"}));
        }
    }
}

TEST(Indexer, RepeatedLinkGivesOneRelatedToEdge) {
    IndexBuilder b;
    const EntityLink link{"E1", {"E2"}, false};
    b.index_document(profile("d1", {{"x", 1}}), doc("d1", {"E1"}, {link}));
    b.index_document(profile("d2", {{"y", 1}}), doc("d2", {"E1"}, {link}));
    EXPECT_EQ(b.finish().stats().edges(EdgeKind::RelatedTo), 1u);
}

TEST(Indexer, FiveDocumentFixtureCounts) {
    IndexBuilder b;
    b.index_document(profile("d1", {{"graph", 2}, {"walk", 1}}), doc("d1", {"Alan Turing"}));
    b.index_document(profile("d2", {{"graph", 1}, {"search", 1}}),
                     doc("d2", {"Alan Turing", "Bletchley"}, {{"Alan Turing", {"Bletchley"}, false}}));
    b.index_document(profile("d3", {}), doc("d3", {}));
    b.index_document(profile("d4", {{"walk", 3}}), doc("d4", {}));
    b.index_document(profile("d5", {{"turing", 1}}),
                     doc("d5", {"Bletchley", "Enigma"},
                         {{"Alan Turing", {"Bletchley"}, true}, {"Enigma", {"Alan Turing"}, false}}));
    const auto report = b.report();
    const auto g = b.finish();
    const auto s = g.stats();
    // Terms: graph walk search turing + name terms alan bletchley enigma.
    EXPECT_EQ(s.nodes(NodeKind::Term), 7u);
    EXPECT_EQ(s.nodes(NodeKind::Entity), 3u);
    EXPECT_EQ(s.edges(EdgeKind::Document), 4u);
    EXPECT_EQ(s.edges(EdgeKind::ContainedIn), 3u);
    EXPECT_EQ(s.edges(EdgeKind::RelatedTo), 2u);
    EXPECT_EQ(s.total_edges, 9u);
    EXPECT_EQ(s.degenerate_edges, 1u);
    EXPECT_EQ(report.documents, 5u);
    EXPECT_EQ(report.empty_profiles, 1u);
    EXPECT_EQ(report.documents_without_edge, 1u);
    EXPECT_EQ(report.degenerate_document_edges, 1u);
    EXPECT_EQ(edges_of(g, EdgeKind::ContainedIn),
              (std::vector<std::set<std::string>>{{"Alan Turing", "alan", "turing"}, {"Bletchley", "bletchley"},
                                                  {"Enigma", "enigma"}}));
}

TEST(Indexer, EntityWithoutNameTermsCounted) {
    IndexBuilder b;
    b.index_document(profile("d1", {{"x", 1}}), doc("d1", {"The"}));
    EXPECT_EQ(b.report().entities_without_name_terms, 1u);
    EXPECT_EQ(b.finish().stats().edges(EdgeKind::ContainedIn), 0u);
}

TEST(Indexer, InsertionIsMonotone) {
    const auto c = generate_synthetic({60, 12, 5, 4});
    const auto profiles = compute_profiles(c.documents, {});
    IndexBuilder b;
    GraphStats last;
    for (std::size_t i = 0; i < c.documents.size(); ++i) {
        b.index_document(profiles[i], c.documents[i]);
        Hypergraph copy = b.graph();
        copy.seal();
        const auto s = copy.stats();
        EXPECT_GE(s.total_nodes, last.total_nodes);
        EXPECT_GE(s.total_edges, last.total_edges);
        last = s;
    }
}

TEST(Indexer, BuildIsDeterministicAcrossThreadCounts) {
    const auto c = generate_synthetic({80, 15, 5, 9});
    IndexConfig cfg;
    cfg.extensions = {Extension::TfBins};
    const auto one = build_index(c.documents, cfg, 1);
    const auto four = build_index(c.documents, cfg, 4);
    EXPECT_EQ(one.graph.serialize(), four.graph.serialize());
}

TEST(Synonyms, BothMembersIndexed) {
    IndexBuilder b;
    b.index_document(profile("d", {{"car", 1}, {"automobile", 1}}), doc("d", {}));
    const auto rep = b.extend_synonyms({{"car", "automobile"}});
    EXPECT_EQ(rep.edges_added, 1u);
    EXPECT_EQ(b.finish().stats().edges(EdgeKind::Synonym), 1u);
}

TEST(Synonyms, SingleIndexedMemberNeedsAddNew) {
    IndexBuilder off;
    off.index_document(profile("d", {{"car", 1}}), doc("d", {}));
    EXPECT_EQ(off.extend_synonyms({{"car", "automobile"}}).edges_added, 0u);

    IndexConfig cfg;
    cfg.add_new_synonyms = true;
    IndexBuilder on(cfg);
    on.index_document(profile("d", {{"car", 1}}), doc("d", {}));
    const auto rep = on.extend_synonyms({{"car", "automobile"}, {"boat", "ship"}});
    EXPECT_EQ(rep.edges_added, 1u);
    EXPECT_EQ(rep.nodes_added, 1u);
    EXPECT_FALSE(on.graph().find_node(NodeKind::Term, "boat").has_value());
}

TEST(Synonyms, OverlappingSynsetsFixture) {
    for (bool add_new : {false, true}) {
        IndexConfig cfg;
        cfg.add_new_synonyms = add_new;
        IndexBuilder b(cfg);
        b.index_document(profile("d", {{"car", 1}, {"automobile", 1}, {"auto", 1}, {"vehicle", 1}}), doc("d", {}));
        test::TempDir dir;
        const auto path = dir.write("syn.txt", "car automobile\nautomobile auto motorcar\ncar Vehicle truck\n\nAuto Automobile\n");
        const auto rep = b.extend_synonyms(read_synsets(path));
        const auto g = b.finish();
        // Without new nodes the last synset collapses onto the second one.
        EXPECT_EQ(rep.edges_added, add_new ? 4u : 3u);
        EXPECT_EQ(rep.synsets_skipped, add_new ? 0u : 1u);
        EXPECT_EQ(rep.nodes_added, add_new ? 2u : 0u);
        const auto edges = edges_of(g, EdgeKind::Synonym);
        if (add_new)
            EXPECT_EQ(edges, (std::vector<std::set<std::string>>{{"auto", "automobile"},
                                                                 {"auto", "automobile", "motorcar"},
                                                                 {"automobile", "car"},
                                                                 {"car", "truck", "vehicle"}}));
        else
            EXPECT_EQ(edges, (std::vector<std::set<std::string>>{
                                 {"auto", "automobile"}, {"automobile", "car"}, {"car", "vehicle"}}));
    }
}

TEST(Synonyms, EmptySourceWarns) {
    IndexBuilder b;
    const auto rep = b.extend_synonyms({});
    EXPECT_EQ(rep.edges_added, 0u);
    EXPECT_EQ(rep.warnings.size(), 1u);
}

TEST(Context, NoNeighbourAboveThreshold) {
    IndexBuilder b;
    b.index_document(profile("d", {{"aa", 1}, {"bb", 1}}), doc("d", {}));
    EmbeddingTable t;
    t.add("aa", {1.0f, 0.0f});
    t.add("bb", {0.0f, 1.0f});
    EXPECT_EQ(b.extend_context(t, 3, 0.5).edges_added, 0u);
}

TEST(Context, MutualNeighboursGiveOneEdge) {
    IndexBuilder b;
    b.index_document(profile("d", {{"aa", 1}, {"bb", 1}, {"cc", 1}}), doc("d", {}));
    EmbeddingTable t;
    t.add("aa", {1.0f, 0.1f});
    t.add("bb", {1.0f, 0.0f});
    t.add("cc", {-1.0f, 0.0f});
    const auto rep = b.extend_context(t, 1, 0.5);
    EXPECT_EQ(rep.edges_added, 1u);
    EXPECT_EQ(rep.duplicate_sets, 1u);
    EXPECT_EQ(edges_of(b.finish(), EdgeKind::Context), (std::vector<std::set<std::string>>{{"aa", "bb"}}));
}

TEST(Context, MatchesBruteForceCosineScan) {
    Rng rng(11);
    std::vector<std::string> words;
    std::vector<std::vector<float>> vecs;
    test::TempDir dir;
    std::string file = "10 3\n";
    for (int i = 0; i < 10; ++i) {
        words.push_back("w" + std::to_string(i));
        std::vector<float> v(3);
        for (auto& x : v) x = static_cast<float>(rng.uniform() * 2 - 1);
        file += words.back();
        for (auto x : v) file += " " + std::to_string(x);
        file += "\n";
        vecs.push_back(v);
    }
    const auto table = read_embeddings(dir.write("emb.txt", file));
    ASSERT_EQ(table.size(), 10u);

    const int k = 2;
    const double thr = 0.3;
    IndexBuilder b;
    std::vector<std::pair<std::string, std::uint32_t>> kws;
    for (int i = 0; i < 8; ++i) kws.push_back({words[static_cast<std::size_t>(i)], 1});  // w8, w9 stay out of the index
    kws.push_back({"novec", 1});
    b.index_document(profile("d", kws), doc("d", {}));
    const auto rep = b.extend_context(table, k, thr);
    EXPECT_EQ(rep.terms_without_vector, 1u);

    // Brute force over the eight indexed words, using the file's (rounded) values.
    auto cos = [&](std::size_t i, std::size_t j) {
        double dot = 0, ni = 0, nj = 0;
        for (int c = 0; c < 3; ++c) {
            const double a = std::stod(std::to_string(vecs[i][static_cast<std::size_t>(c)]));
            const double bb = std::stod(std::to_string(vecs[j][static_cast<std::size_t>(c)]));
            dot += a * bb;
            ni += a * a;
            nj += bb * bb;
        }
        return dot / std::sqrt(ni * nj);
    };
    std::set<std::set<std::string>> want;
    for (std::size_t i = 0; i < 8; ++i) {
        std::vector<std::pair<double, std::string>> near;
        for (std::size_t j = 0; j < 8; ++j)
            if (j != i && cos(i, j) >= thr) near.push_back({-cos(i, j), words[j]});
        std::sort(near.begin(), near.end());
        if (near.empty()) continue;
        std::set<std::string> group{words[i]};
        for (std::size_t n = 0; n < near.size() && n < static_cast<std::size_t>(k); ++n) group.insert(near[n].second);
        want.insert(group);
    }
    const auto got = edges_of(b.finish(), EdgeKind::Context);
    EXPECT_EQ(std::set<std::set<std::string>>(got.begin(), got.end()), want);
    EXPECT_EQ(got.size(), want.size());
}

TEST(Context, MissingFileIsFatal) { EXPECT_THROW(read_embeddings("/nonexistent/vectors.txt"), IoError); }

TEST(TfBins, MedianSplit) {
    const auto p = profile("d", {{"a", 5}, {"b", 1}, {"c", 1}, {"d", 4}});
    const auto bins = tf_bins_for(p, 2);
    EXPECT_EQ(bins.bins[0], (std::vector<std::string>{"b", "c"}));
    EXPECT_EQ(bins.bins[1], (std::vector<std::string>{"a", "d"}));

    IndexBuilder b;
    b.index_document(p, doc("d", {}));
    EXPECT_EQ(b.extend_tf_bins(std::vector<KeywordProfile>{p}, 2).edges_added, 2u);
    const auto g = b.finish();
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (g.edge_kind(e) != EdgeKind::TfBin) continue;
        const auto members = labels(g, g.edge_nodes(e));
        EXPECT_EQ(*g.edge_weight(e), members.count("a") ? 1.0 : 0.5);
        EXPECT_EQ(g.edge_doc_id(e), "d");
    }
}

TEST(TfBins, EqualTfsGoUp) {
    const auto bins = tf_bins_for(profile("d", {{"a", 2}, {"b", 2}, {"c", 2}}), 2);
    EXPECT_TRUE(bins.bins[0].empty());
    EXPECT_EQ(bins.bins[1].size(), 3u);
}

TEST(TfBins, SingleKeywordBinSkipped) {
    IndexBuilder b;
    const auto p = profile("d", {{"a", 1}});
    b.index_document(p, doc("d", {}));
    const auto rep = b.extend_tf_bins(std::vector<KeywordProfile>{p}, 2);
    EXPECT_EQ(rep.edges_added, 0u);
    EXPECT_EQ(rep.single_member_bins, 1u);
}

TEST(TfBins, TwentyDocumentsMatchSortAndSplit) {
    const auto c = generate_synthetic({20, 5, 2, 13});
    const auto profiles = compute_profiles(c.documents, {0.2, 4, {}});
    for (const auto& p : profiles) {
        std::vector<std::uint32_t> tfs;
        for (const auto& k : p.keywords) tfs.push_back(p.tf.at(k.term));
        std::sort(tfs.begin(), tfs.end());
        const auto n = tfs.size();
        const double median = n % 2 ? tfs[n / 2] : (tfs[n / 2 - 1] + tfs[n / 2]) / 2.0;
        std::vector<std::string> low, high;
        for (const auto& k : p.keywords) (p.tf.at(k.term) >= median ? high : low).push_back(k.term);
        std::sort(low.begin(), low.end());
        std::sort(high.begin(), high.end());
        const auto bins = tf_bins_for(p, 2);
        EXPECT_EQ(bins.bins[0], low) << p.doc_id;
        EXPECT_EQ(bins.bins[1], high) << p.doc_id;
    }
}

TEST(IndexConfig, Validation) {
    IndexConfig c;
    EXPECT_NO_THROW(c.validate());
    c.ratio = 0;
    EXPECT_THROW(c.validate(), ParameterError);
    c = {};
    c.extensions = {Extension::Syns};
    EXPECT_THROW(c.validate(), ParameterError);
    c = {};
    c.tf_bins = 1;
    EXPECT_THROW(c.validate(), ParameterError);
}
