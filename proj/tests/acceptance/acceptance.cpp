// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <sys/wait.h>

#include "hgoe/hgoe.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hgoe;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            failures.push_back(what);
            pass = false;
        }
    }
};

unsigned hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// --- 1 ----------------------------------------------------------------------

void pagerank_oracle(Outcome& o) {
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const auto n = 2 + rng.below(11);
        std::vector<std::string> tokens;
        const auto len = 2 + rng.below(40);
        for (std::size_t i = 0; i < len; ++i) tokens.push_back("t" + std::to_string(rng.below(n)));
        const auto g = build_cooccurrence_graph(tokens, 2 + static_cast<int>(rng.below(4)));
        std::vector<std::vector<double>> w(g.terms.size(), std::vector<double>(g.terms.size(), 0.0));
        for (const auto& [key, count] : g.edges) {
            w[key.first][key.second] = count;
            w[key.second][key.first] = count;
        }
        const auto got = pagerank_vector(g);
        const auto want = oracle::dense_pagerank(w);
        for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    }
    o.check(worst <= 1e-9, "L-infinity error " + std::to_string(worst));

    const std::vector<std::string> triangle{"a", "b", "c"};
    for (const auto& [t, s] : pagerank(build_cooccurrence_graph(triangle, 3)))
        o.check(std::abs(s - 1.0 / 3.0) <= 1e-9, "triangle score of " + t);
    o.detail << "max |error| " << worst;
}

// --- 2 ----------------------------------------------------------------------

void keyword_cutoff_grid(Outcome& o) {
    const int percents[] = {1, 5, 10, 20, 30};
    Rng rng(7);
    std::size_t checked = 0;
    for (int p : percents) {
        const double ratio = p / 100.0;
        for (std::size_t d = 1; d <= 200; ++d) {
            const std::size_t want = std::max<std::size_t>(1, (static_cast<std::size_t>(p) * d + 99) / 100);
            o.check(keyword_cutoff(ratio, d) == want, "cutoff ratio " + std::to_string(ratio) + " d " + std::to_string(d));
            std::vector<std::string> tokens;
            for (std::size_t i = 0; i < d; ++i) tokens.push_back("w" + std::to_string(i));
            for (std::size_t i = 0; i < d; ++i) tokens.push_back("w" + std::to_string(rng.below(d)));
            const auto profile = extract_keywords("d", tokens, {ratio, 4, {}});
            o.check(profile.keywords.size() == want, "profile size ratio " + std::to_string(ratio) + " d " + std::to_string(d));
            ++checked;
        }
    }
    for (int doc = 0; doc < 50; ++doc) {
        std::vector<std::string> tokens;
        const auto len = 10 + rng.below(300);
        const auto vocab = 5 + rng.below(150);
        for (std::size_t i = 0; i < len; ++i) tokens.push_back("w" + std::to_string(rng.below(vocab)));
        std::set<std::string> previous;
        for (int p : percents) {
            const auto profile = extract_keywords("d", tokens, {p / 100.0, 4, {}});
            std::set<std::string> current;
            for (const auto& k : profile.keywords) current.insert(k.term);
            o.check(std::includes(current.begin(), current.end(), previous.begin(), previous.end()),
                    "subset property on document " + std::to_string(doc));
            previous = std::move(current);
        }
    }
    o.detail << checked << " grid points, 50 documents";
}

// --- 3 ----------------------------------------------------------------------

void index_size_reduction(Outcome& o) {
    const auto c = generate_synthetic({500, 50, 20, 3});
    std::vector<std::size_t> terms, bytes;
    for (double ratio : {0.05, 0.30, 1.0}) {
        IndexConfig cfg;
        cfg.ratio = ratio;
        const auto built = build_index(c.documents, cfg, hardware_threads());
        terms.push_back(built.graph.stats().nodes(NodeKind::Term));
        bytes.push_back(built.graph.serialize().size());
    }
    o.check(terms[0] < terms[1] && terms[1] < terms[2], "term-node counts not increasing");
    o.check(bytes[0] < bytes[1] && bytes[1] < bytes[2], "index sizes not increasing");
    o.detail << "terms " << terms[0] << " < " << terms[1] << " < " << terms[2] << ", bytes " << bytes[0] << " < "
             << bytes[1] << " < " << bytes[2];
}

// --- 4 ----------------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HGOE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void random_walk_correctness(Outcome& o) {
    const auto fixtures = oracle::walk_fixtures();
    double worst = 0.0;
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
        const auto g = fixtures[f].build();
        for (bool weighted : {false, true}) {
            for (bool directed : {true, false}) {
                RwsParams p;
                p.walk_length = 3;
                p.repeats = 100000;
                p.weighted = weighted;
                p.directed = directed;
                p.threads = hardware_threads();
                const std::vector<NodeId> seeds{0};
                const auto got = random_walks(seeds, g, p);
                const auto want = oracle::expected_visits(fixtures[f], {0}, p.walk_length, directed, weighted);
                std::map<std::uint32_t, double> share;
                for (const auto& [k, v] : oracle::normalized(got.nodes)) share[k] = v;
                const double err = oracle::l1(share, oracle::normalized(want.nodes));
                worst = std::max(worst, err);
                o.check(err <= 0.02, "fixture " + std::to_string(f) + " L1 " + std::to_string(err));
            }
        }
    }

    test::TempDir dir;
    const auto d = dir.root().string();
    cmd_gen_synthetic({200, 50, 20, 11}, d);
    cmd_index({}, d + "/corpus.jsonl", d + "/index.bin");
    for (auto task : {Task::Docs, Task::EntityListCompletion}) {
        RunConfig cfg;
        cfg.task = task;
        cfg.rws.repeats = 3000;
        cfg.index_path = d + "/index.bin";
        cfg.topics_path = d + "/topics.jsonl";
        cfg.output_path = d + "/a.run";
        cmd_batch(cfg);
        cfg.output_path = d + "/b.run";
        cmd_batch(cfg);
        o.check(test::slurp(d + "/a.run") == test::slurp(d + "/b.run"), "repeated batch differs");
        o.check(!test::slurp(d + "/a.run").empty(), "empty run file");
    }
    const std::string batch = "batch --engine hgoe --task ref --repeats 3000 --seed 99 --index " + d +
                              "/index.bin --topics " + d + "/topics.jsonl --out ";
    o.check(run_cli(batch + d + "/t1.run --threads 1") == 0, "CLI run with 1 thread failed");
    o.check(run_cli(batch + d + "/t8.run --threads 8") == 0, "CLI run with 8 threads failed");
    o.check(!test::slurp(d + "/t1.run").empty() && test::slurp(d + "/t1.run") == test::slurp(d + "/t8.run"),
            "run files differ between --threads 1 and --threads 8");
    o.detail << "max L1 " << worst << " over 5 fixtures x 4 settings; runs byte-identical";
}

// --- 5 ----------------------------------------------------------------------

void task_mapping(Outcome& o) {
    const auto c = generate_synthetic({200, 50, 20, 1});
    const auto g = build_index(c.documents, {}, hardware_threads()).graph;
    RwsParams p;
    p.threads = hardware_threads();
    std::set<std::string> doc_ids;
    for (const auto& d : c.documents) doc_ids.insert(d.doc_id);
    auto is_entity = [&](const std::string& label) { return g.find_node(NodeKind::Entity, label).has_value(); };

    std::map<Task, std::vector<Topic>> topics{{Task::Docs, c.keyword_topics},
                                              {Task::Entities, c.keyword_topics},
                                              {Task::RelatedEntities, c.ref_topics},
                                              {Task::EntityListCompletion, c.elc_topics}};
    std::ostringstream hits_detail;
    for (const auto& [task, list] : topics) {
        const QrelSet qrels(c.qrels.at(task));
        std::size_t hits = 0;
        for (const auto& t : list) {
            const auto r = run_topic(t, task, g, p);
            for (const auto& e : r.entries) {
                const bool ok = task == Task::Docs ? doc_ids.count(e.item_id) != 0 : is_entity(e.item_id);
                if (!ok) o.check(false, std::string(to_string(task)) + " returned " + e.item_id);
                for (const auto& input : t.entities)
                    if (e.item_id == input) o.check(false, "input entity " + input + " returned");
            }
            if (task == Task::RelatedEntities) {
                const auto elc = entity_list_completion(t.entities, g, p);
                o.check(elc.entries == r.entries, "completion of {" + t.entities.front() + "} differs from related");
            }
            const auto& judged = qrels.for_topic(t.topic_id);
            bool hit = false;
            for (std::size_t i = 0; i < std::min<std::size_t>(10, r.entries.size()); ++i) {
                auto it = judged.find(encode_item_id(r.entries[i].item_id));
                hit = hit || (it != judged.end() && it->second > 0);
            }
            hits += hit;
        }
        const double share = static_cast<double>(hits) / static_cast<double>(list.size());
        o.check(share >= 0.8, std::string(to_string(task)) + " top-10 share " + std::to_string(share));
        hits_detail << ' ' << to_string(task) << ' ' << hits << '/' << list.size();
    }
    o.detail << "planted item in top 10:" << hits_detail.str();
}

// --- 6 ----------------------------------------------------------------------

void baseline_oracles(Outcome& o) {
    const auto corpus = load_corpus(std::string(HGOE_TEST_DATA) + "/three_docs.jsonl");
    const auto profiles = compute_profiles(corpus.documents, {1.0, 4, {}});
    const auto index = build_document_index(profiles, ProfileMode::FullText);
    const auto query = preprocess("graph entity");
    const std::map<std::string, std::pair<double, double>> want{
        {"d1", {2.7488721956, 1.1458201464}}, {"d2", {0.9162907319, 0.4852745053}}, {"d3", {1.8325814637, 0.6194517879}}};
    const auto tfidf = score_tfidf(query, index);
    const auto bm25 = score_bm25(query, index, {1.2, 0.75});
    o.check(tfidf.entries.size() == 3 && bm25.entries.size() == 3, "expected three scored documents");
    double worst = 0.0;
    for (const auto& e : tfidf.entries) worst = std::max(worst, std::abs(e.score - want.at(e.item_id).first));
    for (const auto& e : bm25.entries) worst = std::max(worst, std::abs(e.score - want.at(e.item_id).second));
    o.check(worst <= 1e-6, "score error " + std::to_string(worst));

    const auto c = generate_synthetic({150, 6, 2, 17});
    const auto idx = build_entity_index(c.documents, {0.3, 4, {}});
    std::map<std::string, int> df;
    for (const auto& [label, vd] : idx.documents)
        for (const auto& k : vd.profile.keywords) ++df[k.term];
    const double n = static_cast<double>(idx.documents.size());
    std::size_t queries = 0;
    for (auto a = idx.documents.begin(); a != idx.documents.end(); ++a) {
        const std::vector<std::string> inputs{a->first};
        std::vector<std::pair<double, std::string>> ranked;
        for (const auto& k : a->second.profile.keywords) ranked.push_back({-std::log(1.0 + n / df.at(k.term)), k.term});
        std::sort(ranked.begin(), ranked.end());
        std::vector<std::string> expect;
        for (std::size_t i = 0; i < std::min<std::size_t>(25, ranked.size()); ++i) expect.push_back(ranked[i].second);
        const auto r = more_like_this_completion(inputs, idx);
        o.check(ranked.size() > 25, "pool of " + a->first + " too small to exercise the cut");
        o.check(r.query_terms == expect, "more-like-this terms for " + a->first);
        ++queries;
    }
    o.detail << "max score error " << worst << ", " << queries << " more-like-this queries";
}

// --- 7 ----------------------------------------------------------------------

void metric_suite(Outcome& o) {
    Rng rng(31);
    double worst = 0.0;
    for (int fixture = 0; fixture < 10; ++fixture) {
        std::vector<Qrel> qrels;
        hgoe::Run run;
        std::map<std::string, oracle::Judged> judged;
        for (int t = 0; t < 10; ++t) {
            const auto topic = "q" + std::to_string(t);
            for (int i = 0; i < 40; ++i) {
                if (!rng.bernoulli(0.25)) continue;
                const int grade = static_cast<int>(rng.below(3));
                qrels.push_back({topic, "x" + std::to_string(i), grade});
                judged[topic]["x" + std::to_string(i)] = grade;
            }
            if (rng.bernoulli(0.1)) continue;
            std::vector<std::string> ranked;
            for (int i = 0; i < 40; ++i)
                if (rng.bernoulli(0.5)) ranked.push_back("x" + std::to_string(i));
            std::shuffle(ranked.begin(), ranked.end(), rng);
            run[topic] = ranked;
        }
        const auto report = aggregate(run, QrelSet(qrels), 10);
        double map = 0, p10 = 0, ndcg = 0, logs = 0;
        for (const auto& [topic, q] : judged) {
            const auto& ranked = run.count(topic) ? run.at(topic) : std::vector<std::string>{};
            const double ap = oracle::ap(ranked, q);
            map += ap;
            p10 += oracle::p_at(ranked, q, 10);
            ndcg += oracle::ndcg_at(ranked, q, 10);
            logs += std::log(std::max(ap, 1e-5));
        }
        const double n = static_cast<double>(judged.size());
        for (double err : {report.map - map / n, report.mean_p_at_k - p10 / n, report.mean_ndcg_at_k - ndcg / n,
                           report.gmap - std::exp(logs / n)})
            worst = std::max(worst, std::abs(err));
        o.check(report.gmap <= report.map, "GMAP above MAP in fixture " + std::to_string(fixture));
    }
    o.check(worst <= 1e-6, "metric error " + std::to_string(worst));

    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(0.4 + 0.05 * i);
        b.push_back(0.1 + 0.02 * i);
    }
    const auto w = wilcoxon_signed_rank(a, b);
    const double enumerated = oracle::wilcoxon_enumerated(a, b);
    o.check(w.exact && w.p_value == enumerated && enumerated == 2.0 / 1024.0,
            "Wilcoxon p " + std::to_string(w.p_value) + " vs enumerated " + std::to_string(enumerated));
    o.detail << "max metric error " << worst << ", Wilcoxon p " << w.p_value;
}

// --- 8 ----------------------------------------------------------------------

void scale_smoke(Outcome& o) {
    test::TempDir dir;
    const auto d = dir.root().string();
    cmd_gen_synthetic({50000, 5000, 20, 1}, d);
    IndexConfig cfg;
    cfg.extensions = {Extension::Syns, Extension::Context, Extension::TfBins};
    cfg.tf_bins = 2;
    cfg.synonyms_path = d + "/synsets.txt";
    cfg.embeddings_path = d + "/embeddings.txt";
    const auto corpus = load_corpus(d + "/corpus.jsonl");
    const auto start = std::chrono::steady_clock::now();
    const auto built = build_index(corpus.documents, cfg, hardware_threads());
    const std::chrono::duration<double> build_time = std::chrono::steady_clock::now() - start;
    o.check(build_time.count() < 600.0, "build took " + std::to_string(build_time.count()) + " s");
    const auto s = built.graph.stats();
    const auto& rep = built.report;

    std::set<std::string> terms, entities;
    std::set<std::pair<std::string, std::set<std::string>>> links;
    std::size_t doc_edges = 0;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const auto& doc = corpus.documents[i];
        for (const auto& k : built.profiles[i].keywords) terms.insert(k.term);
        for (const auto& m : doc.mentions) entities.insert(m.entity_label);
        for (const auto& l : doc.links) {
            entities.insert(l.subject);
            entities.insert(l.objects.begin(), l.objects.end());
            links.insert({l.subject, {l.objects.begin(), l.objects.end()}});
        }
        doc_edges += !built.profiles[i].keywords.empty() || !doc.mentions.empty();
    }
    std::size_t named = 0;
    for (const auto& e : entities) {
        const auto name = preprocess(e);
        named += !name.empty();
        terms.insert(name.begin(), name.end());
    }
    std::size_t tf_edges = 0;
    for (const auto& p : built.profiles) {
        std::vector<std::uint32_t> tfs;
        for (const auto& k : p.keywords) tfs.push_back(p.tf.at(k.term));
        if (tfs.empty()) continue;
        std::sort(tfs.begin(), tfs.end());
        const auto n = tfs.size();
        const double median = n % 2 ? tfs[n / 2] : (tfs[n / 2 - 1] + tfs[n / 2]) / 2.0;
        const auto high = static_cast<std::size_t>(std::count_if(tfs.begin(), tfs.end(), [&](auto t) { return t >= median; }));
        tf_edges += (high >= 2) + (n - high >= 2);
    }
    std::set<std::set<std::string>> synsets;
    for (const auto& group : read_synsets(cfg.synonyms_path)) {
        std::set<std::string> present;
        for (const auto& w : group)
            if (terms.count(w)) present.insert(w);
        if (present.size() >= 2) synsets.insert(present);
    }

    auto expect = [&](std::size_t got, std::size_t want, const std::string& what) {
        o.check(got == want, what + " " + std::to_string(got) + " != " + std::to_string(want));
    };
    expect(s.edges(EdgeKind::Document), doc_edges, "document edges");
    expect(s.nodes(NodeKind::Entity), entities.size(), "entity nodes");
    expect(s.edges(EdgeKind::ContainedIn), named, "contained-in edges");
    expect(s.edges(EdgeKind::RelatedTo), links.size(), "related-to edges");
    expect(s.nodes(NodeKind::Term), terms.size(), "term nodes");
    expect(s.edges(EdgeKind::TfBin), tf_edges, "tf-bin edges");
    expect(s.edges(EdgeKind::Synonym), synsets.size(), "synonym edges");
    expect(s.edges(EdgeKind::Context), rep.context.edges_added, "context edges");
    o.check(rep.context.edges_added > 0 && rep.synonyms.edges_added > 0, "extensions added nothing");
    for (EdgeId e = 0; e < built.graph.edge_count(); ++e) {
        if (built.graph.edge_kind(e) != EdgeKind::Context) continue;
        const auto size = built.graph.edge_nodes(e).size();
        if (size < 2 || size > static_cast<std::size_t>(cfg.context_k) + 1) o.check(false, "context edge size");
    }
    std::size_t total_edges = 0;
    for (auto k : s.edges_by_kind) total_edges += k;
    expect(s.total_edges, total_edges, "edge total");

    const auto path = d + "/index.bin";
    built.graph.save(path);
    const auto loaded = Hypergraph::load(path);
    o.check(loaded.serialize() == built.graph.serialize() && loaded.stats() == s, "save/load round trip differs");
    o.detail << "build " << build_time.count() << " s on " << hardware_threads() << " threads; " << s.total_nodes
             << " nodes, " << s.total_edges << " edges, " << std::filesystem::file_size(path) << " bytes";
}

// --- 9 ----------------------------------------------------------------------

void sanity_map(Outcome& o) {
    test::TempDir dir;
    const auto d = dir.root().string();
    cmd_gen_synthetic({200, 50, 20, 1}, d);
    IndexConfig keywords;
    IndexConfig full;
    full.ratio = 1.0;
    cmd_index(keywords, d + "/corpus.jsonl", d + "/kw.bin", hardware_threads());
    cmd_index(full, d + "/corpus.jsonl", d + "/full.bin", hardware_threads());
    for (auto engine : {Engine::Hgoe, Engine::TfIdf, Engine::Bm25}) {
        for (bool full_text : {false, true}) {
            RunConfig cfg;
            cfg.engine = engine;
            cfg.task = Task::Docs;
            cfg.threads = hardware_threads();
            cfg.rws.threads = cfg.threads;
            cfg.index_path = d + (full_text ? "/full.bin" : "/kw.bin");
            cfg.corpus_path = d + "/corpus.jsonl";
            cfg.profile_mode = full_text ? ProfileMode::FullText : ProfileMode::Keywords;
            cfg.topics_path = d + "/topics.jsonl";
            cfg.output_path = d + "/run.txt";
            cmd_batch(cfg);
            const auto report = cmd_eval(cfg.output_path, d + "/qrels_docs.txt");
            const auto name = std::string(to_string(engine)) + (full_text ? "/full" : "/keywords");
            o.check(report.map > 0.0, name + " MAP " + std::to_string(report.map));
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s%s %.3f", o.detail.tellp() > 0 ? ", " : "MAP ", name.c_str(), report.map);
            o.detail << buf;
        }
    }
}

struct Criterion {
    int id;
    double limit_seconds;
    std::function<void(Outcome&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, 5, pagerank_oracle},        {2, 0, keyword_cutoff_grid}, {3, 60, index_size_reduction},
        {4, 30, random_walk_correctness}, {5, 300, task_mapping},    {6, 0, baseline_oracles},
        {7, 0, metric_suite},           {8, 600, scale_smoke},       {9, 0, sanity_map},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        if (c.limit_seconds > 0 && elapsed.count() >= c.limit_seconds)
            o.check(false, "runtime over " + std::to_string(static_cast<int>(c.limit_seconds)) + " s");
        char time[32];
        std::snprintf(time, sizeof time, "%.2f s", elapsed.count());
        std::cout << "Criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << time << ") "
                  << o.detail.str();
        for (std::size_t i = 0; i < o.failures.size() && i < 5; ++i) std::cout << (i ? "; " : " | failed: ") << o.failures[i];
        if (o.failures.size() > 5) std::cout << "; ...";
        std::cout << std::endl;
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
