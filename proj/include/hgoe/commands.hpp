#pragma once

// Command implementations behind the `hgoe` binary. Each cmd_* function takes
// fully parsed settings, does its work and returns a summary; argument parsing
// and printing live in tools/hgoe.cpp.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgoe/baseline.hpp"
#include "hgoe/corpus.hpp"
#include "hgoe/error.hpp"
#include "hgoe/eval.hpp"
#include "hgoe/hypergraph.hpp"
#include "hgoe/indexer.hpp"
#include "hgoe/keywords.hpp"
#include "hgoe/ranking.hpp"
#include "hgoe/synthetic.hpp"
#include "hgoe/trec.hpp"

namespace hgoe {

/// Raised for invalid combinations of settings; the CLI maps it to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

enum class Engine { Hgoe, TfIdf, Bm25 };

inline const char* to_string(Engine e) {
    switch (e) {
    case Engine::Hgoe: return "hgoe";
    case Engine::TfIdf: return "tfidf";
    case Engine::Bm25: return "bm25";
    }
    return "?";
}

inline Engine parse_engine(const std::string& s) {
    if (s == "hgoe") return Engine::Hgoe;
    if (s == "tfidf") return Engine::TfIdf;
    if (s == "bm25") return Engine::Bm25;
    throw UsageError("unknown engine '" + s + "' (expected hgoe, tfidf or bm25)");
}

/// Every engine here can rank both documents and entities.
inline bool engine_supports(Engine, Task) { return true; }

struct RunConfig {
    Engine engine = Engine::Hgoe;
    Task task = Task::Docs;
    RwsParams rws;
    /// Keyword settings for the baselines; the hypergraph reads its own from the index.
    IndexConfig index;
    ProfileMode profile_mode = ProfileMode::Keywords;
    Bm25Params bm25;
    std::string index_path;
    std::string corpus_path;
    std::string topics_path;
    std::string qrels_path;
    std::string output_path;
    /// Run tag; empty means the engine name.
    std::string tag;
    std::size_t depth = 1000;
    unsigned threads = 1;

    std::string run_tag() const { return tag.empty() ? to_string(engine) : tag; }

    /// Checks what searching needs; batch additionally needs topics and output.
    void validate() const {
        if (!engine_supports(engine, task))
            throw UsageError(std::string("engine ") + to_string(engine) + " cannot run task " + to_string(task));
        if (engine == Engine::Hgoe && index_path.empty()) throw UsageError("the hgoe engine needs --index");
        if (engine != Engine::Hgoe && corpus_path.empty())
            throw UsageError(std::string("the ") + to_string(engine) + " engine needs --corpus");
        if (depth == 0) throw UsageError("depth must be >= 1");
        try {
            rws.validate();
            if (engine != Engine::Hgoe) index.validate();
        } catch (const ParameterError& e) {
            throw UsageError(e.what());
        }
    }
};

// --- Index ------------------------------------------------------------------

/// Applies one `--extend` value: `syns:FILE`, `context:FILE[,k[,threshold]]`
/// or `tfbins[:N]`.
inline void apply_extension_spec(const std::string& spec, IndexConfig& config) {
    const auto colon = spec.find(':');
    const auto name = spec.substr(0, colon);
    const auto arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    auto number = [&](const std::string& s, auto parse) {
        try {
            std::size_t used = 0;
            auto v = parse(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("bad number '" + s + "' in --extend " + spec);
        }
    };
    auto to_int = [](const std::string& s, std::size_t* used) { return std::stoi(s, used); };
    auto to_double = [](const std::string& s, std::size_t* used) { return std::stod(s, used); };

    if (name == "syns") {
        if (arg.empty()) throw UsageError("--extend syns needs a synset file: syns:FILE");
        config.extensions.insert(Extension::Syns);
        config.synonyms_path = arg;
    } else if (name == "context") {
        std::vector<std::string> parts;
        std::stringstream ss(arg);
        for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
        if (parts.empty() || parts[0].empty() || parts.size() > 3)
            throw UsageError("--extend context expects context:FILE[,k[,threshold]]");
        config.extensions.insert(Extension::Context);
        config.embeddings_path = parts[0];
        if (parts.size() > 1) config.context_k = number(parts[1], to_int);
        if (parts.size() > 2) config.context_threshold = number(parts[2], to_double);
    } else if (name == "tfbins") {
        config.extensions.insert(Extension::TfBins);
        if (!arg.empty()) config.tf_bins = number(arg, to_int);
    } else {
        throw UsageError("unknown extension '" + name + "' (expected syns, context or tfbins)");
    }
}

struct IndexSummary {
    GraphStats stats;
    IndexReport report;
    std::uint64_t bytes = 0;
    std::vector<LineError> corpus_errors;
};

inline IndexSummary cmd_index(const IndexConfig& config, const std::string& corpus_path, const std::string& out_path,
                              unsigned threads = 1) {
    try {
        config.validate();
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    auto corpus = load_corpus(corpus_path);
    auto built = build_index(corpus.documents, config, threads);
    const auto bytes = built.graph.serialize();
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write index '" + out_path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing index '" + out_path + "'");
    return {built.graph.stats(), std::move(built.report), bytes.size(), std::move(corpus.errors)};
}

inline GraphStats cmd_stats(const std::string& index_path) { return Hypergraph::load(index_path).stats(); }

inline std::string format_stats(const GraphStats& s) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "kind" << std::right << std::setw(12) << "count" << '\n';
    for (std::size_t k = 0; k < kNodeKindCount; ++k)
        out << std::left << std::setw(16) << (std::string("node:") + to_string(static_cast<NodeKind>(k))) << std::right
            << std::setw(12) << s.nodes_by_kind[k] << '\n';
    for (std::size_t k = 0; k < kEdgeKindCount; ++k)
        out << std::left << std::setw(16) << (std::string("edge:") + to_string(static_cast<EdgeKind>(k))) << std::right
            << std::setw(12) << s.edges_by_kind[k] << '\n';
    out << std::left << std::setw(16) << "nodes" << std::right << std::setw(12) << s.total_nodes << '\n';
    out << std::left << std::setw(16) << "edges" << std::right << std::setw(12) << s.total_edges << '\n';
    out << std::left << std::setw(16) << "degenerate" << std::right << std::setw(12) << s.degenerate_edges << '\n';
    return out.str();
}

inline nlohmann::json stats_json(const GraphStats& s) {
    nlohmann::json j;
    for (std::size_t k = 0; k < kNodeKindCount; ++k) j["nodes"][to_string(static_cast<NodeKind>(k))] = s.nodes_by_kind[k];
    for (std::size_t k = 0; k < kEdgeKindCount; ++k) j["edges"][to_string(static_cast<EdgeKind>(k))] = s.edges_by_kind[k];
    j["total_nodes"] = s.total_nodes;
    j["total_edges"] = s.total_edges;
    j["degenerate_edges"] = s.degenerate_edges;
    return j;
}

/// Writes one profile per line; returns the number of documents processed.
inline std::size_t cmd_extract_keywords(const std::string& corpus_path, const KeywordOptions& options, std::ostream& out,
                                        unsigned threads = 1, std::vector<LineError>* errors = nullptr) {
    auto corpus = load_corpus(corpus_path);
    const auto profiles = compute_profiles(corpus.documents, options, {}, threads);
    for (const auto& p : profiles) out << to_json_value(p).dump() << '\n';
    if (errors) *errors = std::move(corpus.errors);
    return profiles.size();
}

inline SyntheticCollection cmd_gen_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
    auto collection = generate_synthetic(spec);
    write_synthetic(collection, out_dir);
    return collection;
}

// --- Search -----------------------------------------------------------------

/// An opened engine: the loaded hypergraph, or the baseline indexes built from
/// the corpus. Only the index the task needs is built.
class Searcher {
public:
    explicit Searcher(RunConfig config) : config_(std::move(config)) {
        config_.validate();
        if (config_.engine == Engine::Hgoe) {
            graph_ = Hypergraph::load(config_.index_path);
            return;
        }
        auto corpus = load_corpus(config_.corpus_path);
        corpus_errors_ = std::move(corpus.errors);
        if (config_.task == Task::Docs) {
            const auto profiles = compute_profiles(corpus.documents, config_.index.keyword_options(),
                                                   config_.index.tokenizer, config_.threads);
            documents_ = build_document_index(profiles, config_.profile_mode);
        } else {
            entities_ = build_entity_index(corpus.documents, config_.index.keyword_options(), config_.profile_mode,
                                           config_.index.tokenizer, config_.threads);
        }
    }

    const RunConfig& config() const { return config_; }
    const std::vector<LineError>& corpus_errors() const { return corpus_errors_; }

    RankedList run(const Topic& topic) const {
        if (!task_accepts(config_.task, topic))
            throw ParameterError(std::string("topic ") + topic.topic_id + " is not valid input for task " +
                                 to_string(config_.task));
        if (graph_) {
            auto params = config_.rws;
            params.threads = config_.threads;
            return run_topic(topic, config_.task, *graph_, params, config_.index.tokenizer);
        }
        const auto scorer = config_.engine == Engine::Bm25 ? Scorer::Bm25 : Scorer::TfIdf;
        RankedList out;
        switch (config_.task) {
        case Task::Docs:
        case Task::Entities: {
            const auto terms = preprocess(*topic.keyword_query, config_.index.tokenizer);
            const auto& index = config_.task == Task::Docs ? *documents_ : entities_->index;
            const auto target = config_.task == Task::Docs ? TargetKind::DocumentEdge : TargetKind::EntityNode;
            out = score_query(terms, index, scorer, config_.bm25, target);
            break;
        }
        case Task::RelatedEntities:
        case Task::EntityListCompletion: {
            auto mlt = more_like_this_completion(topic.entities, *entities_, scorer, kMoreLikeThisTerms, config_.bm25);
            out = std::move(mlt.ranking);
            out.unresolved = std::move(mlt.unresolved);
            break;
        }
        }
        out.topic_id = topic.topic_id;
        return out;
    }

private:
    RunConfig config_;
    std::optional<Hypergraph> graph_;
    std::optional<InvertedIndex> documents_;
    std::optional<EntityIndex> entities_;
    std::vector<LineError> corpus_errors_;
};

/// Builds the ad-hoc topic for `search`: keyword tasks take the query text,
/// entity tasks take entity labels.
inline Topic make_query_topic(Task task, const std::string& query, const std::vector<std::string>& entities) {
    Topic t;
    t.topic_id = "query";
    if (task == Task::Docs || task == Task::Entities) {
        if (query.empty()) throw UsageError(std::string("task ") + to_string(task) + " needs a keyword query");
        t.kind = TopicKind::Keyword;
        t.keyword_query = query;
    } else {
        if (entities.empty()) throw UsageError(std::string("task ") + to_string(task) + " needs at least one --entity");
        if (task == Task::RelatedEntities && entities.size() != 1)
            throw UsageError("task ref takes exactly one --entity");
        t.kind = task == Task::RelatedEntities ? TopicKind::Entity : TopicKind::EntitySet;
        t.entities = entities;
    }
    return t;
}

inline RankedList cmd_search(const RunConfig& config, const Topic& topic) { return Searcher(config).run(topic); }

inline std::string format_ranking(const RankedList& list, std::size_t top) {
    std::ostringstream out;
    if (list.no_seeds) out << "# no query element found in the index\n";
    for (const auto& u : list.unresolved) out << "# unknown entity: " << u << '\n';
    out << std::right << std::setw(5) << "rank" << "  " << std::setw(16) << "score" << "  " << "item\n";
    char score[32];
    for (std::size_t i = 0; i < std::min(top, list.entries.size()); ++i) {
        std::snprintf(score, sizeof score, "%.10f", list.entries[i].score);
        out << std::setw(5) << (i + 1) << "  " << std::setw(16) << score << "  " << list.entries[i].item_id << '\n';
    }
    return out.str();
}

// --- Batch ------------------------------------------------------------------

struct QueryTiming {
    std::string topic_id;
    double seconds = 0.0;
};

struct BatchSummary {
    std::size_t topics_run = 0;
    std::size_t topics_skipped = 0;
    std::vector<std::string> no_seed_topics;
    std::vector<QueryTiming> timings;
};

/// Timings go next to the run file so that the run itself stays byte-identical
/// between repetitions.
inline std::string timing_path(const std::string& run_path) { return run_path + ".timing.tsv"; }

inline std::vector<QueryTiming> load_timings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open timing file '" + path + "'");
    std::vector<QueryTiming> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        QueryTiming t;
        if (!(ss >> t.topic_id >> t.seconds)) throw ParseError("expected 'topic_id seconds'", n);
        out.push_back(std::move(t));
    }
    return out;
}

/// Runs every topic the task accepts, in file order, and writes the run file
/// and its timing sidecar.
inline BatchSummary cmd_batch(const RunConfig& config) {
    if (config.topics_path.empty()) throw UsageError("batch needs --topics");
    if (config.output_path.empty()) throw UsageError("batch needs --out");
    config.validate();
    const auto topics = load_topics(config.topics_path);

    BatchSummary summary;
    std::vector<const Topic*> selected;
    for (const auto& t : topics) {
        if (task_accepts(config.task, t))
            selected.push_back(&t);
        else
            ++summary.topics_skipped;
    }

    std::ofstream run(config.output_path, std::ios::binary);
    if (!run) throw IoError("cannot write run file '" + config.output_path + "'");
    std::ofstream timing(timing_path(config.output_path), std::ios::binary);
    if (!timing) throw IoError("cannot write timing file '" + timing_path(config.output_path) + "'");
    timing << "# topic_id\tseconds\n";
    if (selected.empty()) return summary;

    const Searcher searcher(config);
    const auto tag = config.run_tag();
    char secs[32];
    for (const Topic* t : selected) {
        const auto start = std::chrono::steady_clock::now();
        const auto list = searcher.run(*t);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        write_run(run, list, tag, config.depth);
        if (list.no_seeds) summary.no_seed_topics.push_back(t->topic_id);
        summary.timings.push_back({t->topic_id, elapsed.count()});
        std::snprintf(secs, sizeof secs, "%.6f", elapsed.count());
        timing << t->topic_id << '\t' << secs << '\n';
        ++summary.topics_run;
    }
    if (!run || !timing) throw IoError("failed writing run output");
    return summary;
}

// --- Eval -------------------------------------------------------------------

/// Evaluates a run; the average query time is read from the run's timing
/// sidecar when one exists.
inline EvalReport cmd_eval(const std::string& run_path, const std::string& qrels_path, std::size_t k = 10) {
    const auto run = load_run(run_path);
    const QrelSet qrels(load_qrels(qrels_path));
    auto report = aggregate(run, qrels, k);
    if (std::filesystem::exists(timing_path(run_path))) {
        const auto timings = load_timings(timing_path(run_path));
        double total = 0.0;
        for (const auto& t : timings) total += t.seconds;
        if (!timings.empty()) report.avg_time_per_query = total / static_cast<double>(timings.size());
    }
    return report;
}

/// Per-topic AP of two reports, aligned on the topics of the first.
inline WilcoxonResult compare_reports(const EvalReport& a, const EvalReport& b) {
    std::map<std::string, double> other;
    for (const auto& t : b.topics) other[t.topic_id] = t.ap;
    std::vector<double> xs, ys;
    for (const auto& t : a.topics) {
        xs.push_back(t.ap);
        auto it = other.find(t.topic_id);
        ys.push_back(it == other.end() ? 0.0 : it->second);
    }
    return wilcoxon_signed_rank(xs, ys);
}

inline std::string format_duration(double seconds) {
    char buf[32];
    if (seconds <= 0.0)
        std::snprintf(buf, sizeof buf, "-");
    else if (seconds < 1.0)
        std::snprintf(buf, sizeof buf, "%.0f ms", seconds * 1000.0);
    else
        std::snprintf(buf, sizeof buf, "%.2f s", seconds);
    return buf;
}

inline std::string format_eval_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
    std::size_t name_width = 3;
    for (const auto& [name, r] : rows) name_width = std::max(name_width, name.size());
    const std::size_t k = rows.empty() ? 10 : rows.front().second.k;
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_width)) << "Run" << std::right << std::setw(12) << "Avg./query"
        << std::setw(10) << "MAP" << std::setw(10) << "GMAP" << std::setw(10) << ("P@" + std::to_string(k))
        << std::setw(10) << ("NDCG@" + std::to_string(k)) << '\n';
    char buf[32];
    for (const auto& [name, r] : rows) {
        out << std::left << std::setw(static_cast<int>(name_width)) << name << std::right << std::setw(12)
            << format_duration(r.avg_time_per_query);
        for (double v : {r.map, r.gmap, r.mean_p_at_k, r.mean_ndcg_at_k}) {
            std::snprintf(buf, sizeof buf, "%.4f", v);
            out << std::setw(10) << buf;
        }
        out << '\n';
    }
    return out.str();
}

inline nlohmann::json eval_json(const std::string& name, const EvalReport& r) {
    nlohmann::json j;
    j["run"] = name;
    j["topics"] = r.topics.size();
    j["avg_time_per_query"] = r.avg_time_per_query;
    j["map"] = r.map;
    j["gmap"] = r.gmap;
    j["p_at_" + std::to_string(r.k)] = r.mean_p_at_k;
    j["ndcg_at_" + std::to_string(r.k)] = r.mean_ndcg_at_k;
    auto& per = j["per_topic"] = nlohmann::json::array();
    for (const auto& t : r.topics)
        per.push_back({{"topic_id", t.topic_id}, {"ap", t.ap}, {"p_at_k", t.p_at_k}, {"ndcg_at_k", t.ndcg_at_k},
                       {"judged", t.judged}, {"retrieved", t.retrieved}});
    return j;
}

inline nlohmann::json wilcoxon_json(const WilcoxonResult& w) {
    return {{"statistic", w.statistic}, {"w_plus", w.w_plus}, {"w_minus", w.w_minus}, {"p_value", w.p_value},
            {"n", w.n},                 {"exact", w.exact},   {"degenerate", w.degenerate}, {"low_power", w.low_power}};
}

} // namespace hgoe
