#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hgoe/hgoe.hpp"

namespace {

using namespace hgoe;

void report_line_errors(const std::vector<LineError>& errors) {
    for (const auto& e : errors) std::cerr << "warning: corpus line " << e.line << ": " << e.message << '\n';
}

struct RunFlags {
    std::string engine = "hgoe";
    std::string task = "docs";
    bool full_text = false;
};

void add_run_options(CLI::App& sub, RunConfig& cfg, RunFlags& flags) {
    sub.add_option("--engine", flags.engine, "hgoe, tfidf or bm25")->capture_default_str();
    sub.add_option("--task", flags.task, "docs, entities, ref or elc")->capture_default_str();
    sub.add_option("--index", cfg.index_path, "Hypergraph index (hgoe engine)");
    sub.add_option("--corpus", cfg.corpus_path, "Corpus file (baseline engines)");
    sub.add_option("--walk-length", cfg.rws.walk_length, "Maximum steps per walk")->capture_default_str();
    sub.add_option("--repeats", cfg.rws.repeats, "Walks per seed node")->capture_default_str();
    sub.add_option("--expansion", cfg.rws.expansion, "Seed from entities sharing an edge with query terms")
        ->capture_default_str();
    sub.add_option("--directed", cfg.rws.directed, "Follow directed edges from tail to head only")->capture_default_str();
    sub.add_option("--weighted", cfg.rws.weighted, "Pick edges proportionally to weight")->capture_default_str();
    sub.add_option("--node-fatigue", cfg.rws.node_fatigue, "Only 0 is supported")->capture_default_str();
    sub.add_option("--edge-fatigue", cfg.rws.edge_fatigue, "Only 0 is supported")->capture_default_str();
    sub.add_option("--seed", cfg.rws.rng_seed, "Random walk seed")->capture_default_str();
    sub.add_option("--ratio", cfg.index.ratio, "Keyword ratio for baseline profiles")->capture_default_str();
    sub.add_option("--window", cfg.index.window, "Co-occurrence window for baseline profiles")->capture_default_str();
    sub.add_flag("--full-text", flags.full_text, "Index every term with its tf (baseline engines)");
    sub.add_option("--k1", cfg.bm25.k1, "BM25 k1")->capture_default_str();
    sub.add_option("--b", cfg.bm25.b, "BM25 b")->capture_default_str();
}

void finish_run_config(RunConfig& cfg, const RunFlags& flags, unsigned threads) {
    try {
        cfg.engine = parse_engine(flags.engine);
        cfg.task = parse_task(flags.task);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    cfg.profile_mode = flags.full_text ? ProfileMode::FullText : ProfileMode::Keywords;
    cfg.threads = threads;
    cfg.rws.threads = threads;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entity-oriented search over a hypergraph of documents, terms and entities"};
    app.set_config("--config", "", "Read settings from a key-value file ([subcommand] sections)");
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

    // gen-synthetic
    auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic collection with planted relevance");
    SyntheticSpec spec;
    std::string gen_out;
    gen->add_option("--docs", spec.documents, "Documents")->capture_default_str();
    gen->add_option("--entities", spec.entities, "Entities")->capture_default_str();
    gen->add_option("--topics", spec.topics, "Topics per task")->capture_default_str();
    gen->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory")->required();

    // extract-keywords
    auto* kw = app.add_subcommand("extract-keywords", "Write keyword profiles, one JSON record per line");
    std::string kw_corpus, kw_out;
    KeywordOptions kw_options;
    kw->add_option("--corpus", kw_corpus, "Corpus file")->required();
    kw->add_option("--ratio", kw_options.ratio, "Fraction of distinct terms kept")->capture_default_str();
    kw->add_option("--window", kw_options.window, "Co-occurrence window")->capture_default_str();
    kw->add_option("--out", kw_out, "Output file (default: stdout)");

    // index
    auto* idx = app.add_subcommand("index", "Build a hypergraph index from a corpus");
    IndexConfig index_config;
    std::string idx_corpus, idx_out;
    std::vector<std::string> extend;
    bool idx_json = false;
    idx->add_option("--corpus", idx_corpus, "Corpus file")->required();
    idx->add_option("--out", idx_out, "Index file")->required();
    idx->add_option("--ratio", index_config.ratio, "Fraction of distinct terms kept")->capture_default_str();
    idx->add_option("--window", index_config.window, "Co-occurrence window")->capture_default_str();
    idx->add_option("--extend", extend, "syns:FILE, context:FILE[,k[,thr]] or tfbins[:N]");
    idx->add_option("--default-weight", index_config.default_weight, "Weight of edges without one")
        ->capture_default_str();
    idx->add_option("--add-new-synonyms", index_config.add_new_synonyms, "Insert synonyms missing from the index")
        ->capture_default_str();
    idx->add_flag("--json", idx_json, "Print statistics as JSON");

    // stats
    auto* st = app.add_subcommand("stats", "Print node and edge counts of an index");
    std::string st_index;
    bool st_json = false;
    st->add_option("--index", st_index, "Index file")->required();
    st->add_flag("--json", st_json, "Print as JSON");

    // search
    auto* se = app.add_subcommand("search", "Run one query and print the ranking");
    RunConfig search_cfg;
    RunFlags search_flags;
    std::string query;
    std::vector<std::string> entities;
    std::size_t top = 10;
    add_run_options(*se, search_cfg, search_flags);
    se->add_option("--query", query, "Keyword query (docs, entities)");
    se->add_option("--entity", entities, "Example entity label (ref, elc); repeatable");
    se->add_option("--top", top, "Results to print")->capture_default_str();

    // batch
    auto* ba = app.add_subcommand("batch", "Run every topic of a task and write a TREC run file");
    RunConfig batch_cfg;
    RunFlags batch_flags;
    add_run_options(*ba, batch_cfg, batch_flags);
    ba->add_option("--topics", batch_cfg.topics_path, "Topics file")->required();
    ba->add_option("--out", batch_cfg.output_path, "Run file")->required();
    ba->add_option("--tag", batch_cfg.tag, "Run tag (default: engine name)");
    ba->add_option("--depth", batch_cfg.depth, "Results kept per topic")->capture_default_str();

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a run against qrels");
    std::string ev_run, ev_qrels, ev_compare, ev_json;
    std::size_t ev_k = 10;
    ev->add_option("--run", ev_run, "Run file")->required();
    ev->add_option("--qrels", ev_qrels, "Qrels file")->required();
    ev->add_option("--compare", ev_compare, "Second run; adds a Wilcoxon signed-rank test on AP");
    ev->add_option("--k", ev_k, "Cutoff for P@k and NDCG@k")->capture_default_str();
    ev->add_option("--json", ev_json, "Also write the results as JSON to this file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*gen) {
            const auto c = cmd_gen_synthetic(spec, gen_out);
            std::cout << "wrote " << c.documents.size() << " documents and " << c.all_topics().size() << " topics to "
                      << gen_out << '\n';
        } else if (*kw) {
            std::vector<LineError> errors;
            std::size_t n = 0;
            if (kw_out.empty()) {
                n = cmd_extract_keywords(kw_corpus, kw_options, std::cout, threads, &errors);
            } else {
                std::ofstream out(kw_out, std::ios::binary);
                if (!out) throw IoError("cannot write '" + kw_out + "'");
                n = cmd_extract_keywords(kw_corpus, kw_options, out, threads, &errors);
            }
            report_line_errors(errors);
            std::cerr << n << " profiles\n";
        } else if (*idx) {
            for (const auto& e : extend) apply_extension_spec(e, index_config);
            const auto summary = cmd_index(index_config, idx_corpus, idx_out, threads);
            report_line_errors(summary.corpus_errors);
            for (const auto& w : summary.report.synonyms.warnings) std::cerr << "warning: " << w << '\n';
            if (idx_json) {
                auto j = stats_json(summary.stats);
                j["bytes"] = summary.bytes;
                j["documents"] = summary.report.documents;
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "indexed " << summary.report.documents << " documents (" << summary.report.empty_profiles
                          << " with empty profiles), " << summary.bytes << " bytes\n"
                          << format_stats(summary.stats);
            }
        } else if (*st) {
            const auto s = cmd_stats(st_index);
            if (st_json)
                std::cout << stats_json(s).dump(2) << '\n';
            else
                std::cout << format_stats(s);
        } else if (*se) {
            finish_run_config(search_cfg, search_flags, threads);
            const auto topic = make_query_topic(search_cfg.task, query, entities);
            std::cout << format_ranking(cmd_search(search_cfg, topic), top);
        } else if (*ba) {
            finish_run_config(batch_cfg, batch_flags, threads);
            const auto summary = cmd_batch(batch_cfg);
            for (const auto& t : summary.no_seed_topics) std::cerr << "warning: topic " << t << " matched nothing\n";
            std::cerr << summary.topics_run << " topics run, " << summary.topics_skipped << " skipped (other task)\n";
        } else if (*ev) {
            std::vector<std::pair<std::string, EvalReport>> rows;
            rows.emplace_back(ev_run, cmd_eval(ev_run, ev_qrels, ev_k));
            if (!ev_compare.empty()) rows.emplace_back(ev_compare, cmd_eval(ev_compare, ev_qrels, ev_k));
            std::cout << format_eval_table(rows);
            nlohmann::json j;
            j["runs"] = nlohmann::json::array();
            for (const auto& [name, r] : rows) j["runs"].push_back(eval_json(name, r));
            if (rows.size() == 2) {
                const auto w = compare_reports(rows[0].second, rows[1].second);
                char p[32];
                std::snprintf(p, sizeof p, "%.6g", w.p_value);
                std::cout << "\nWilcoxon signed-rank on AP: n=" << w.n << " W=" << w.statistic << " p=" << p
                          << (w.degenerate ? " [no differences]" : w.exact ? " (exact)" : " (normal approx.)")
                          << (!w.degenerate && w.low_power ? " [fewer than 6 differences]" : "") << '\n';
                j["wilcoxon"] = wilcoxon_json(w);
            }
            if (ev_json == "-") {
                std::cout << j.dump() << '\n';
            } else if (!ev_json.empty()) {
                std::ofstream out(ev_json, std::ios::binary);
                if (!out) throw IoError("cannot write '" + ev_json + "'");
                out << j.dump(2) << '\n';
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
