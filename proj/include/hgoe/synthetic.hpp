#pragma once

// Deterministic synthetic collection with planted relevance, used by the
// acceptance suite and for demos in place of a real test collection.
//
// Every keyword topic owns one document carrying three signature terms that
// appear nowhere else; the query is two of them, the relevant document is the
// owner and the relevant entity is the single entity the owner mentions.
// Every entity topic links each example entity to one target entity through a
// related-to link, and the target is the relevant answer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "hgoe/corpus.hpp"
#include "hgoe/error.hpp"
#include "hgoe/random.hpp"
#include "hgoe/ranking.hpp"
#include "hgoe/text.hpp"
#include "hgoe/trec.hpp"

namespace hgoe {

struct SyntheticSpec {
    std::size_t documents = 200;
    std::size_t entities = 50;
    /// Topics per task.
    std::size_t topics = 20;
    std::uint64_t seed = 1;
    /// 0 picks a size proportional to the number of documents.
    std::size_t vocabulary = 0;
    std::size_t embedding_dim = 16;
    std::size_t embedded_words = 3000;
};

struct SyntheticCollection {
    std::vector<Document> documents;
    std::vector<Topic> keyword_topics;
    std::vector<Topic> ref_topics;
    std::vector<Topic> elc_topics;
    std::map<Task, std::vector<Qrel>> qrels;
    std::vector<std::vector<std::string>> synsets;
    std::vector<std::pair<std::string, std::vector<float>>> embeddings;

    std::vector<Topic> all_topics() const {
        std::vector<Topic> out = keyword_topics;
        out.insert(out.end(), ref_topics.begin(), ref_topics.end());
        out.insert(out.end(), elc_topics.begin(), elc_topics.end());
        return out;
    }
};

namespace detail {

class WordFactory {
public:
    explicit WordFactory(Rng& rng) : rng_(rng) {}

    std::string make(std::size_t min_syllables, std::size_t max_syllables) {
        static constexpr std::string_view consonants = "bdfgklmnprstvz";
        static constexpr std::string_view vowels = "aeiou";
        for (;;) {
            const auto syllables = min_syllables + rng_.below(max_syllables - min_syllables + 1);
            std::string w;
            for (std::size_t s = 0; s < syllables; ++s) {
                w += consonants[rng_.below(consonants.size())];
                w += vowels[rng_.below(vowels.size())];
            }
            if (is_stopword(w) || !used_.insert(w).second) continue;
            return w;
        }
    }

private:
    Rng& rng_;
    std::unordered_set<std::string> used_;
};

/// Zipf-Mandelbrot: P(rank k) proportional to 1 / (k + shift)^exponent.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double exponent, double shift = 0.0) : cumulative_(n) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += 1.0 / std::pow(static_cast<double>(i + 1) + shift, exponent);
            cumulative_[i] = total;
        }
    }

    std::size_t operator()(Rng& rng) const {
        const double u = rng.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

inline std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

inline std::string render_sentence(const std::vector<std::string>& words) {
    std::string s = capitalize(join(words, " "));
    s += '.';
    return s;
}

} // namespace detail

inline SyntheticCollection generate_synthetic(const SyntheticSpec& spec) {
    if (spec.documents == 0) throw ParameterError("synthetic collection needs at least one document");
    if (spec.entities < 4) throw ParameterError("synthetic collection needs at least four entities");
    if (spec.topics > spec.documents) throw ParameterError("more topics than documents");
    if (spec.topics > spec.entities) throw ParameterError("more topics than entities");

    Rng rng(spec.seed);
    detail::WordFactory words(rng);
    const std::size_t vocab_size =
        spec.vocabulary ? spec.vocabulary : std::clamp<std::size_t>(4 * spec.documents, 2000, 20000);

    std::vector<std::string> vocab(vocab_size);
    for (auto& w : vocab) w = words.make(2, 3);
    std::vector<std::string> entity_labels(spec.entities);
    for (auto& e : entity_labels) e = detail::capitalize(words.make(2, 3)) + " " + detail::capitalize(words.make(2, 3));
    std::vector<std::array<std::string, 3>> signatures(spec.topics);
    for (auto& sig : signatures)
        for (auto& w : sig) w = words.make(3, 4);

    const detail::ZipfSampler background(vocab_size, 1.0, 10.0);
    SyntheticCollection out;

    // Document skeletons: sentences of background words.
    struct Draft {
        std::vector<std::vector<std::string>> sentences;
        std::set<std::size_t> mentions;
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> links;
        std::optional<std::size_t> topic;
    };
    std::vector<Draft> drafts(spec.documents);
    for (auto& d : drafts) {
        const auto n_sentences = 6 + rng.below(7);
        for (std::size_t s = 0; s < n_sentences; ++s) {
            const auto len = 6 + rng.below(7);
            std::vector<std::string> sentence;
            for (std::size_t w = 0; w < len; ++w) sentence.push_back(vocab[background(rng)]);
            d.sentences.push_back(std::move(sentence));
        }
        const auto n_mentions = 1 + rng.below(3);
        while (d.mentions.size() < n_mentions) d.mentions.insert(rng.below(spec.entities));
        if (rng.bernoulli(0.15)) {
            const auto subject = *std::next(d.mentions.begin(), static_cast<long>(rng.below(d.mentions.size())));
            std::vector<std::size_t> objects;
            const auto n_objects = 1 + rng.below(2);
            while (objects.size() < n_objects) {
                const auto o = rng.below(spec.entities);
                if (o != subject && std::find(objects.begin(), objects.end(), o) == objects.end()) objects.push_back(o);
            }
            d.links.emplace_back(subject, std::move(objects));
        }
    }

    auto keyword_doc_of = [&](std::size_t k) { return k * (spec.documents / std::max<std::size_t>(spec.topics, 1)); };
    auto doc_id_of = [](std::size_t i) { return "d" + std::to_string(i + 1); };

    // Keyword topics: signature terms repeated through the owner document,
    // which mentions only the topic's entity and links it to one other.
    for (std::size_t k = 0; k < spec.topics; ++k) {
        auto& d = drafts[keyword_doc_of(k)];
        d.topic = k;
        const auto entity = k % spec.entities;
        d.mentions = {entity};
        d.links = {{entity, {(entity + 1 + rng.below(spec.entities - 1)) % spec.entities}}};
        for (const auto& sig : signatures[k]) {
            for (int rep = 0; rep < 8; ++rep) {
                auto& sentence = d.sentences[rng.below(d.sentences.size())];
                sentence.insert(sentence.begin() + static_cast<long>(rng.below(sentence.size() + 1)), sig);
            }
        }
        Topic t;
        t.topic_id = "K" + std::to_string(k + 1);
        t.kind = TopicKind::Keyword;
        t.keyword_query = signatures[k][0] + " " + signatures[k][1];
        out.keyword_topics.push_back(t);
        out.qrels[Task::Docs].push_back({t.topic_id, doc_id_of(keyword_doc_of(k)), 1});
        out.qrels[Task::Entities].push_back({t.topic_id, encode_item_id(entity_labels[k % spec.entities]), 1});
    }

    std::vector<std::size_t> free_docs;
    for (std::size_t i = 0; i < drafts.size(); ++i)
        if (!drafts[i].topic) free_docs.push_back(i);
    if (free_docs.empty()) free_docs.push_back(0);

    auto plant_link = [&](std::size_t subject, std::size_t target) {
        auto& d = drafts[free_docs[rng.below(free_docs.size())]];
        d.mentions.insert(subject);
        d.links.emplace_back(subject, std::vector<std::size_t>{target});
    };
    auto pick_distinct = [&](std::size_t count, std::size_t avoid) {
        std::vector<std::size_t> picked;
        while (picked.size() < count) {
            const auto e = rng.below(spec.entities);
            if (e != avoid && std::find(picked.begin(), picked.end(), e) == picked.end()) picked.push_back(e);
        }
        return picked;
    };

    for (std::size_t j = 0; j < spec.topics; ++j) {
        const auto target = rng.below(spec.entities);
        const auto example = pick_distinct(1, target).front();
        plant_link(example, target);
        Topic t;
        t.topic_id = "R" + std::to_string(j + 1);
        t.kind = TopicKind::Entity;
        t.entities = {entity_labels[example]};
        out.ref_topics.push_back(t);
        out.qrels[Task::RelatedEntities].push_back({t.topic_id, encode_item_id(entity_labels[target]), 1});
    }
    for (std::size_t j = 0; j < spec.topics; ++j) {
        const auto target = rng.below(spec.entities);
        const auto examples = pick_distinct(2 + rng.below(2), target);
        Topic t;
        t.topic_id = "L" + std::to_string(j + 1);
        t.kind = TopicKind::EntitySet;
        for (auto e : examples) {
            plant_link(e, target);
            t.entities.push_back(entity_labels[e]);
        }
        out.elc_topics.push_back(t);
        out.qrels[Task::EntityListCompletion].push_back({t.topic_id, encode_item_id(entity_labels[target]), 1});
    }

    // Render: each mentioned entity's name is placed in one sentence; the
    // entity of a keyword-topic document is named in the first two sentences
    // holding a signature term.
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        auto& d = drafts[i];
        Document doc;
        doc.doc_id = doc_id_of(i);
        doc.title = detail::capitalize(d.sentences.front().front()) + " " + d.sentences.front().back();
        for (auto e : d.mentions) {
            std::vector<std::size_t> targets;
            if (d.topic) {
                const auto& sig = signatures[*d.topic];
                for (std::size_t c = 0; c < d.sentences.size(); ++c)
                    if (std::find_first_of(d.sentences[c].begin(), d.sentences[c].end(), sig.begin(), sig.end()) !=
                        d.sentences[c].end())
                        targets.push_back(c);
            }
            if (targets.size() > 2) targets.resize(2);
            if (targets.empty()) targets.push_back(rng.below(d.sentences.size()));
            auto name = tokenize(entity_labels[e]);
            for (auto& w : name) w = detail::capitalize(w);
            for (auto s : targets) {
                auto& sentence = d.sentences[s];
                const auto pos = rng.below(sentence.size() + 1);
                sentence.insert(sentence.begin() + static_cast<long>(pos), name.begin(), name.end());
            }
            doc.mentions.push_back({entity_labels[e], entity_labels[e]});
        }
        for (const auto& [subject, objects] : d.links) {
            EntityLink link;
            link.subject = entity_labels[subject];
            for (auto o : objects) link.objects.push_back(entity_labels[o]);
            doc.links.push_back(std::move(link));
        }
        std::vector<std::string> rendered;
        for (const auto& s : d.sentences) rendered.push_back(detail::render_sentence(s));
        doc.text = join(rendered, " ");
        out.documents.push_back(std::move(doc));
    }

    // Extension inputs: small synonym groups and clustered word vectors over
    // the most frequent vocabulary.
    for (std::size_t i = 0; i + 3 < vocab_size; i += 10) {
        std::vector<std::string> group{vocab[i], vocab[i + 1 + rng.below(std::min<std::size_t>(9, vocab_size - i - 1))]};
        if (rng.bernoulli(0.5)) group.push_back(vocab[std::min(vocab_size - 1, i + 2)]);
        std::sort(group.begin(), group.end());
        group.erase(std::unique(group.begin(), group.end()), group.end());
        if (group.size() >= 2) out.synsets.push_back(std::move(group));
    }
    const auto embedded = std::min(spec.embedded_words, vocab_size);
    std::vector<std::vector<float>> centers;
    for (std::size_t i = 0; i < embedded; ++i) {
        if (i % 20 == 0) {
            std::vector<float> c(spec.embedding_dim);
            for (auto& x : c) x = static_cast<float>(rng.uniform() * 2.0 - 1.0);
            centers.push_back(std::move(c));
        }
        std::vector<float> v = centers.back();
        for (auto& x : v) x += static_cast<float>((rng.uniform() * 2.0 - 1.0) * 0.3);
        out.embeddings.emplace_back(vocab[i], std::move(v));
    }
    return out;
}

/// File names written by write_synthetic().
struct SyntheticLayout {
    static constexpr const char* corpus = "corpus.jsonl";
    static constexpr const char* topics = "topics.jsonl";
    static constexpr const char* synsets = "synsets.txt";
    static constexpr const char* embeddings = "embeddings.txt";

    static std::string qrels(Task task) { return std::string("qrels_") + to_string(task) + ".txt"; }
};

inline void write_synthetic(const SyntheticCollection& c, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const fs::path dir(directory);
    write_corpus((dir / SyntheticLayout::corpus).string(), c.documents);
    write_topics((dir / SyntheticLayout::topics).string(), c.all_topics());
    for (const auto& [task, qrels] : c.qrels) write_qrels((dir / SyntheticLayout::qrels(task)).string(), qrels);

    std::ofstream syn(dir / SyntheticLayout::synsets, std::ios::binary);
    for (const auto& g : c.synsets) syn << join(g, " ") << '\n';
    std::ofstream emb(dir / SyntheticLayout::embeddings, std::ios::binary);
    if (!syn || !emb) throw IoError("cannot write extension files in '" + directory + "'");
    const auto dim = c.embeddings.empty() ? 0 : c.embeddings.front().second.size();
    emb << c.embeddings.size() << ' ' << dim << '\n';
    char buf[32];
    for (const auto& [word, vec] : c.embeddings) {
        emb << word;
        for (float x : vec) {
            std::snprintf(buf, sizeof buf, " %.6f", static_cast<double>(x));
            emb << buf;
        }
        emb << '\n';
    }
}

} // namespace hgoe
