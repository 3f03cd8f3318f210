#pragma once

// Documents, topics and relevance judgments, plus their line-oriented file
// formats. Corpus and topic files hold one JSON object per line; qrels follow
// the TREC `topic Q0 item grade` convention.

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hgoe/error.hpp"

namespace hgoe {

using json = nlohmann::json;

struct EntityMention {
    std::string entity_label;
    std::optional<std::string> surface;

    bool operator==(const EntityMention&) const = default;
};

/// Subject-grouped relation: one subject entity pointing at a set of objects.
struct EntityLink {
    std::string subject;
    std::vector<std::string> objects;
    /// Allows a subject that is not among the document's mentions.
    bool label_only = false;

    bool operator==(const EntityLink&) const = default;
};

struct Document {
    std::string doc_id;
    std::optional<std::string> title;
    std::string text;
    std::vector<EntityMention> mentions;
    std::vector<EntityLink> links;

    bool operator==(const Document&) const = default;
};

enum class TopicKind { Keyword, Entity, EntitySet };

struct Topic {
    std::string topic_id;
    TopicKind kind = TopicKind::Keyword;
    std::optional<std::string> keyword_query;
    std::vector<std::string> entities;

    bool operator==(const Topic&) const = default;
};

struct Qrel {
    std::string topic_id;
    std::string item_id;
    int grade = 0;

    bool operator==(const Qrel&) const = default;
};

/// Judgments grouped by topic: topic -> item -> grade.
class QrelSet {
public:
    QrelSet() = default;
    explicit QrelSet(const std::vector<Qrel>& qrels) {
        for (const auto& q : qrels) add(q);
    }

    void add(const Qrel& q) {
        auto [it, inserted] = by_topic_[q.topic_id].emplace(q.item_id, q.grade);
        if (!inserted) throw ParseError("duplicate judgment for (" + q.topic_id + ", " + q.item_id + ")");
    }

    const std::map<std::string, int>& for_topic(const std::string& topic_id) const {
        static const std::map<std::string, int> empty;
        auto it = by_topic_.find(topic_id);
        return it == by_topic_.end() ? empty : it->second;
    }

    const std::map<std::string, std::map<std::string, int>>& topics() const { return by_topic_; }

private:
    std::map<std::string, std::map<std::string, int>> by_topic_;
};

// --- JSON mapping ----------------------------------------------------------

inline const char* to_string(TopicKind kind) {
    switch (kind) {
    case TopicKind::Keyword: return "keyword";
    case TopicKind::Entity: return "entity";
    case TopicKind::EntitySet: return "entity_set";
    }
    return "?";
}

inline TopicKind parse_topic_kind(const std::string& s) {
    if (s == "keyword") return TopicKind::Keyword;
    if (s == "entity") return TopicKind::Entity;
    if (s == "entity_set") return TopicKind::EntitySet;
    throw ParseError("unknown topic kind '" + s + "'");
}

/// Throws ParseError when the document breaks a corpus invariant.
inline void validate(const Document& doc) {
    if (doc.doc_id.empty()) throw ParseError("empty doc_id");
    std::set<std::string> mentioned;
    for (const auto& m : doc.mentions) {
        if (m.entity_label.empty()) throw ParseError("mention with empty entity_label in " + doc.doc_id);
        mentioned.insert(m.entity_label);
    }
    for (const auto& link : doc.links) {
        if (link.subject.empty()) throw ParseError("link with empty subject in " + doc.doc_id);
        if (link.objects.empty()) throw ParseError("link from '" + link.subject + "' has no objects");
        for (const auto& o : link.objects) {
            if (o.empty()) throw ParseError("link from '" + link.subject + "' has an empty object");
            if (o == link.subject) throw ParseError("link subject '" + o + "' listed among its objects");
        }
        if (!link.label_only && !mentioned.count(link.subject))
            throw ParseError("link subject '" + link.subject + "' is not mentioned in " + doc.doc_id);
    }
}

inline json to_json_value(const Document& doc) {
    json j;
    j["doc_id"] = doc.doc_id;
    if (doc.title) j["title"] = *doc.title;
    j["text"] = doc.text;
    j["mentions"] = json::array();
    for (const auto& m : doc.mentions) {
        json jm{{"entity_label", m.entity_label}};
        if (m.surface) jm["surface"] = *m.surface;
        j["mentions"].push_back(std::move(jm));
    }
    j["links"] = json::array();
    for (const auto& l : doc.links) {
        json jl{{"subject", l.subject}, {"objects", l.objects}};
        if (l.label_only) jl["label_only"] = true;
        j["links"].push_back(std::move(jl));
    }
    return j;
}

inline Document document_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("record is not an object");
    Document doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    if (auto it = j.find("title"); it != j.end() && !it->is_null()) doc.title = it->get<std::string>();
    doc.text = j.at("text").get<std::string>();
    if (auto it = j.find("mentions"); it != j.end()) {
        for (const auto& jm : *it) {
            EntityMention m;
            m.entity_label = jm.at("entity_label").get<std::string>();
            if (auto s = jm.find("surface"); s != jm.end() && !s->is_null()) m.surface = s->get<std::string>();
            doc.mentions.push_back(std::move(m));
        }
    }
    if (auto it = j.find("links"); it != j.end()) {
        for (const auto& jl : *it) {
            EntityLink l;
            l.subject = jl.at("subject").get<std::string>();
            l.objects = jl.at("objects").get<std::vector<std::string>>();
            l.label_only = jl.value("label_only", false);
            doc.links.push_back(std::move(l));
        }
    }
    validate(doc);
    return doc;
}

inline std::string serialize(const Document& doc) { return to_json_value(doc).dump(); }

// --- Corpus reading ---------------------------------------------------------

struct LineError {
    std::size_t line = 0;
    std::string message;
};

/// Streams documents from a corpus file. Malformed lines are recorded and
/// skipped; a duplicate doc_id aborts with ParseError.
class CorpusReader {
public:
    explicit CorpusReader(const std::string& path) : in_(path), path_(path) {
        if (!in_) throw IoError("cannot open corpus file '" + path + "'");
    }

    std::optional<Document> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            Document doc;
            try {
                doc = document_from_json(json::parse(line));
            } catch (const std::exception& e) {
                errors_.push_back({line_no_, e.what()});
                continue;
            }
            if (!seen_.insert(doc.doc_id).second)
                throw ParseError("duplicate doc_id '" + doc.doc_id + "' in " + path_, line_no_);
            return doc;
        }
        return std::nullopt;
    }

    const std::vector<LineError>& errors() const { return errors_; }

private:
    std::ifstream in_;
    std::string path_;
    std::size_t line_no_ = 0;
    std::unordered_set<std::string> seen_;
    std::vector<LineError> errors_;
};

struct CorpusLoad {
    std::vector<Document> documents;
    std::vector<LineError> errors;
};

inline CorpusLoad load_corpus(const std::string& path) {
    CorpusReader reader(path);
    CorpusLoad out;
    while (auto doc = reader.next()) out.documents.push_back(std::move(*doc));
    out.errors = reader.errors();
    return out;
}

inline void write_corpus(const std::string& path, const std::vector<Document>& docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus file '" + path + "'");
    for (const auto& d : docs) out << serialize(d) << '\n';
}

// --- Topics and qrels -------------------------------------------------------

inline json to_json_value(const Topic& t) {
    json j{{"topic_id", t.topic_id}, {"kind", to_string(t.kind)}};
    if (t.keyword_query) j["keyword_query"] = *t.keyword_query;
    if (t.kind != TopicKind::Keyword) j["entities"] = t.entities;
    return j;
}

inline Topic topic_from_json(const json& j) {
    Topic t;
    t.topic_id = j.at("topic_id").get<std::string>();
    if (t.topic_id.empty()) throw ParseError("empty topic_id");
    t.kind = parse_topic_kind(j.at("kind").get<std::string>());
    const bool has_query = j.contains("keyword_query") && !j["keyword_query"].is_null();
    const bool has_entities = j.contains("entities") && !j["entities"].is_null();
    if (t.kind == TopicKind::Keyword) {
        if (!has_query || has_entities) throw ParseError("keyword topic needs keyword_query and no entities");
        t.keyword_query = j["keyword_query"].get<std::string>();
    } else {
        if (!has_entities || has_query) throw ParseError("entity topic needs entities and no keyword_query");
        t.entities = j["entities"].get<std::vector<std::string>>();
        if (t.entities.empty()) throw ParseError("entity topic with no entities");
        if (t.kind == TopicKind::Entity && t.entities.size() != 1)
            throw ParseError("entity topic must name exactly one entity");
        for (const auto& e : t.entities)
            if (e.empty()) throw ParseError("empty entity label in topic " + t.topic_id);
    }
    return t;
}

inline std::vector<Topic> load_topics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open topics file '" + path + "'");
    std::vector<Topic> topics;
    std::set<std::string> ids;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            topics.push_back(topic_from_json(json::parse(line)));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), n);
        } catch (const std::exception& e) {
            throw ParseError(e.what(), n);
        }
        if (!ids.insert(topics.back().topic_id).second)
            throw ParseError("duplicate topic_id '" + topics.back().topic_id + "'", n);
    }
    return topics;
}

inline void write_topics(const std::string& path, const std::vector<Topic>& topics) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write topics file '" + path + "'");
    for (const auto& t : topics) out << to_json_value(t).dump() << '\n';
}

/// Parses one `topic_id Q0 item_id grade` line.
inline Qrel parse_qrel_line(const std::string& line, std::size_t line_no = 0) {
    std::istringstream ss(line);
    std::string topic, iter, item, grade_s, extra;
    if (!(ss >> topic >> iter >> item >> grade_s) || (ss >> extra))
        throw ParseError("expected 'topic_id Q0 item_id grade'", line_no);
    std::size_t used = 0;
    long grade = 0;
    try {
        grade = std::stol(grade_s, &used);
    } catch (const std::exception&) {
        throw ParseError("grade '" + grade_s + "' is not an integer", line_no);
    }
    if (used != grade_s.size()) throw ParseError("grade '" + grade_s + "' is not an integer", line_no);
    if (grade < 0) throw ParseError("negative grade " + grade_s, line_no);
    return Qrel{topic, item, static_cast<int>(grade)};
}

inline std::vector<Qrel> load_qrels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open qrels file '" + path + "'");
    std::vector<Qrel> qrels;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto q = parse_qrel_line(line, n);
        if (!seen.emplace(q.topic_id, q.item_id).second)
            throw ParseError("duplicate judgment for (" + q.topic_id + ", " + q.item_id + ")", n);
        qrels.push_back(std::move(q));
    }
    return qrels;
}

inline void write_qrels(const std::string& path, const std::vector<Qrel>& qrels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write qrels file '" + path + "'");
    for (const auto& q : qrels) out << q.topic_id << " Q0 " << q.item_id << ' ' << q.grade << '\n';
}

} // namespace hgoe
