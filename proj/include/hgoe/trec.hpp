#pragma once

// TREC run files: `topic_id Q0 item_id rank score tag`, one line per result.

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hgoe/error.hpp"
#include "hgoe/ranking.hpp"

namespace hgoe {

/// Run and qrels columns are whitespace-separated, so whitespace inside an
/// item id (entity labels) is written as '_'.
inline std::string encode_item_id(std::string_view id) {
    std::string out(id);
    for (auto& c : out)
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') c = '_';
    return out;
}

inline void write_run(std::ostream& out, const RankedList& list, std::string_view tag, std::size_t depth = 1000) {
    char score[32];
    const auto n = std::min(depth, list.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(score, sizeof score, "%.10f", list.entries[i].score);
        out << list.topic_id << " Q0 " << encode_item_id(list.entries[i].item_id) << ' ' << (i + 1) << ' ' << score
            << ' ' << tag << '\n';
    }
}

/// topic -> item ids in rank order.
using Run = std::map<std::string, std::vector<std::string>>;

inline Run load_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open run file '" + path + "'");
    std::map<std::string, std::vector<std::pair<long, std::string>>> rows;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string topic, q0, item, tag;
        long rank = 0;
        double score = 0.0;
        if (!(ss >> topic >> q0 >> item >> rank >> score >> tag))
            throw ParseError("expected 'topic_id Q0 item_id rank score tag'", n);
        rows[topic].emplace_back(rank, item);
    }
    Run run;
    for (auto& [topic, items] : rows) {
        std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        auto& out = run[topic];
        for (auto& [rank, item] : items) out.push_back(std::move(item));
    }
    return run;
}

} // namespace hgoe
