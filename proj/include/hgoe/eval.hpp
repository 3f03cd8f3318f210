#pragma once

// Retrieval metrics (AP, P@k, NDCG@k, MAP, GMAP) and the Wilcoxon
// signed-rank test for paired per-topic scores.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hgoe/corpus.hpp"
#include "hgoe/error.hpp"
#include "hgoe/trec.hpp"

namespace hgoe {

using Judgments = std::map<std::string, int>;

/// Binary relevance: grade >= 1.
inline double average_precision(std::span<const std::string> ranked, const Judgments& qrels) {
    std::size_t relevant = 0;
    for (const auto& [item, grade] : qrels)
        if (grade > 0) ++relevant;
    if (relevant == 0) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        auto it = qrels.find(ranked[i]);
        if (it != qrels.end() && it->second > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant);
}

inline double precision_at_k(std::span<const std::string> ranked, const Judgments& qrels, std::size_t k = 10) {
    if (k == 0) throw ParameterError("k must be positive");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        auto it = qrels.find(ranked[i]);
        if (it != qrels.end() && it->second > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

/// Gains 2^grade - 1, discount 1/log2(rank + 1), ideal ordering from the qrels.
inline double ndcg_at_k(std::span<const std::string> ranked, const Judgments& qrels, std::size_t k = 10) {
    if (k == 0) throw ParameterError("k must be positive");
    auto gain = [](int grade) { return std::pow(2.0, grade) - 1.0; };
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        auto it = qrels.find(ranked[i]);
        if (it != qrels.end()) dcg += gain(it->second) / std::log2(static_cast<double>(i) + 2.0);
    }
    std::vector<int> grades;
    for (const auto& [item, grade] : qrels) grades.push_back(grade);
    std::sort(grades.rbegin(), grades.rend());
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) ideal += gain(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
    return ideal > 0.0 ? dcg / ideal : 0.0;
}

struct TopicResult {
    std::string topic_id;
    double ap = 0.0;
    double p_at_k = 0.0;
    double ndcg_at_k = 0.0;
    std::size_t judged = 0;
    std::size_t retrieved = 0;
};

struct EvalReport {
    std::vector<TopicResult> topics;
    double map = 0.0;
    double gmap = 0.0;
    double mean_p_at_k = 0.0;
    double mean_ndcg_at_k = 0.0;
    std::size_t k = 10;
    /// Mean wall time per query in seconds, when timings were supplied.
    double avg_time_per_query = 0.0;
};

inline constexpr double kGmapEpsilon = 1e-5;

/// Evaluates every topic that has judgments. Topics absent from the run score
/// zero on every metric; topics without judgments are ignored.
inline EvalReport aggregate(const Run& run, const QrelSet& qrels, std::size_t k = 10, double gmap_epsilon = kGmapEpsilon) {
    EvalReport report;
    report.k = k;
    const std::vector<std::string> none;
    double log_sum = 0.0;
    for (const auto& [topic, judgments] : qrels.topics()) {
        auto it = run.find(topic);
        const auto& ranked = it == run.end() ? none : it->second;
        TopicResult r;
        r.topic_id = topic;
        r.ap = average_precision(ranked, judgments);
        r.p_at_k = precision_at_k(ranked, judgments, k);
        r.ndcg_at_k = ndcg_at_k(ranked, judgments, k);
        r.judged = judgments.size();
        r.retrieved = ranked.size();
        report.map += r.ap;
        report.mean_p_at_k += r.p_at_k;
        report.mean_ndcg_at_k += r.ndcg_at_k;
        log_sum += std::log(std::max(r.ap, gmap_epsilon));
        report.topics.push_back(std::move(r));
    }
    if (!report.topics.empty()) {
        const auto n = static_cast<double>(report.topics.size());
        report.map /= n;
        report.mean_p_at_k /= n;
        report.mean_ndcg_at_k /= n;
        report.gmap = std::exp(log_sum / n);
    }
    return report;
}

// --- Wilcoxon signed-rank ---------------------------------------------------

struct WilcoxonResult {
    /// min(W+, W-)
    double statistic = 0.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    bool exact = false;
    /// No non-zero differences: p is reported as 1.
    bool degenerate = false;
    /// Fewer than 6 non-zero differences; the p-value cannot reach usual levels.
    bool low_power = false;
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Two-sided test. Zero differences are dropped and tied magnitudes share
/// their average rank. For n <= 25 the p-value comes from the exact null
/// distribution of W+ over the observed (possibly tied) ranks; above that a
/// normal approximation with tie and continuity corrections is used.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ParameterError("wilcoxon needs paired samples of equal length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] - b[i] != 0.0) diffs.push_back(a[i] - b[i]);

    WilcoxonResult res;
    res.n = diffs.size();
    if (diffs.empty()) {
        res.degenerate = true;
        res.low_power = true;
        return res;
    }
    res.low_power = res.n < 6;

    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
    // Ranks are kept doubled so that average ranks of ties stay integral.
    std::vector<std::int64_t> rank2(diffs.size());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        const auto doubled_avg = static_cast<std::int64_t>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t) rank2[order[t]] = doubled_avg;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    std::int64_t wplus2 = 0, total2 = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        total2 += rank2[i];
        if (diffs[i] > 0) wplus2 += rank2[i];
    }
    res.w_plus = static_cast<double>(wplus2) / 2.0;
    res.w_minus = static_cast<double>(total2 - wplus2) / 2.0;
    res.statistic = std::min(res.w_plus, res.w_minus);
    const auto stat2 = std::min(wplus2, total2 - wplus2);

    if (res.n <= kWilcoxonExactLimit) {
        // counts[s] = number of sign assignments whose doubled positive rank sum is s.
        std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
        counts[0] = 1.0;
        std::int64_t reach = 0;
        for (auto r : rank2) {
            for (std::int64_t s = reach; s >= 0; --s)
                if (counts[static_cast<std::size_t>(s)] != 0.0) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
            reach += r;
        }
        double tail = 0.0;
        for (std::int64_t s = 0; s <= stat2; ++s) tail += counts[static_cast<std::size_t>(s)];
        res.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(res.n)));
        res.exact = true;
    } else {
        const double n = static_cast<double>(res.n);
        const double mean = n * (n + 1.0) / 4.0;
        const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, std::abs(res.statistic - mean) - 0.5) / std::sqrt(var);
        res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
    return res;
}

} // namespace hgoe
