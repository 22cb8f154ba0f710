#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "caco/model.hpp"

namespace caco {

struct ClassificationReport {
    double accuracy = 0.0;
    /// confusion[gold][predicted]
    std::vector<std::vector<std::size_t>> confusion;
};

inline ClassificationReport evaluate(Model& model, std::span<const LabeledExample> test) {
    if (test.empty()) throw Error("evaluate: empty test set");
    const std::size_t L = model.labels.size();
    ClassificationReport r;
    r.confusion.assign(L, std::vector<std::size_t>(L, 0));
    std::size_t correct = 0;
    for (const auto& ex : test) {
        const std::size_t y = predict(model, ex.document).label;
        correct += y == ex.label;
        r.confusion.at(ex.label).at(y) += 1;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return r;
}

inline double accuracy(Model& model, std::span<const LabeledExample> test) { return evaluate(model, test).accuracy; }

enum class Metric { euclidean, cosine };

inline Metric parse_metric(std::string_view s) {
    if (s == "euclidean") return Metric::euclidean;
    if (s == "cosine") return Metric::cosine;
    throw ConfigError("unknown metric '" + std::string(s) + "' (expected euclidean or cosine)");
}

namespace detail {

/// Smaller is closer.
inline double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    if (metric == Metric::euclidean) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return s;
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - dot / std::sqrt(na * nb);
}

} // namespace detail

/// Nearest target word for `query`; ties go to the lexicographically smallest word.
inline const Word& nearest_word(std::span<const double> query, const EmbeddingTable& targets, Metric metric) {
    if (targets.empty()) throw Error("nearest_word: empty candidate set");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double d = detail::distance(query, targets.row(i), metric);
        if (d < best_d || (d == best_d && targets.word(i) < targets.word(best))) {
            best = i;
            best_d = d;
        }
    }
    return targets.word(best);
}

/// Precision at one of nearest-neighbour translation: for each gold pair the
/// source vector's nearest target must be the gold target.
inline double word_translate(const EmbeddingTable& sources, const EmbeddingTable& targets,
                             const BilingualDictionary& gold, Metric metric = Metric::euclidean) {
    if (targets.empty()) throw Error("word_translate: empty candidate set");
    if (gold.pairs.empty()) throw Error("word_translate: empty gold dictionary");
    if (sources.dim() != targets.dim())
        throw ShapeError("word_translate: source dimension " + std::to_string(sources.dim()) + " vs target dimension " +
                         std::to_string(targets.dim()));
    std::size_t hits = 0;
    for (const auto& p : gold.pairs) {
        auto i = sources.find(p.source);
        if (!i) throw Error("word_translate: no vector for source word '" + utf8_encode(p.source) + "'");
        hits += nearest_word(sources.row(*i), targets, metric) == p.target;
    }
    return static_cast<double>(hits) / static_cast<double>(gold.pairs.size());
}

} // namespace caco
