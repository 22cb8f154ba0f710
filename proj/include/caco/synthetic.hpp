#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "caco/data.hpp"
#include "caco/random.hpp"

namespace caco {

/// Ordered character substitution applied to every occurrence, left to right.
struct RewriteRule {
    std::u32string from;
    std::u32string to;

    friend bool operator==(const RewriteRule&, const RewriteRule&) = default;
};

/// A synthetic pair of related languages. Each label owns a keyword family
/// built from its own consonants; filler words use the remaining consonants.
/// A document's label is the family contributing most keywords. The target
/// language is the source language passed through `rules`.
struct SyntheticLanguageSpec {
    std::uint64_t seed = 1;
    std::vector<std::string> labels{"CCAT", "ECAT", "GCAT", "MCAT"};
    std::vector<std::string> label_consonants{"ktz", "mnv", "prx", "slj"};
    std::string filler_consonants = "bdfghcwy";
    std::string vowels = "aeiou";
    std::size_t keywords_per_label = 50;
    std::size_t filler_words = 300;
    std::size_t min_syllables = 2;
    std::size_t max_syllables = 3;
    std::size_t train_docs = 1500;
    std::size_t test_docs = 200;
    std::size_t min_keywords = 3;
    std::size_t max_keywords = 5;
    std::size_t min_filler = 5;
    std::size_t max_filler = 9;
    /// Chance that a document also carries one keyword of another label.
    double distractor_probability = 0.3;
    std::vector<RewriteRule> rules;
    /// Chance that a given rule applies to a given word (fixed per word and seed).
    double rewrite_probability = 1.0;
    /// Draw only keywords that the rules change, so no keyword survives into
    /// the target language verbatim. Ignored when there are no rules.
    bool keywords_must_change = true;
    std::size_t embedding_dim = 40;
    double embedding_noise = 0.1;
};

struct SyntheticBenchmark {
    LabelSet labels;
    std::vector<LabeledExample> source;
    /// Held-out source documents; `target` is exactly these passed through the rules.
    std::vector<LabeledExample> source_test;
    std::vector<LabeledExample> target;
    BilingualDictionary dictionary;
    EmbeddingTable embeddings;
    /// Family of each source word: label index, or labels.size() for filler.
    std::map<Word, std::size_t> family;
};

inline std::u32string apply_rule(std::u32string_view word, const RewriteRule& rule) {
    if (rule.from.empty()) return std::u32string(word);
    std::u32string out;
    std::size_t i = 0;
    while (i < word.size()) {
        if (word.substr(i, rule.from.size()) == rule.from) {
            out += rule.to;
            i += rule.from.size();
        } else {
            out.push_back(word[i++]);
        }
    }
    return out;
}

/// Applies each rule in order; whether rule k touches `word` depends only on (word, seed, k).
inline std::u32string rewrite_word(const std::u32string& word, std::span<const RewriteRule> rules, double probability,
                                   std::uint64_t seed) {
    std::u32string out = word;
    for (std::size_t k = 0; k < rules.size(); ++k) {
        if (probability < 1.0) {
            std::uint64_t h = fnv1a(&seed, sizeof seed);
            h = fnv1a(&k, sizeof k, h);
            h = fnv1a(word.data(), word.size() * sizeof(char32_t), h);
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            if (u >= probability) continue;
        }
        out = apply_rule(out, rules[k]);
    }
    return out;
}

/// Parses "o>uo,e>ie" into rules.
inline std::vector<RewriteRule> parse_rules(std::string_view text) {
    std::vector<RewriteRule> rules;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) {
            auto gt = item.find('>');
            if (gt == std::string_view::npos || gt == 0)
                throw ConfigError("rewrite rule '" + std::string(item) + "' must look like from>to");
            rules.push_back({utf8_decode(item.substr(0, gt)), utf8_decode(item.substr(gt + 1))});
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return rules;
}

inline std::string format_rules(std::span<const RewriteRule> rules) {
    std::string out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (i) out += ',';
        out += utf8_encode(rules[i].from) + '>' + utf8_encode(rules[i].to);
    }
    return out;
}

inline SyntheticBenchmark gen_synthetic_pair(const SyntheticLanguageSpec& spec) {
    const std::size_t L = spec.labels.size();
    if (L == 0 || spec.label_consonants.size() != L)
        throw ConfigError("synthetic spec needs one consonant set per label");
    if (spec.keywords_per_label == 0 || spec.filler_words == 0 || spec.train_docs == 0 || spec.test_docs == 0 ||
        spec.min_keywords == 0 || spec.min_syllables == 0)
        throw ConfigError("synthetic sizes must be positive");
    if (spec.min_keywords > spec.max_keywords || spec.min_filler > spec.max_filler ||
        spec.min_syllables > spec.max_syllables)
        throw ConfigError("synthetic ranges must satisfy min <= max");
    if (spec.embedding_dim < L + 1) throw ConfigError("embedding_dim must be at least labels + 1");
    if (spec.vowels.empty() || spec.filler_consonants.empty()) throw ConfigError("vowels and filler consonants required");

    Rng rng(spec.seed);
    SyntheticBenchmark bench;
    bench.labels = LabelSet(spec.labels);

    // Vocabulary: per-family distinct words.
    const std::u32string vowels = utf8_decode(spec.vowels);
    std::set<Word> used;
    std::vector<std::vector<Word>> families(L + 1);
    auto make_family = [&](std::size_t fam, const std::string& consonants, std::size_t count) {
        const std::u32string cons = utf8_decode(consonants);
        if (cons.empty()) throw ConfigError("empty consonant set");
        std::size_t attempts = 0;
        while (families[fam].size() < count) {
            if (++attempts > count * 1000)
                throw ConfigError("cannot generate " + std::to_string(count) + " distinct words from '" + consonants + "'");
            const std::size_t syllables = spec.min_syllables + rng.index(spec.max_syllables - spec.min_syllables + 1);
            Word w;
            for (std::size_t s = 0; s < syllables; ++s) {
                w.push_back(cons[rng.index(cons.size())]);
                w.push_back(vowels[rng.index(vowels.size())]);
            }
            if (fam < L && spec.keywords_must_change && !spec.rules.empty() &&
                rewrite_word(w, spec.rules, spec.rewrite_probability, spec.seed) == w)
                continue;
            if (used.insert(w).second) families[fam].push_back(w);
        }
    };
    for (std::size_t y = 0; y < L; ++y) make_family(y, spec.label_consonants[y], spec.keywords_per_label);
    make_family(L, spec.filler_consonants, spec.filler_words);

    // Rewrite map; distinct families must not meet in one surface form.
    std::unordered_map<Word, Word> rewrite;
    std::map<Word, std::size_t> target_family;
    for (std::size_t fam = 0; fam <= L; ++fam) {
        for (const auto& w : families[fam]) {
            Word t = rewrite_word(w, spec.rules, spec.rewrite_probability, spec.seed);
            if (t.empty()) throw ConfigError("rewrite rules erase the word '" + utf8_encode(w) + "'");
            auto [it, inserted] = target_family.emplace(t, fam);
            if (!inserted && it->second != fam)
                throw ConfigError("rewrite rules collapse words of different families into '" + utf8_encode(t) + "'");
            bench.dictionary.pairs.push_back({w, t});
            bench.family.emplace(w, fam);
            rewrite.emplace(w, std::move(t));
        }
    }

    // Embedding table: family indicator plus Gaussian noise.
    bench.embeddings = EmbeddingTable(spec.embedding_dim);
    for (std::size_t fam = 0; fam <= L; ++fam) {
        for (const auto& w : families[fam]) {
            std::vector<double> v(spec.embedding_dim);
            for (double& x : v) x = spec.embedding_noise * rng.normal();
            v[fam] += 1.0;
            bench.embeddings.add(w, std::move(v));
        }
    }

    auto pick = [&](const std::vector<Word>& pool) { return pool[rng.index(pool.size())]; };
    auto make_doc = [&](std::size_t label) {
        Document d;
        const std::size_t k = spec.min_keywords + rng.index(spec.max_keywords - spec.min_keywords + 1);
        for (std::size_t i = 0; i < k; ++i) d.words.push_back(pick(families[label]));
        if (L > 1 && k > 1 && rng.uniform() < spec.distractor_probability) {
            std::size_t other = rng.index(L - 1);
            if (other >= label) ++other;
            d.words.push_back(pick(families[other]));
        }
        const std::size_t f = spec.min_filler + rng.index(spec.max_filler - spec.min_filler + 1);
        for (std::size_t i = 0; i < f; ++i) d.words.push_back(pick(families[L]));
        rng.shuffle(d.words);
        return d;
    };

    // Balanced labels: document i gets label i mod L, then the corpus is shuffled.
    for (std::size_t i = 0; i < spec.train_docs; ++i) bench.source.push_back({make_doc(i % L), i % L});
    rng.shuffle(bench.source);
    for (std::size_t i = 0; i < spec.test_docs; ++i) bench.source_test.push_back({make_doc(i % L), i % L});
    rng.shuffle(bench.source_test);
    for (const auto& held_out : bench.source_test) {
        LabeledExample ex = held_out;
        for (auto& w : ex.document.words) w = rewrite.at(w);
        bench.target.push_back(std::move(ex));
    }
    return bench;
}

/// Writes source.tsv, source_test.tsv, target.tsv, dictionary.tsv and embeddings.txt into `dir`.
inline void write_synthetic(const std::filesystem::path& dir, const SyntheticBenchmark& bench) {
    std::filesystem::create_directories(dir);
    write_corpus(dir / "source.tsv", bench.source, bench.labels);
    write_corpus(dir / "source_test.tsv", bench.source_test, bench.labels);
    write_corpus(dir / "target.tsv", bench.target, bench.labels);
    write_dictionary(dir / "dictionary.tsv", bench.dictionary);
    write_embeddings(dir / "embeddings.txt", bench.embeddings);
}

} // namespace caco
