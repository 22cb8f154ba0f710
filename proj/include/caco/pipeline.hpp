#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "caco/config.hpp"
#include "caco/data.hpp"
#include "caco/eval.hpp"
#include "caco/synthetic.hpp"
#include "caco/trainer.hpp"

namespace caco {

struct RunResult {
    Model model;
    std::vector<EpochLog> log;
    std::vector<LabeledExample> test;
    std::vector<std::string> warnings;
};

/// Label set of a run: configured labels, else the sorted labels of the training corpora.
inline LabelSet resolve_labels(const RunConfig& cfg) {
    if (!cfg.labels.empty()) return LabelSet(cfg.labels);
    std::set<std::string> names;
    for (const auto& s : cfg.source_corpora)
        for (auto& l : read_corpus_labels(s.path)) names.insert(l);
    if (!cfg.target_corpus.empty())
        for (auto& l : read_corpus_labels(cfg.target_corpus)) names.insert(l);
    return LabelSet(std::vector<std::string>(names.begin(), names.end()));
}

/// Loads every resource named by `cfg`, builds the model and trains it. One
/// random stream seeded with `cfg.seed` drives, in order: source sampling,
/// dictionary sampling, parameter initialization, training.
inline RunResult run_training(const RunConfig& cfg, Trainer::EpochCallback on_epoch = {}) {
    if (auto p = cfg.problems(); !p.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& s : p) msg += "\n  " + s;
        throw ConfigError(msg);
    }
    RunResult result;
    for (const auto& u : cfg.unused_resources())
        result.warnings.push_back("resource '" + u + "' is not used by " + std::string(variant_name(cfg.model.variant)));
    const TokenizerOptions tok{cfg.lowercase};
    Rng rng(cfg.seed);
    LabelSet labels = resolve_labels(cfg);

    std::vector<std::vector<LabeledExample>> corpora;
    for (const auto& s : cfg.source_corpora) corpora.push_back(load_corpus(s.path, labels, tok));
    std::vector<CorpusSample> samples;
    for (std::size_t i = 0; i < corpora.size(); ++i)
        samples.push_back({corpora[i], cfg.source_corpora[i].count.value_or(corpora[i].size())});
    TrainingData data;
    data.labeled = assemble_training_set(samples, rng);
    if (cfg.model.variant == Variant::sup) data.labeled = load_corpus(cfg.target_corpus, labels, tok);

    if (!cfg.dictionary.empty() && uses_dictionary_task(cfg.model.variant)) {
        auto dict = load_dictionary(cfg.dictionary, tok);
        data.dictionary = cfg.dict_sample == 0 ? dict : sample_dictionary(dict, cfg.dict_sample, rng);
    }
    std::optional<EmbeddingTable> pretrained;
    if (!cfg.embeddings.empty() && uses_mimick_task(cfg.model.variant)) {
        pretrained = load_embeddings(cfg.embeddings);
        data.mimick = mimick_targets(*pretrained);
    }
    std::optional<EmbeddingTable> clwe;
    if (uses_clwe(cfg.model.variant)) clwe = load_embeddings(cfg.clwe);
    if (cfg.model.distill) {
        auto d = load_distill_data(cfg.distill_data, tok);
        if (!(d.labels == labels)) throw ConfigError("distill_data labels do not match the training labels");
        data.distill = std::move(d.examples);
    }
    if (!cfg.test_corpus.empty()) result.test = load_corpus(cfg.test_corpus, labels, tok);

    CharVocabBuilder chars;
    chars.add(data.labeled);
    for (const auto& p : data.dictionary.pairs) chars.add(p.source).add(p.target);
    if (pretrained)
        for (const auto& w : pretrained->words()) chars.add(w);
    for (const auto& ex : data.distill) chars.add(ex.pair.source);
    chars.add(result.test);

    result.model = Model::create(cfg.model, labels, chars.build(), rng, clwe ? &*clwe : nullptr,
                                 corpus_vocabulary(data.labeled));
    if (result.model.clwe_reference) result.model.clwe_reference->path = std::filesystem::absolute(cfg.clwe).string();
    Trainer trainer(result.model, data, cfg.train);
    if (on_epoch) trainer.on_epoch(std::move(on_epoch));
    result.log = trainer.run(rng);
    return result;
}

/// Line-oriented loss log: resolved config as '#' comments, then one record per epoch.
inline void write_loss_log(std::ostream& out, const RunConfig& cfg, const std::vector<EpochLog>& log) {
    std::istringstream resolved(cfg.to_text());
    for (std::string line; std::getline(resolved, line);) out << "# " << line << '\n';
    out << "epoch\tL_s\tL_d\tL_e\tL_p\ttotal\n";
    for (const auto& e : log)
        out << e.epoch << '\t' << detail::format_double(e.classification) << '\t' << detail::format_double(e.dict) << '\t'
            << detail::format_double(e.mimick) << '\t' << detail::format_double(e.distill) << '\t'
            << detail::format_double(e.total) << '\n';
}

inline SyntheticLanguageSpec synthetic_spec_from(const KeyValues& kv) {
    using namespace detail;
    SyntheticLanguageSpec s;
    for (const auto& [k, v] : kv.entries) {
        if (k == "seed") s.seed = parse_size(k, v);
        else if (k == "labels") s.labels = split_list(v);
        else if (k == "label_consonants") s.label_consonants = split_list(v);
        else if (k == "filler_consonants") s.filler_consonants = v;
        else if (k == "vowels") s.vowels = v;
        else if (k == "keywords_per_label") s.keywords_per_label = parse_size(k, v);
        else if (k == "filler_words") s.filler_words = parse_size(k, v);
        else if (k == "min_syllables") s.min_syllables = parse_size(k, v);
        else if (k == "max_syllables") s.max_syllables = parse_size(k, v);
        else if (k == "train_docs") s.train_docs = parse_size(k, v);
        else if (k == "test_docs") s.test_docs = parse_size(k, v);
        else if (k == "min_keywords") s.min_keywords = parse_size(k, v);
        else if (k == "max_keywords") s.max_keywords = parse_size(k, v);
        else if (k == "min_filler") s.min_filler = parse_size(k, v);
        else if (k == "max_filler") s.max_filler = parse_size(k, v);
        else if (k == "distractor_probability") s.distractor_probability = parse_real(k, v);
        else if (k == "rules") s.rules = parse_rules(v);
        else if (k == "rewrite_probability") s.rewrite_probability = parse_real(k, v);
        else if (k == "embedding_dim") s.embedding_dim = parse_size(k, v);
        else if (k == "keywords_must_change") s.keywords_must_change = parse_bool(k, v);
        else if (k == "embedding_noise") s.embedding_noise = parse_real(k, v);
        else throw ConfigError("unknown synthetic spec key '" + k + "'");
    }
    return s;
}

} // namespace caco
