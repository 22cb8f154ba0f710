// Acceptance suite. Prints one line per criterion:
//   PASS criterion N: <what> | <measured values>
// Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "caco/caco.hpp"

using namespace caco;
namespace fs = std::filesystem;

namespace {

// Thresholds, pinned here and nowhere else.
constexpr double c1_max_rel_error = 1e-4;
constexpr double c1_eps = 1e-4;
constexpr std::size_t c2_max_epochs = 200;
constexpr double c2_max_loss = 0.01;
constexpr std::size_t c3_seeds = 10;
constexpr std::size_t c3_epochs = 3;
constexpr double c3_min_src = 0.85;
constexpr double c3_max_lookup = 0.40;
constexpr std::size_t c4_seeds = 10;
constexpr std::size_t c4_epochs = 3;
constexpr std::size_t c4_train_docs = 500;
constexpr std::size_t c4_dict_pairs = 100;
constexpr double c4_src_lo = 0.5, c4_src_hi = 0.7;
constexpr double c4_max_distance_ratio = 0.5;
constexpr std::size_t c5_words = 50;
constexpr std::size_t c5_epochs = 200;
constexpr double c5_max_ratio = 0.01;
constexpr std::size_t c6_pairs = 200;
constexpr std::size_t c6_epochs = 100;
constexpr double c6_max_ratio = 0.5;
constexpr double c7_min_p1 = 0.80;
constexpr double c7_max_control = 0.01;
constexpr std::size_t c8_docs = 100;
constexpr std::size_t c9_docs = 1000;
constexpr double c9_norm_tol = 1e-9;

struct Outcome {
    bool pass;
    std::string what;
    std::string measured;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << v;
    return os.str();
}

const char* c3_rules = "o>uo,e>ie";
const char* c4_rules = "k>q,t>ŧ,m>ñ,n>ň,p>þ,r>ř,s>ś,l>ł,o>uo,e>ie";

SyntheticLanguageSpec benchmark_spec(std::uint64_t seed, const char* rules, std::size_t train_docs = 1500) {
    SyntheticLanguageSpec s;
    s.seed = seed;
    s.rules = parse_rules(rules);
    s.train_docs = train_docs;
    s.test_docs = 200;
    return s;
}

CharVocab benchmark_chars(const SyntheticBenchmark& b) {
    CharVocabBuilder chars;
    chars.add(b.source).add(b.target);
    for (const auto& p : b.dictionary.pairs) chars.add(p.source).add(p.target);
    return chars.build();
}

/// Mirrors the training pipeline's random order: dictionary sample, init, training.
struct Trained {
    Model model;
    BilingualDictionary dict_sample;
};

Trained train_variant(Variant v, const SyntheticBenchmark& b, std::uint64_t seed, std::size_t epochs,
                      std::size_t dict_pairs = 0) {
    Rng rng(seed);
    TrainingData data;
    data.labeled = b.source;
    BilingualDictionary sample;
    if (dict_pairs > 0) sample = sample_dictionary(b.dictionary, dict_pairs, rng);
    if (uses_dictionary_task(v)) data.dictionary = sample;
    ModelConfig mc;
    mc.variant = v;
    Model m = Model::create(mc, b.labels, benchmark_chars(b), rng, nullptr, corpus_vocabulary(b.source));
    TrainConfig tc;
    tc.epochs = epochs;
    train(m, data, tc, rng);
    return {std::move(m), std::move(sample)};
}

double mean_pair_distance(Model& m, const BilingualDictionary& d) {
    double s = 0.0;
    for (const auto& p : d.pairs) {
        Graph g;
        ForwardPass pass(g, m);
        s += squared_distance(pass.characters(p.source), pass.characters(p.target)).value().item();
    }
    return s / static_cast<double>(d.size());
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// --- 1 -------------------------------------------------------------------

Outcome criterion1() {
    ModelConfig c;
    c.variant = Variant::all;
    c.distill = true;
    c.embedder = {3, 4, 5};
    c.dan_hidden = {5, 5};
    c.dropout = 0.0;
    CharVocabBuilder chars;
    chars.add(utf8_decode("abcde"));
    Rng rng(1);
    Model m = Model::create(c, LabelSet({"x", "y", "z"}), chars.build(), rng);
    const std::vector<LabeledExample> labeled{{tokenize("abe cad"), 0}, {tokenize("dab"), 1}, {tokenize("ee ca"), 2}};
    const std::vector<WordPair> dict{{utf8_decode("abe"), utf8_decode("aebe")}, {utf8_decode("cd"), utf8_decode("ced")}};
    const std::vector<MimickTarget> mimick{{utf8_decode("bad"), Tensor::vector({0.3, -0.1, 0.2, 0.0, -0.4})},
                                           {utf8_decode("ace"), Tensor::vector({-0.2, 0.5, 0.1, 0.1, 0.0})}};
    const std::vector<DistillExample> distill{{{tokenize("deb"), tokenize("bed")}, Tensor::vector({0.2, 0.5, 0.3})}};
    Rng unused(0);
    auto loss = [&](Graph& g) {
        ForwardPass pass(g, m);
        return loss_total(pass, {labeled, dict, mimick, distill}, LossWeights{1.0, 1.0, 1.0}, unused).total;
    };
    auto r = grad_check(loss, m.parameters(), c1_eps);
    return {r.max_relative_error < c1_max_rel_error,
            "gradient check on a tiny model with all four losses, max relative error < " + fmt(c1_max_rel_error, 6),
            "chars=" + std::to_string(m.chars.size()) + " params=" + std::to_string(r.checked) +
                " max_rel_error=" + fmt(r.max_relative_error, 9) + " at " + r.worst_parameter + "[" +
                std::to_string(r.worst_index) + "]"};
}

// --- 2 -------------------------------------------------------------------

double infer_nll(Model& m, std::span<const LabeledExample> data) {
    double s = 0.0;
    for (const auto& ex : data) s -= std::log(predict(m, ex.document).probabilities[ex.label]);
    return s / static_cast<double>(data.size());
}

Outcome criterion2() {
    SyntheticLanguageSpec spec;
    spec.seed = 1;
    spec.train_docs = 32;
    auto b = gen_synthetic_pair(spec);
    Rng rng(1);
    CharVocabBuilder chars;
    chars.add(b.source);
    Model m = Model::create(ModelConfig{}, b.labels, chars.build(), rng);
    TrainingData data;
    data.labeled = b.source;
    TrainConfig tc;
    tc.epochs = c2_max_epochs;
    Trainer trainer(m, data, tc);
    std::size_t reached = 0;
    double acc = 0.0, logged = 0.0;
    trainer.on_epoch([&](const EpochLog& e, Model& mm) {
        logged = e.classification;
        if (reached) return;
        acc = accuracy(mm, b.source);
        if (acc == 1.0 && e.classification < c2_max_loss) reached = e.epoch + 1;
    });
    trainer.run(rng);
    const double final_acc = accuracy(m, b.source);
    const double final_nll = infer_nll(m, b.source);
    const bool ok = reached > 0 && final_acc == 1.0 && final_nll < c2_max_loss;
    return {ok,
            "SRC overfits 32 documents: train accuracy 1.0 and L_s < " + fmt(c2_max_loss, 2) + " within " +
                std::to_string(c2_max_epochs) + " epochs",
            "first_epoch_reached=" + (reached ? std::to_string(reached) : std::string("never")) +
                " final_accuracy=" + fmt(final_acc) + " final_L_s(train)=" + fmt(logged, 6) +
                " final_L_s(infer)=" + fmt(final_nll, 6)};
}

// --- 3 -------------------------------------------------------------------

Outcome criterion3() {
    std::vector<double> src, lookup, lookup_in;
    bool every_seed = true;
    std::ostringstream per_seed;
    for (std::size_t seed = 1; seed <= c3_seeds; ++seed) {
        auto b = gen_synthetic_pair(benchmark_spec(seed, c3_rules));
        auto s = train_variant(Variant::src, b, seed, c3_epochs);
        auto l = train_variant(Variant::sup, b, seed, c3_epochs);
        src.push_back(accuracy(s.model, b.target));
        lookup.push_back(accuracy(l.model, b.target));
        lookup_in.push_back(accuracy(l.model, b.source_test));
        every_seed = every_seed && src.back() > lookup.back();
        per_seed << " s" << seed << "=" << fmt(src.back(), 3) << "/" << fmt(lookup.back(), 3);
        std::cerr << "criterion 3: seed " << seed << " SRC " << src.back() << " lookup " << lookup.back() << '\n';
    }
    const bool ok = mean(src) >= c3_min_src && mean(lookup) <= c3_max_lookup && every_seed;
    return {ok,
            "character transfer under '" + std::string(c3_rules) + "': mean SRC >= " + fmt(c3_min_src, 2) +
                ", mean lookup <= " + fmt(c3_max_lookup, 2) + ", SRC wins every seed",
            "mean_SRC=" + fmt(mean(src)) + " mean_lookup=" + fmt(mean(lookup)) +
                " lookup_on_source_test=" + fmt(mean(lookup_in)) + " SRC/lookup per seed:" + per_seed.str()};
}

// --- 4 -------------------------------------------------------------------

Outcome criterion4() {
    std::vector<double> src, dict, dsrc, ddict;
    for (std::size_t seed = 1; seed <= c4_seeds; ++seed) {
        auto b = gen_synthetic_pair(benchmark_spec(seed, c4_rules, c4_train_docs));
        auto s = train_variant(Variant::src, b, seed, c4_epochs, c4_dict_pairs);
        auto d = train_variant(Variant::dict, b, seed, c4_epochs, c4_dict_pairs);
        src.push_back(accuracy(s.model, b.target));
        dict.push_back(accuracy(d.model, b.target));
        dsrc.push_back(mean_pair_distance(s.model, s.dict_sample));
        ddict.push_back(mean_pair_distance(d.model, d.dict_sample));
        std::cerr << "criterion 4: seed " << seed << " SRC " << src.back() << " DICT " << dict.back() << " dist "
                  << dsrc.back() << " -> " << ddict.back() << '\n';
    }
    const double ratio = mean(ddict) / mean(dsrc);
    const bool calibrated = mean(src) >= c4_src_lo && mean(src) <= c4_src_hi;
    const bool ok = calibrated && mean(dict) > mean(src) && ratio <= c4_max_distance_ratio;
    return {ok,
            "dictionary task: SRC in [" + fmt(c4_src_lo, 1) + ", " + fmt(c4_src_hi, 1) +
                "], mean DICT > mean SRC, held-in pair distance drops >= 50%",
            "mean_SRC=" + fmt(mean(src)) + " mean_DICT=" + fmt(mean(dict)) + " pair_distance SRC=" + fmt(mean(dsrc)) +
                " DICT=" + fmt(mean(ddict)) + " ratio=" + fmt(ratio)};
}

// --- 5 -------------------------------------------------------------------

double mimick_distance(Model& m, std::span<const MimickTarget> rows) {
    Graph g;
    ForwardPass pass(g, m);
    return loss_mimick(pass, rows).value().item();
}

Outcome criterion5() {
    SyntheticLanguageSpec spec;
    spec.seed = 1;
    auto b = gen_synthetic_pair(spec);
    Rng pick(5);
    EmbeddingTable table(b.embeddings.dim());
    for (auto i : pick.sample_without_replacement(b.embeddings.size(), c5_words)) {
        auto r = b.embeddings.row(i);
        table.add(b.embeddings.word(i), std::vector<double>(r.begin(), r.end()));
    }
    TrainingData data;
    data.mimick = mimick_targets(table);
    CharVocabBuilder chars;
    for (const auto& x : table.words()) chars.add(x);
    Rng rng(1);
    ModelConfig mc;
    mc.variant = Variant::mim;
    Model m = Model::create(mc, LabelSet({"A", "B"}), chars.build(), rng);
    TrainConfig tc;
    tc.epochs = 0;
    tc.schedule = Schedule::pretrain_then_finetune;
    tc.pretrain_epochs = c5_epochs;
    // One table row per step, so an epoch is one pass over the 50 words.
    tc.aux_batch_size = 1;
    const double before = mimick_distance(m, data.mimick);
    std::size_t first = 0;
    Trainer trainer(m, data, tc);
    trainer.on_epoch([&](const EpochLog& e, Model& mm) {
        if (!first && mimick_distance(mm, data.mimick) < c5_max_ratio * before) first = e.epoch + 1;
    });
    trainer.run(rng);
    const double after = mimick_distance(m, data.mimick);
    return {after < c5_max_ratio * before,
            "mimick-only training on a " + std::to_string(c5_words) + "-word table: distance below 1% of initial after " +
                std::to_string(c5_epochs) + " epochs",
            "initial=" + fmt(before, 6) + " final=" + fmt(after, 6) + " ratio=" + fmt(after / before, 6) +
                " first_epoch_below=" + (first ? std::to_string(first) : std::string("never"))};
}

// --- 6 -------------------------------------------------------------------

double mean_kl(Model& m, std::span<const DistillExample> examples) {
    double s = 0.0;
    for (const auto& ex : examples) {
        const auto p = predict(m, ex.pair.source).probabilities;
        const auto q = ex.reference_output.data();
        for (std::size_t i = 0; i < q.size(); ++i)
            if (q[i] > 0.0) s += q[i] * (std::log(q[i]) - std::log(p[i]));
    }
    return s / static_cast<double>(examples.size());
}

Outcome criterion6() {
    SyntheticLanguageSpec spec;
    spec.seed = 1;
    spec.rules = parse_rules(c3_rules);
    spec.train_docs = 600;
    // The pool must hold at least 50 documents of every predicted label.
    spec.test_docs = 1000;
    auto b = gen_synthetic_pair(spec);
    CharVocabBuilder cb;
    cb.add(b.source).add(b.target);
    const CharVocab chars = cb.build();
    Rng rng(1);
    Model reference = Model::create(ModelConfig{}, b.labels, chars, rng);
    TrainingData rd;
    rd.labeled = b.source;
    TrainConfig rt;
    rt.epochs = 3;
    train(reference, rd, rt, rng);

    // Student input is the target-language side, the reference reads the source side.
    std::vector<ParallelPair> pool;
    for (std::size_t i = 0; i < b.target.size(); ++i) pool.push_back({b.target[i].document, b.source_test[i].document});
    auto sel = select_distill_docs(reference, pool, c6_pairs, rng);
    std::vector<std::size_t> hist(b.labels.size(), 0);
    for (const auto& ex : sel.examples) {
        auto q = ex.reference_output.data();
        ++hist[static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin())];
    }
    const double per_bin = static_cast<double>(c6_pairs) / static_cast<double>(hist.size());
    bool uniform = sel.examples.size() == c6_pairs;
    std::string hist_text;
    for (auto h : hist) {
        uniform = uniform && std::abs(static_cast<double>(h) - per_bin) <= 1.0;
        hist_text += (hist_text.empty() ? "" : ",") + std::to_string(h);
    }

    ModelConfig sc;
    sc.distill = true;
    Model student = Model::create(sc, b.labels, chars, rng);
    TrainingData sd;
    sd.distill = sel.examples;
    TrainConfig tc;
    tc.epochs = 0;
    tc.schedule = Schedule::pretrain_then_finetune;
    tc.pretrain_epochs = c6_epochs;
    const double kl0 = mean_kl(student, sd.distill);
    train(student, sd, tc, rng);
    const double kl = mean_kl(student, sd.distill);
    const bool ok = uniform && kl <= c6_max_ratio * kl0;
    return {ok,
            "distillation: mean KL on " + std::to_string(c6_pairs) + " pairs falls >= 50% over " +
                std::to_string(c6_epochs) + " epochs; selection histogram uniform within 1",
            "KL epoch0=" + fmt(kl0, 6) + " epoch" + std::to_string(c6_epochs) + "=" + fmt(kl, 6) +
                " ratio=" + fmt(kl / kl0, 6) + " histogram=" + hist_text + " reference_source_accuracy=" +
                fmt(accuracy(reference, b.source_test), 3)};
}

// --- 7 -------------------------------------------------------------------

Outcome criterion7() {
    auto b = gen_synthetic_pair(benchmark_spec(1, c3_rules));
    auto s = train_variant(Variant::src, b, 1, c3_epochs);
    std::vector<Word> sources, targets;
    for (const auto& p : b.dictionary.pairs) {
        sources.push_back(p.source);
        targets.push_back(p.target);
    }
    EmbeddingTable se = embed_words(s.model, sources);
    EmbeddingTable te = embed_words(s.model, targets);
    const double p1 = word_translate(se, te, b.dictionary);
    BilingualDictionary keywords;
    for (const auto& p : b.dictionary.pairs)
        if (b.family.at(p.source) < b.labels.size()) keywords.pairs.push_back(p);
    const double p1_keywords = word_translate(se, te, keywords);

    ModelConfig mc;
    Rng init_rng(1);
    Model untrained = Model::create(mc, b.labels, benchmark_chars(b), init_rng);
    const double p1_untrained = word_translate(embed_words(untrained, sources), embed_words(untrained, targets), b.dictionary);

    Rng rng(2);
    EmbeddingTable rs(se.dim()), rt(te.dim());
    for (const auto& x : sources) {
        std::vector<double> v(se.dim());
        for (double& e : v) e = rng.normal();
        rs.add(x, v);
    }
    for (const auto& x : targets) {
        std::vector<double> v(te.dim());
        for (double& e : v) e = rng.normal();
        rt.add(x, v);
    }
    const double control = word_translate(rs, rt, b.dictionary);
    return {p1 >= c7_min_p1 && control <= c7_max_control,
            "word translation over " + std::to_string(te.size()) + " target candidates: SRC P@1 >= " +
                fmt(c7_min_p1, 2) + ", random control <= " + fmt(c7_max_control, 2),
            "SRC_P@1=" + fmt(p1) + " keywords_P@1=" + fmt(p1_keywords) + " untrained_P@1=" + fmt(p1_untrained) +
                " control_P@1=" + fmt(control)};
}

// --- 8 -------------------------------------------------------------------

Outcome criterion8() {
    const fs::path dir = fs::temp_directory_path() / ("caco_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    SyntheticLanguageSpec spec;
    spec.seed = 3;
    spec.rules = parse_rules(c3_rules);
    spec.train_docs = 120;
    auto b = gen_synthetic_pair(spec);
    write_synthetic(dir, b);

    RunConfig cfg;
    cfg.model.variant = Variant::all;
    cfg.seed = 11;
    cfg.train.epochs = 2;
    cfg.dict_sample = 50;
    cfg.source_corpora = {{(dir / "source.tsv").string(), 100}};
    cfg.dictionary = (dir / "dictionary.tsv").string();
    cfg.embeddings = (dir / "embeddings.txt").string();
    auto first = run_training(cfg);
    auto second = run_training(cfg);
    const std::string a = serialize_model(first.model);
    const bool identical = a == serialize_model(second.model);

    save_model(first.model, dir / "model.caco");
    Model back = load_model(dir / "model.caco");
    std::vector<Word> vocab;
    for (const auto& p : b.dictionary.pairs) vocab.push_back(p.source);
    Rng rng(4);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < c8_docs; ++i) {
        Document d;
        const std::size_t n = 1 + rng.index(15);
        for (std::size_t k = 0; k < n; ++k) {
            if (rng.uniform() < 0.1) {
                Word x;
                for (std::size_t c = 0, len = 1 + rng.index(8); c < len; ++c) x.push_back(U'a' + rng.index(30));
                d.words.push_back(x);
            } else {
                d.words.push_back(vocab[rng.index(vocab.size())]);
            }
        }
        auto p = predict(first.model, d), q = predict(back, d);
        if (p.label != q.label || p.probabilities != q.probabilities) ++mismatches;
    }
    fs::remove_all(dir);
    return {identical && mismatches == 0,
            "two identical runs give bit-identical archives; reload preserves " + std::to_string(c8_docs) +
                " predictions bit-exactly",
            "archive_bytes=" + std::to_string(a.size()) + " identical=" + (identical ? "yes" : "no") +
                " prediction_mismatches=" + std::to_string(mismatches)};
}

// --- 9 -------------------------------------------------------------------

Outcome criterion9() {
    auto b = gen_synthetic_pair(benchmark_spec(9, c3_rules, 100));
    std::vector<Word> vocab;
    for (const auto& p : b.dictionary.pairs) vocab.push_back(p.source);
    Rng rng(9);
    Model m = Model::create(ModelConfig{}, b.labels, benchmark_chars(b), rng);
    Model nodrop = m;
    nodrop.config.dropout = 0.0;
    nodrop.dan.dims.dropout = 0.0;
    std::size_t argmax_changes = 0, train_infer_diffs = 0;
    double worst_norm = 0.0;
    for (std::size_t i = 0; i < c9_docs; ++i) {
        Document d;
        for (std::size_t k = 0, n = 1 + rng.index(20); k < n; ++k) d.words.push_back(vocab[rng.index(vocab.size())]);
        auto p = predict(m, d);
        double sum = 0.0;
        for (double x : p.probabilities) sum += x;
        worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
        Document shuffled = d;
        rng.shuffle(shuffled.words);
        if (predict(m, shuffled).label != p.label) ++argmax_changes;
        Graph g;
        ForwardPass pass(g, nodrop);
        if (pass.logits(d, Mode::train, &rng).value() != pass.logits(d, Mode::infer, nullptr).value()) ++train_infer_diffs;
    }
    const bool ok = argmax_changes == 0 && worst_norm <= c9_norm_tol && train_infer_diffs == 0;
    return {ok,
            "classifier invariants on " + std::to_string(c9_docs) +
                " random documents: permutation-invariant argmax, normalized softmax, dropout-0 train == infer",
            "argmax_changes=" + std::to_string(argmax_changes) + " max|sum-1|=" + sci(worst_norm) +
                " train_infer_differences=" + std::to_string(train_infer_diffs)};
}

// --- 10 ------------------------------------------------------------------

Outcome criterion10() {
    // Rows: resources each model needs (source, embeddings, dictionary, clwe, target).
    const std::map<Variant, std::array<bool, 5>> table{
        {Variant::src, {true, false, false, false, false}}, {Variant::dict, {true, false, true, false, false}},
        {Variant::mim, {true, true, false, false, false}},  {Variant::all, {true, true, true, false, false}},
        {Variant::clwe, {true, false, false, true, false}}, {Variant::sup, {true, false, false, false, true}},
        {Variant::com, {true, false, false, true, false}},
    };
    const char* keys[] = {"source_corpus", "embeddings", "dictionary", "clwe", "target_corpus", "distill_data"};
    std::size_t cases = 0, wrong = 0;
    std::string first_wrong;
    for (const auto& [variant, needs] : table) {
        for (bool distill : {false, true}) {
            for (unsigned mask = 0; mask < 64; ++mask) {
                RunConfig c;
                c.model.variant = variant;
                c.model.distill = distill;
                bool accept = true;
                for (int k = 0; k < 6; ++k) {
                    const bool have = mask & (1u << k);
                    if (have) c.set(keys[k], "present");
                    const bool need = k < 5 ? needs[static_cast<std::size_t>(k)] : distill;
                    accept = accept && (have || !need);
                }
                ++cases;
                if (c.problems(false).empty() != accept) {
                    ++wrong;
                    if (first_wrong.empty())
                        first_wrong = std::string(variant_name(variant)) + (distill ? "+p" : "") + " mask " +
                                      std::to_string(mask);
                }
            }
        }
    }
    return {wrong == 0 && cases == 7 * 2 * 64,
            "resource matrix: 7 variants x (+p) x 64 resource subsets accepted or rejected per the model table",
            "cases=" + std::to_string(cases) + " disagreements=" + std::to_string(wrong) +
                (first_wrong.empty() ? "" : " first=" + first_wrong)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CACO acceptance suite"};
    int only = 0;
    app.add_option("-c,--criterion", only, "run a single criterion (1-10); default runs all")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9, criterion10};
    int failures = 0;
    for (int n = 1; n <= 10; ++n) {
        if (only && n != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(n - 1)]();
        } catch (const std::exception& e) {
            o = {false, "criterion raised an exception", e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.what << " | " << o.measured
                  << " | " << fmt(secs, 1) << "s" << std::endl;
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
