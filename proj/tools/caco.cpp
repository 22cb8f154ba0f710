// caco: train, evaluate and inspect CACO cross-lingual document classifiers.
//
// Records go to stdout as "metric<TAB>value<TAB>seed<TAB>variant"; everything
// meant for people goes to stderr. Exit status: 0 ok, 1 invalid configuration
// or malformed input file, 2 failure while running.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "caco/caco.hpp"

namespace fs = std::filesystem;
using namespace caco;

namespace {

void record(const std::string& metric, double value, const std::string& seed, const std::string& variant) {
    std::cout << metric << '\t' << detail::format_double(value) << '\t' << seed << '\t' << variant << '\n';
}

std::string model_tag(const Model& m) {
    return std::string(variant_name(m.config.variant)) + (m.config.distill ? "+p" : "");
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg = RunConfig::from(read_key_values(path));
    cfg.resolve_paths(fs::path(path).parent_path());
    cfg.apply_overrides(overrides);
    return cfg;
}

Model open_model(const std::string& path, const std::string& clwe) {
    LoadOptions opts;
    if (!clwe.empty()) opts.clwe_path = clwe;
    return load_model(path, opts);
}

void print_confusion(const Model& m, const ClassificationReport& r) {
    std::size_t width = 6;
    for (const auto& n : m.labels.names()) width = std::max(width, n.size() + 1);
    std::cerr << std::setw(static_cast<int>(width)) << "gold\\pred";
    for (const auto& n : m.labels.names()) std::cerr << ' ' << std::setw(static_cast<int>(width)) << n;
    std::cerr << '\n';
    for (std::size_t g = 0; g < r.confusion.size(); ++g) {
        std::cerr << std::setw(static_cast<int>(width)) << m.labels.name(g);
        for (auto c : r.confusion[g]) std::cerr << ' ' << std::setw(static_cast<int>(width)) << c;
        std::cerr << '\n';
    }
}

RunResult train_verbose(const RunConfig& cfg) {
    auto result = run_training(cfg, [](const EpochLog& e, Model&) {
        std::cerr << "epoch " << e.epoch << (e.pretraining ? " (aux)" : "") << "  L_s " << e.classification
                  << "  L_d " << e.dict << "  L_e " << e.mimick << "  L_p " << e.distill << "  total " << e.total << '\n';
    });
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return result;
}

struct TrainArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    std::string log;
};

int cmd_train(const TrainArgs& a) {
    RunConfig cfg = load_run_config(a.config, a.overrides);
    if (!a.out.empty()) cfg.model_out = a.out;
    if (!a.log.empty()) cfg.log_out = a.log;
    auto problems = cfg.problems();
    if (cfg.model_out.empty()) problems.push_back("no output archive: set model_out or pass --out");
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& s : problems) msg += "\n  " + s;
        throw ConfigError(msg);
    }
    RunResult result = train_verbose(cfg);
    save_model(result.model, cfg.model_out);
    std::cerr << "wrote " << cfg.model_out << '\n';
    if (!cfg.log_out.empty()) {
        std::ofstream log(cfg.log_out);
        if (!log) throw Error(cfg.log_out + ": cannot open for writing");
        write_loss_log(log, cfg, result.log);
    }
    const std::string seed = std::to_string(cfg.seed);
    if (!result.log.empty()) record("final_total_loss", result.log.back().total, seed, model_tag(result.model));
    if (!result.test.empty()) record("accuracy", accuracy(result.model, result.test), seed, model_tag(result.model));
    return 0;
}

struct EvalArgs {
    std::string model;
    std::string test;
    std::string clwe;
    bool keep_case = false;
    std::string config;
    std::vector<std::string> overrides;
    std::size_t seeds = 0;
};

int cmd_eval(const EvalArgs& a) {
    if (!a.config.empty()) {
        if (!a.model.empty()) throw ConfigError("eval takes either --model or --config, not both");
        RunConfig cfg = load_run_config(a.config, a.overrides);
        if (!a.test.empty()) cfg.test_corpus = a.test;
        if (cfg.test_corpus.empty()) throw ConfigError("multi-seed eval needs test_corpus");
        const std::size_t n = a.seeds == 0 ? 1 : a.seeds;
        const std::uint64_t first = cfg.seed;
        double sum = 0.0;
        std::string tag;
        for (std::size_t i = 0; i < n; ++i) {
            cfg.seed = first + i;
            std::cerr << "seed " << cfg.seed << '\n';
            RunResult r = train_verbose(cfg);
            const double acc = accuracy(r.model, r.test);
            tag = model_tag(r.model);
            record("accuracy", acc, std::to_string(cfg.seed), tag);
            sum += acc;
        }
        record("mean_accuracy", sum / static_cast<double>(n), "all", tag);
        return 0;
    }
    if (a.model.empty() || a.test.empty()) throw ConfigError("eval needs --model and --test, or --config");
    Model m = open_model(a.model, a.clwe);
    auto test = load_corpus(a.test, m.labels, {!a.keep_case});
    auto report = evaluate(m, test);
    record("accuracy", report.accuracy, "-", model_tag(m));
    print_confusion(m, report);
    return 0;
}

struct TranslateArgs {
    std::string model;
    std::string clwe;
    std::string source_words;
    std::string target_words;
    std::string target_table;
    std::string gold;
    std::string metric = "euclidean";
    bool keep_case = false;
};

int cmd_translate(const TranslateArgs& a) {
    if (a.target_words.empty() == a.target_table.empty())
        throw ConfigError("translate needs exactly one of --target-words or --target-table");
    const Metric metric = parse_metric(a.metric);
    const TokenizerOptions tok{!a.keep_case};
    Model m = open_model(a.model, a.clwe);
    const BilingualDictionary gold = load_dictionary(a.gold, tok);
    std::vector<Word> sources;
    if (a.source_words.empty())
        for (const auto& p : gold.pairs) sources.push_back(p.source);
    else
        sources = load_word_list(a.source_words, tok);
    EmbeddingTable src = embed_words(m, sources);
    EmbeddingTable tgt = a.target_table.empty() ? embed_words(m, load_word_list(a.target_words, tok))
                                                : load_embeddings(a.target_table);
    record("p@1", word_translate(src, tgt, gold, metric), "-", model_tag(m));
    return 0;
}

struct EmbedDumpArgs {
    std::string model;
    std::string clwe;
    std::string words;
    std::string out;
    bool keep_case = false;
};

int cmd_embed_dump(const EmbedDumpArgs& a) {
    Model m = open_model(a.model, a.clwe);
    EmbeddingTable table = embed_words(m, load_word_list(a.words, {!a.keep_case}));
    write_embeddings(a.out, table);
    std::cerr << "wrote " << table.size() << " vectors of dimension " << table.dim() << " to " << a.out << '\n';
    return 0;
}

struct GenArgs {
    std::string spec;
    std::vector<std::string> overrides;
    std::string out;
};

int cmd_gen_synthetic(const GenArgs& a) {
    KeyValues kv;
    if (!a.spec.empty()) kv = read_key_values(a.spec);
    for (const auto& o : a.overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "' must look like key=value");
        kv.entries.emplace_back(detail::trim(std::string_view(o).substr(0, eq)), detail::trim(std::string_view(o).substr(eq + 1)));
    }
    const SyntheticLanguageSpec spec = synthetic_spec_from(kv);
    const SyntheticBenchmark bench = gen_synthetic_pair(spec);
    fs::create_directories(a.out);
    write_synthetic(a.out, bench);
    std::cerr << "wrote " << bench.source.size() << " source, " << bench.target.size() << " target documents and "
              << bench.dictionary.size() << " dictionary pairs to " << a.out << '\n';
    return 0;
}

struct DistillArgs {
    std::string reference;
    std::string clwe;
    std::string parallel;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::string out;
    bool keep_case = false;
};

int cmd_distill_prepare(const DistillArgs& a) {
    Model ref = open_model(a.reference, a.clwe);
    const auto pool = load_parallel(a.parallel, {!a.keep_case});
    Rng rng(a.seed);
    DistillSelection sel = select_distill_docs(ref, pool, a.n, rng);
    for (const auto& w : sel.warnings) std::cerr << "warning: " << w << '\n';
    DistillData data{ref.labels, sel.examples};
    write_distill_data(a.out, data);
    std::vector<std::size_t> hist(ref.labels.size(), 0);
    for (const auto& ex : sel.examples) {
        auto p = ex.reference_output.data();
        ++hist[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
    }
    for (std::size_t y = 0; y < hist.size(); ++y)
        record("selected[" + ref.labels.name(y) + "]", static_cast<double>(hist[y]), std::to_string(a.seed), model_tag(ref));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CACO cross-lingual document classification"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train a model from a config file");
    train->add_option("-c,--config", train_args.config, "flat key = value config file")->required()->check(CLI::ExistingFile);
    train->add_option("-s,--set", train_args.overrides, "override a config key (key=value), repeatable");
    train->add_option("-o,--out", train_args.out, "model archive to write (overrides model_out)");
    train->add_option("-l,--log", train_args.log, "loss log to write (overrides log_out)");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "accuracy of an archive, or of fresh models over several seeds");
    eval->add_option("-m,--model", eval_args.model, "model archive");
    eval->add_option("-t,--test", eval_args.test, "labeled test corpus");
    eval->add_option("--clwe", eval_args.clwe, "CLWE table for CLWE/COM archives");
    eval->add_flag("--keep-case", eval_args.keep_case, "do not lowercase the test text");
    eval->add_option("-c,--config", eval_args.config, "train from this config for each seed instead of loading --model");
    eval->add_option("-s,--set", eval_args.overrides, "override a config key (key=value), repeatable");
    eval->add_option("-n,--seeds", eval_args.seeds, "number of consecutive seeds starting at the config seed");

    TranslateArgs tr_args;
    auto* translate = app.add_subcommand("translate", "nearest-neighbour word translation (P@1)");
    translate->add_option("-m,--model", tr_args.model, "model archive")->required();
    translate->add_option("--clwe", tr_args.clwe, "CLWE table for CLWE/COM archives");
    translate->add_option("-g,--gold", tr_args.gold, "gold dictionary (source<TAB>target)")->required();
    translate->add_option("--source-words", tr_args.source_words, "source words to embed (default: gold sources)");
    translate->add_option("--target-words", tr_args.target_words, "candidate target words, embedded by the model");
    translate->add_option("--target-table", tr_args.target_table, "candidate target embedding table");
    translate->add_option("--metric", tr_args.metric, "euclidean or cosine")->capture_default_str();
    translate->add_flag("--keep-case", tr_args.keep_case, "do not lowercase words");

    EmbedDumpArgs ed_args;
    auto* embed_dump = app.add_subcommand("embed-dump", "write embedder outputs as an embedding table");
    embed_dump->add_option("-m,--model", ed_args.model, "model archive")->required();
    embed_dump->add_option("--clwe", ed_args.clwe, "CLWE table for COM archives");
    embed_dump->add_option("-w,--words", ed_args.words, "word list, one per line")->required();
    embed_dump->add_option("-o,--out", ed_args.out, "output table")->required();
    embed_dump->add_flag("--keep-case", ed_args.keep_case, "do not lowercase words");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic related-language benchmark");
    gen->add_option("--spec", gen_args.spec, "key = value generator spec")->check(CLI::ExistingFile);
    gen->add_option("-s,--set", gen_args.overrides, "override a spec key (key=value), repeatable");
    gen->add_option("-o,--out", gen_args.out, "output directory")->required();

    DistillArgs d_args;
    auto* distill = app.add_subcommand("distill-prepare", "select parallel documents and cache reference outputs");
    distill->add_option("-r,--reference", d_args.reference, "reference model archive")->required();
    distill->add_option("--clwe", d_args.clwe, "CLWE table for CLWE/COM reference archives");
    distill->add_option("-p,--parallel", d_args.parallel, "parallel corpus (source<TAB>reference)")->required();
    distill->add_option("-n", d_args.n, "documents to select")->required();
    distill->add_option("--seed", d_args.seed, "selection seed")->capture_default_str();
    distill->add_option("-o,--out", d_args.out, "distillation data file")->required();
    distill->add_flag("--keep-case", d_args.keep_case, "do not lowercase the text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*train) return cmd_train(train_args);
        if (*eval) return cmd_eval(eval_args);
        if (*translate) return cmd_translate(tr_args);
        if (*embed_dump) return cmd_embed_dump(ed_args);
        if (*gen) return cmd_gen_synthetic(gen_args);
        if (*distill) return cmd_distill_prepare(d_args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
