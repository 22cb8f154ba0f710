#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "caco/model.hpp"
#include "caco/trainer.hpp"

namespace caco {

/// Ordered "key = value" records. '#' starts a comment line.
struct KeyValues {
    std::vector<std::pair<std::string, std::string>> entries;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

inline std::size_t parse_size(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
        auto n = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
}

inline double parse_real(const std::string& key, const std::string& v) {
    try {
        return parse_double(v, key, 0);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    for (std::string tok; std::getline(ss, tok, ',');) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

} // namespace detail

inline KeyValues parse_key_values(std::string_view text, const std::string& source = "config") {
    KeyValues kv;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        std::string line = detail::trim(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
        ++line_no;
        if (!line.empty() && line.front() != '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) throw FormatError(source, line_no, "expected 'key = value'");
            std::string key = detail::trim(std::string_view(line).substr(0, eq));
            if (key.empty()) throw FormatError(source, line_no, "empty key");
            kv.entries.emplace_back(key, detail::trim(std::string_view(line).substr(eq + 1)));
        }
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return kv;
}

inline KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str(), path.string());
}

struct SourceCorpus {
    std::string path;
    /// Documents to sample; nullopt takes the whole corpus.
    std::optional<std::size_t> count;
};

/// Everything a training run needs: hyperparameters plus data paths.
struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    std::uint64_t seed = 1;
    bool lowercase = true;
    std::size_t dict_sample = 100;
    std::vector<std::string> labels;
    std::vector<SourceCorpus> source_corpora;
    std::string target_corpus;
    std::string test_corpus;
    std::string dictionary;
    std::string embeddings;
    std::string clwe;
    std::string distill_data;
    std::string model_out;
    std::string log_out;

    /// Sets one key. Unknown keys are rejected; `source_corpus` may repeat.
    void set(const std::string& key, const std::string& value) {
        using namespace detail;
        if (key == "variant") model.variant = parse_variant(value);
        else if (key == "distill") model.distill = parse_bool(key, value);
        else if (key == "seed") seed = parse_size(key, value);
        else if (key == "epochs") train.epochs = parse_size(key, value);
        else if (key == "batch_size") train.batch_size = parse_size(key, value);
        else if (key == "aux_batch_size") train.aux_batch_size = parse_size(key, value);
        else if (key == "lambda_d") train.weights.dict = parse_real(key, value);
        else if (key == "lambda_e") train.weights.mimick = parse_real(key, value);
        else if (key == "lambda_p") train.weights.distill = parse_real(key, value);
        else if (key == "lr") train.adam.lr = parse_real(key, value);
        else if (key == "beta1") train.adam.beta1 = parse_real(key, value);
        else if (key == "beta2") train.adam.beta2 = parse_real(key, value);
        else if (key == "adam_eps") train.adam.eps = parse_real(key, value);
        else if (key == "schedule") {
            if (value == "joint") train.schedule = Schedule::joint;
            else if (value == "pretrain") train.schedule = Schedule::pretrain_then_finetune;
            else throw ConfigError("schedule: expected 'joint' or 'pretrain', got '" + value + "'");
        }
        else if (key == "pretrain_epochs") train.pretrain_epochs = parse_size(key, value);
        else if (key == "char_dim") model.embedder.char_dim = parse_size(key, value);
        else if (key == "hidden_dim") model.embedder.hidden = parse_size(key, value);
        else if (key == "word_dim") model.embedder.word_dim = parse_size(key, value);
        else if (key == "dan_hidden") {
            model.dan_hidden.clear();
            for (const auto& tok : split_list(value)) model.dan_hidden.push_back(parse_size(key, tok));
        }
        else if (key == "dropout") model.dropout = parse_real(key, value);
        else if (key == "dropout_input") model.dropout_input = parse_bool(key, value);
        else if (key == "lowercase") lowercase = parse_bool(key, value);
        else if (key == "dict_sample") dict_sample = parse_size(key, value);
        else if (key == "labels") labels = split_list(value);
        else if (key == "source_corpus") {
            auto parts = split_list(value);
            if (parts.empty() || parts.size() > 2) throw ConfigError("source_corpus: expected 'path' or 'path, count'");
            source_corpora.push_back({parts[0], parts.size() == 2 ? std::optional(parse_size(key, parts[1])) : std::nullopt});
        }
        else if (key == "target_corpus") target_corpus = value;
        else if (key == "test_corpus") test_corpus = value;
        else if (key == "dictionary") dictionary = value;
        else if (key == "embeddings") embeddings = value;
        else if (key == "clwe") clwe = value;
        else if (key == "distill_data") distill_data = value;
        else if (key == "model_out") model_out = value;
        else if (key == "log_out") log_out = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }

    static RunConfig from(const KeyValues& kv) {
        RunConfig c;
        std::map<std::string, int> seen;
        for (const auto& [k, v] : kv.entries) {
            if (k != "source_corpus" && seen[k]++ > 0) throw ConfigError("config key '" + k + "' given twice");
            c.set(k, v);
        }
        return c;
    }

    /// Applies "key=value" overrides; a repeated source_corpus override replaces the list.
    void apply_overrides(const std::vector<std::string>& overrides) {
        bool sources_reset = false;
        for (const auto& o : overrides) {
            auto eq = o.find('=');
            if (eq == std::string::npos) throw ConfigError("override '" + o + "' must look like key=value");
            const std::string key = detail::trim(std::string_view(o).substr(0, eq));
            if (key == "source_corpus" && !sources_reset) {
                source_corpora.clear();
                sources_reset = true;
            }
            set(key, detail::trim(std::string_view(o).substr(eq + 1)));
        }
    }

    /// Rewrites relative data and output paths as `base / path`.
    void resolve_paths(const std::filesystem::path& base) {
        auto fix = [&](std::string& p) {
            if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
        };
        for (auto& s : source_corpora) fix(s.path);
        for (auto* p : {&target_corpus, &test_corpus, &dictionary, &embeddings, &clwe, &distill_data, &model_out, &log_out})
            fix(*p);
    }

    std::vector<Resource> present_resources() const {
        std::vector<Resource> out;
        if (!source_corpora.empty()) out.push_back(Resource::source_labeled);
        if (!embeddings.empty()) out.push_back(Resource::pretrained_embedding);
        if (!dictionary.empty()) out.push_back(Resource::dictionary);
        if (!clwe.empty()) out.push_back(Resource::clwe);
        if (!target_corpus.empty()) out.push_back(Resource::target_labeled);
        if (!distill_data.empty()) out.push_back(Resource::distill_data);
        return out;
    }

    /// All problems at once: missing resources for the variant, absent files,
    /// out-of-range hyperparameters. Empty when the config is usable.
    std::vector<std::string> problems(bool check_files = true) const {
        std::vector<std::string> out;
        const auto present = present_resources();
        for (const auto& name : missing_resources(model.variant, model.distill, present))
            out.push_back(std::string(variant_name(model.variant)) + (model.distill ? "+p" : "") +
                          " requires resource '" + name + "'");
        if (check_files) {
            auto check = [&](const std::string& key, const std::string& path) {
                if (!path.empty() && !std::filesystem::exists(path)) out.push_back(key + ": file '" + path + "' not found");
            };
            for (const auto& s : source_corpora) check("source_corpus", s.path);
            check("target_corpus", target_corpus);
            check("test_corpus", test_corpus);
            check("dictionary", dictionary);
            check("embeddings", embeddings);
            check("clwe", clwe);
            check("distill_data", distill_data);
        }
        if (model.dropout < 0.0 || model.dropout >= 1.0) out.push_back("dropout must be in [0, 1)");
        if (train.batch_size == 0 || train.aux_batch_size == 0) out.push_back("batch sizes must be positive");
        if (train.weights.dict < 0 || train.weights.mimick < 0 || train.weights.distill < 0)
            out.push_back("loss weights must be nonnegative");
        if (model.embedder.char_dim == 0 || model.embedder.hidden == 0 || model.embedder.word_dim == 0)
            out.push_back("embedder dimensions must be positive");
        if (!(train.adam.lr > 0.0)) out.push_back("lr must be positive");
        return out;
    }

    /// Resources configured but not consumed by the variant.
    std::vector<std::string> unused_resources() const {
        std::vector<std::string> out;
        const auto needed = required_resources(model.variant, model.distill);
        for (Resource r : present_resources())
            if (std::find(needed.begin(), needed.end(), r) == needed.end()) out.emplace_back(resource_name(r));
        return out;
    }

    /// Every key with its resolved value, in `key = value` form.
    std::string to_text() const {
        std::ostringstream os;
        auto line = [&](const std::string& k, const auto& v) { os << k << " = " << v << '\n'; };
        auto real = [](double v) { return detail::format_double(v); };
        line("variant", variant_name(model.variant));
        line("distill", model.distill ? "true" : "false");
        line("seed", seed);
        line("epochs", train.epochs);
        line("batch_size", train.batch_size);
        line("aux_batch_size", train.aux_batch_size);
        line("lambda_d", real(train.weights.dict));
        line("lambda_e", real(train.weights.mimick));
        line("lambda_p", real(train.weights.distill));
        line("lr", real(train.adam.lr));
        line("beta1", real(train.adam.beta1));
        line("beta2", real(train.adam.beta2));
        line("adam_eps", real(train.adam.eps));
        line("schedule", train.schedule == Schedule::joint ? "joint" : "pretrain");
        line("pretrain_epochs", train.pretrain_epochs);
        line("char_dim", model.embedder.char_dim);
        line("hidden_dim", model.embedder.hidden);
        line("word_dim", model.embedder.word_dim);
        std::string dh;
        for (std::size_t i = 0; i < model.dan_hidden.size(); ++i) dh += (i ? "," : "") + std::to_string(model.dan_hidden[i]);
        line("dan_hidden", dh);
        line("dropout", real(model.dropout));
        line("dropout_input", model.dropout_input ? "true" : "false");
        line("lowercase", lowercase ? "true" : "false");
        line("dict_sample", dict_sample);
        std::string ls;
        for (std::size_t i = 0; i < labels.size(); ++i) ls += (i ? "," : "") + labels[i];
        if (!ls.empty()) line("labels", ls);
        for (const auto& s : source_corpora)
            line("source_corpus", s.count ? s.path + ", " + std::to_string(*s.count) : s.path);
        auto opt = [&](const char* k, const std::string& v) {
            if (!v.empty()) line(k, v);
        };
        opt("target_corpus", target_corpus);
        opt("test_corpus", test_corpus);
        opt("dictionary", dictionary);
        opt("embeddings", embeddings);
        opt("clwe", clwe);
        opt("distill_data", distill_data);
        opt("model_out", model_out);
        opt("log_out", log_out);
        return os.str();
    }
};

} // namespace caco
