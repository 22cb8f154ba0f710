#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "caco/classifier.hpp"
#include "caco/embedder.hpp"

namespace caco {

/// Model variants. SRC, DICT, MIM and ALL use the character embedder with
/// different auxiliary tasks; CLWE is a DAN over frozen cross-lingual vectors;
/// SUP is a DAN over trainable word vectors; COM concatenates character
/// embeddings with frozen cross-lingual vectors.
enum class Variant { src, dict, mim, all, clwe, sup, com };

inline constexpr Variant all_variants[] = {Variant::src,  Variant::dict, Variant::mim, Variant::all,
                                           Variant::clwe, Variant::sup,  Variant::com};

inline std::string_view variant_name(Variant v) {
    switch (v) {
    case Variant::src: return "SRC";
    case Variant::dict: return "DICT";
    case Variant::mim: return "MIM";
    case Variant::all: return "ALL";
    case Variant::clwe: return "CLWE";
    case Variant::sup: return "SUP";
    case Variant::com: return "COM";
    }
    return "?";
}

inline Variant parse_variant(std::string_view name) {
    std::string upper(name);
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (Variant v : all_variants)
        if (variant_name(v) == upper) return v;
    throw ConfigError("unknown model variant '" + std::string(name) + "' (expected SRC, DICT, MIM, ALL, CLWE, SUP or COM)");
}

inline bool uses_characters(Variant v) {
    return v == Variant::src || v == Variant::dict || v == Variant::mim || v == Variant::all || v == Variant::com;
}
inline bool uses_dictionary_task(Variant v) { return v == Variant::dict || v == Variant::all; }
inline bool uses_mimick_task(Variant v) { return v == Variant::mim || v == Variant::all; }
inline bool uses_clwe(Variant v) { return v == Variant::clwe || v == Variant::com; }
inline bool uses_target_labels(Variant v) { return v == Variant::sup; }

// ---------------------------------------------------------------------------
// Resource matrix

enum class Resource { source_labeled, pretrained_embedding, dictionary, clwe, target_labeled, distill_data };

inline constexpr Resource all_resources[] = {Resource::source_labeled, Resource::pretrained_embedding,
                                             Resource::dictionary,     Resource::clwe,
                                             Resource::target_labeled, Resource::distill_data};

/// Config key naming each resource.
inline std::string_view resource_name(Resource r) {
    switch (r) {
    case Resource::source_labeled: return "source_corpus";
    case Resource::pretrained_embedding: return "embeddings";
    case Resource::dictionary: return "dictionary";
    case Resource::clwe: return "clwe";
    case Resource::target_labeled: return "target_corpus";
    case Resource::distill_data: return "distill_data";
    }
    return "?";
}

/// Resources a variant needs. `distill` adds the parallel data with reference outputs.
inline std::vector<Resource> required_resources(Variant v, bool distill) {
    std::vector<Resource> out{Resource::source_labeled};
    if (uses_mimick_task(v)) out.push_back(Resource::pretrained_embedding);
    if (uses_dictionary_task(v)) out.push_back(Resource::dictionary);
    if (uses_clwe(v)) out.push_back(Resource::clwe);
    if (uses_target_labels(v)) out.push_back(Resource::target_labeled);
    if (distill) out.push_back(Resource::distill_data);
    return out;
}

/// Names of required resources absent from `present`, in matrix order.
inline std::vector<std::string> missing_resources(Variant v, bool distill, std::span<const Resource> present) {
    std::vector<std::string> missing;
    for (Resource r : required_resources(v, distill))
        if (std::find(present.begin(), present.end(), r) == present.end()) missing.emplace_back(resource_name(r));
    return missing;
}

// ---------------------------------------------------------------------------
// Model

struct ModelConfig {
    Variant variant = Variant::src;
    bool distill = false;
    EmbedderDims embedder;
    std::vector<std::size_t> dan_hidden{100, 100, 100};
    double dropout = 0.1;
    bool dropout_input = false;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Reference to the frozen cross-lingual table a CLWE/COM model was built with.
struct ClweReference {
    std::string path;
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::uint64_t fingerprint = 0;

    friend bool operator==(const ClweReference&, const ClweReference&) = default;
};

class Model {
public:
    ModelConfig config;
    LabelSet labels;
    CharVocab chars;
    std::optional<EmbedderParams> embedder;
    std::optional<WordLookup> lookup;
    DanParams dan;
    std::optional<ClweReference> clwe_reference;

    /// `clwe` is required for CLWE/COM; `lookup_vocabulary` sizes the trainable
    /// table of SUP.
    static Model create(const ModelConfig& config, LabelSet labels, CharVocab chars, Rng& rng,
                        const EmbeddingTable* clwe = nullptr, std::vector<Word> lookup_vocabulary = {}) {
        Model m;
        m.config = config;
        m.labels = std::move(labels);
        m.chars = std::move(chars);
        const Variant v = config.variant;
        std::size_t input_dim = 0;
        if (uses_characters(v)) {
            m.embedder = EmbedderParams::create(config.embedder, m.chars.size(), rng);
            input_dim += config.embedder.word_dim;
        }
        if (uses_clwe(v)) {
            if (!clwe) throw ConfigError(std::string(variant_name(v)) + " model requires a clwe table");
            m.lookup = WordLookup::frozen(*clwe);
            m.clwe_reference = ClweReference{"", clwe->size(), clwe->dim(), clwe->fingerprint()};
            input_dim += clwe->dim();
        }
        if (v == Variant::sup) {
            m.lookup = WordLookup::trainable(std::move(lookup_vocabulary), config.embedder.word_dim, rng);
            input_dim += config.embedder.word_dim;
        }
        DanDims dims;
        dims.input_dim = input_dim;
        dims.hidden = config.dan_hidden;
        dims.labels = m.labels.size();
        dims.dropout = config.dropout;
        dims.dropout_input = config.dropout_input;
        m.dan = DanParams::create(dims, rng);
        return m;
    }

    Variant variant() const noexcept { return config.variant; }
    std::size_t feature_dim() const noexcept { return dan.dims.input_dim; }

    /// Every trainable parameter, in a fixed order.
    std::vector<Parameter*> parameters() {
        std::vector<Parameter*> out;
        if (embedder)
            for (auto* p : embedder->parameters()) out.push_back(p);
        if (lookup && lookup->is_trainable()) out.push_back(&lookup->rows());
        for (auto* p : dan.parameters()) out.push_back(p);
        return out;
    }
};

/// Sorted distinct words of a corpus (vocabulary of a trainable lookup table).
inline std::vector<Word> corpus_vocabulary(std::span<const LabeledExample> corpus) {
    std::set<Word> words;
    for (const auto& ex : corpus) words.insert(ex.document.words.begin(), ex.document.words.end());
    return {words.begin(), words.end()};
}

/// One forward computation over a Graph. Word features are computed once per
/// distinct word and reused, so a word repeated across a minibatch shares its
/// subgraph (gradients accumulate through every use).
class ForwardPass {
public:
    ForwardPass(Graph& graph, Model& model) : graph_(graph), model_(model) {}

    Graph& graph() noexcept { return graph_; }
    Model& model() noexcept { return model_; }

    /// Output of the character embedder e(w).
    Var characters(const Word& w) {
        if (!model_.embedder) throw Error(std::string(variant_name(model_.variant())) + " model has no character embedder");
        auto it = char_cache_.find(w);
        if (it != char_cache_.end()) return it->second;
        Var v = embed_word(graph_, *model_.embedder, model_.chars, w);
        char_cache_.emplace(w, v);
        return v;
    }

    /// Classifier input feature for `w` under the model's variant.
    Var word(const Word& w) {
        auto it = feature_cache_.find(w);
        if (it != feature_cache_.end()) return it->second;
        Var v;
        switch (model_.variant()) {
        case Variant::clwe:
        case Variant::sup: v = model_.lookup->lookup(graph_, w); break;
        case Variant::com: v = concat(characters(w), model_.lookup->lookup(graph_, w)); break;
        default: v = characters(w); break;
        }
        feature_cache_.emplace(w, v);
        return v;
    }

    Var logits(const Document& doc, Mode mode, Rng* rng) {
        std::vector<Var> vectors;
        vectors.reserve(doc.words.size());
        for (const auto& w : doc.words) vectors.push_back(word(w));
        return dan_forward(graph_, model_.dan, vectors, mode, rng);
    }

private:
    Graph& graph_;
    Model& model_;
    std::unordered_map<Word, Var> char_cache_;
    std::unordered_map<Word, Var> feature_cache_;
};

struct Prediction {
    std::size_t label = 0;
    std::vector<double> probabilities;
};

/// Inference-mode prediction; ties resolve to the lowest label index.
inline Prediction predict(Model& model, const Document& doc) {
    Graph g;
    ForwardPass pass(g, model);
    auto probs = softmax(pass.logits(doc, Mode::infer, nullptr).value().data());
    const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    return {best, std::move(probs)};
}

/// Character-embedder vectors for a word list, as a table (duplicates skipped).
inline EmbeddingTable embed_words(Model& model, std::span<const Word> words) {
    if (!model.embedder) throw Error(std::string(variant_name(model.variant())) + " model has no character embedder");
    EmbeddingTable out(model.embedder->dims.word_dim);
    for (const auto& w : words) {
        if (out.find(w)) continue;
        Graph g;
        out.add(w, embed_word(g, *model.embedder, model.chars, w).value().values());
    }
    return out;
}

} // namespace caco
