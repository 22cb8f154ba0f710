#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "caco/data.hpp"
#include "caco/ops.hpp"
#include "caco/random.hpp"
#include "caco/text.hpp"

namespace caco {

namespace init {

/// Uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)).
inline Tensor glorot(std::size_t rows, std::size_t cols, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Tensor t({rows, cols});
    for (double& v : t.data()) v = rng.uniform(-a, a);
    return t;
}

inline Tensor uniform(Shape shape, double a, Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(-a, a);
    return t;
}

inline Tensor constant(std::size_t n, double v) {
    Tensor t({n});
    t.fill(v);
    return t;
}

} // namespace init

struct EmbedderDims {
    std::size_t char_dim = 10;
    std::size_t hidden = 40;
    std::size_t word_dim = 40;

    friend bool operator==(const EmbedderDims&, const EmbedderDims&) = default;
};

/// One LSTM direction: four gates, each W[h x (d_c + h)] applied to [x; h_prev] plus b[h].
struct LstmParams {
    Parameter input_w, input_b;
    Parameter forget_w, forget_b;
    Parameter output_w, output_b;
    Parameter cell_w, cell_b;

    static LstmParams create(const std::string& prefix, std::size_t input_dim, std::size_t hidden, Rng& rng) {
        const std::size_t n = input_dim + hidden;
        LstmParams p;
        p.input_w = {prefix + ".input_w", init::glorot(hidden, n, rng)};
        p.input_b = {prefix + ".input_b", init::constant(hidden, 0.0)};
        p.forget_w = {prefix + ".forget_w", init::glorot(hidden, n, rng)};
        p.forget_b = {prefix + ".forget_b", init::constant(hidden, 1.0)};
        p.output_w = {prefix + ".output_w", init::glorot(hidden, n, rng)};
        p.output_b = {prefix + ".output_b", init::constant(hidden, 0.0)};
        p.cell_w = {prefix + ".cell_w", init::glorot(hidden, n, rng)};
        p.cell_b = {prefix + ".cell_b", init::constant(hidden, 0.0)};
        return p;
    }

    std::size_t hidden() const { return input_b.value.size(); }

    std::vector<Parameter*> parameters() {
        return {&input_w, &input_b, &forget_w, &forget_b, &output_w, &output_b, &cell_w, &cell_b};
    }
};

/// Runs the LSTM over `chars` (rows of `char_table`) from zero state and returns
/// the final hidden state.
inline Var lstm_run(Graph& g, LstmParams& p, Var char_table, std::span<const std::size_t> chars) {
    if (chars.empty()) throw Error("lstm_run: empty character sequence");
    const std::size_t h = p.hidden();
    Var wi = g.parameter(p.input_w), bi = g.parameter(p.input_b);
    Var wf = g.parameter(p.forget_w), bf = g.parameter(p.forget_b);
    Var wo = g.parameter(p.output_w), bo = g.parameter(p.output_b);
    Var wc = g.parameter(p.cell_w), bc = g.parameter(p.cell_b);
    Var hidden = g.constant(Tensor({h}));
    Var cell = g.constant(Tensor({h}));
    for (std::size_t c : chars) {
        Var xh = concat(row(char_table, c), hidden);
        Var in = sigmoid(affine(wi, xh, bi));
        Var forget = sigmoid(affine(wf, xh, bf));
        Var out = sigmoid(affine(wo, xh, bo));
        Var candidate = tanh(affine(wc, xh, bc));
        cell = add(mul(forget, cell), mul(in, candidate));
        hidden = mul(out, tanh(cell));
    }
    return hidden;
}

/// Character-level BiLSTM word embedder: e(w) = W_e [lstm_fwd(w); lstm_bwd(reverse(w))] + b_e.
struct EmbedderParams {
    EmbedderDims dims;
    Parameter char_embeddings;
    LstmParams forward;
    LstmParams backward;
    Parameter projection_w;
    Parameter projection_b;

    static EmbedderParams create(const EmbedderDims& dims, std::size_t vocab_size, Rng& rng) {
        EmbedderParams p;
        p.dims = dims;
        p.char_embeddings = {"embedder.chars", init::uniform({vocab_size, dims.char_dim}, 0.1, rng)};
        p.forward = LstmParams::create("embedder.lstm_fwd", dims.char_dim, dims.hidden, rng);
        p.backward = LstmParams::create("embedder.lstm_bwd", dims.char_dim, dims.hidden, rng);
        p.projection_w = {"embedder.proj_w", init::glorot(dims.word_dim, 2 * dims.hidden, rng)};
        p.projection_b = {"embedder.proj_b", init::constant(dims.word_dim, 0.0)};
        return p;
    }

    std::vector<Parameter*> parameters() {
        std::vector<Parameter*> out{&char_embeddings};
        for (auto* q : forward.parameters()) out.push_back(q);
        for (auto* q : backward.parameters()) out.push_back(q);
        out.push_back(&projection_w);
        out.push_back(&projection_b);
        return out;
    }
};

inline Var embed_word(Graph& g, EmbedderParams& p, const CharVocab& vocab, std::u32string_view word) {
    auto chars = vocab.encode(word);
    Var table = g.parameter(p.char_embeddings);
    Var fwd = lstm_run(g, p.forward, table, chars);
    std::reverse(chars.begin(), chars.end());
    Var bwd = lstm_run(g, p.backward, table, chars);
    return affine(g.parameter(p.projection_w), concat(fwd, bwd), g.parameter(p.projection_b));
}

/// Word-level lookup features. Frozen tables map out-of-vocabulary words to a
/// zero vector; trainable tables keep a learned UNK row at index 0.
class WordLookup {
public:
    WordLookup() = default;

    static WordLookup frozen(EmbeddingTable table) {
        WordLookup l;
        l.dim_ = table.dim();
        l.table_ = std::move(table);
        return l;
    }

    static WordLookup trainable(std::vector<Word> vocabulary, std::size_t dim, Rng& rng) {
        WordLookup l;
        l.trainable_ = true;
        l.dim_ = dim;
        l.vocabulary_ = std::move(vocabulary);
        for (std::size_t i = 0; i < l.vocabulary_.size(); ++i)
            if (!l.index_.emplace(l.vocabulary_[i], i + 1).second)
                throw Error("duplicate lookup word '" + utf8_encode(l.vocabulary_[i]) + "'");
        l.rows_ = {"lookup.rows", init::uniform({l.vocabulary_.size() + 1, dim}, 0.1, rng)};
        return l;
    }

    bool is_trainable() const noexcept { return trainable_; }
    std::size_t dim() const noexcept { return dim_; }
    const EmbeddingTable& table() const noexcept { return table_; }
    const std::vector<Word>& vocabulary() const noexcept { return vocabulary_; }
    Parameter& rows() noexcept { return rows_; }
    const Parameter& rows() const noexcept { return rows_; }

    Var lookup(Graph& g, const Word& w) {
        if (trainable_) {
            auto it = index_.find(w);
            return row(g.parameter(rows_), it == index_.end() ? 0 : it->second);
        }
        if (auto i = table_.find(w)) return g.constant(table_.row_tensor(*i));
        return g.constant(Tensor({dim_}));
    }

private:
    bool trainable_ = false;
    std::size_t dim_ = 0;
    EmbeddingTable table_;
    std::vector<Word> vocabulary_;
    std::unordered_map<Word, std::size_t> index_;
    Parameter rows_;
};

} // namespace caco
