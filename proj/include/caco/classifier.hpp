#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "caco/embedder.hpp"
#include "caco/ops.hpp"
#include "caco/random.hpp"

namespace caco {

enum class Mode { train, infer };

struct DenseLayer {
    Parameter w;
    Parameter b;

    static DenseLayer create(const std::string& name, std::size_t in, std::size_t out, Rng& rng) {
        return {{name + ".w", init::glorot(out, in, rng)}, {name + ".b", init::constant(out, 0.0)}};
    }

    Var apply(Graph& g, Var x) { return affine(g.parameter(w), x, g.parameter(b)); }
};

struct DanDims {
    std::size_t input_dim = 40;
    std::vector<std::size_t> hidden{100, 100, 100};
    std::size_t labels = 4;
    double dropout = 0.1;
    /// Also drop units of the averaged input z0.
    bool dropout_input = false;

    friend bool operator==(const DanDims&, const DanDims&) = default;
};

/// Deep averaging network: mean of word vectors, k ReLU layers, linear output.
struct DanParams {
    DanDims dims;
    std::vector<DenseLayer> hidden;
    DenseLayer output;

    static DanParams create(const DanDims& dims, Rng& rng) {
        if (dims.dropout < 0.0 || dims.dropout >= 1.0)
            throw ConfigError("dropout must be in [0, 1), got " + std::to_string(dims.dropout));
        if (dims.labels == 0) throw ConfigError("classifier needs at least one label");
        DanParams p;
        p.dims = dims;
        std::size_t in = dims.input_dim;
        for (std::size_t i = 0; i < dims.hidden.size(); ++i) {
            p.hidden.push_back(DenseLayer::create("dan.hidden" + std::to_string(i), in, dims.hidden[i], rng));
            in = dims.hidden[i];
        }
        p.output = DenseLayer::create("dan.output", in, dims.labels, rng);
        return p;
    }

    std::vector<Parameter*> parameters() {
        std::vector<Parameter*> out;
        for (auto& l : hidden) {
            out.push_back(&l.w);
            out.push_back(&l.b);
        }
        out.push_back(&output.w);
        out.push_back(&output.b);
        return out;
    }
};

/// Inverted dropout: keeps each unit with probability 1 - rate and scales it by 1 / (1 - rate).
inline Var dropout(Var x, double rate, Rng& rng) {
    if (rate <= 0.0) return x;
    Tensor mask(x.value().shape());
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& m : mask.data()) m = rng.uniform() < rate ? 0.0 : keep_scale;
    return mul_constant(x, std::move(mask));
}

/// Returns unnormalized label scores. `rng` is consulted only in train mode.
inline Var dan_forward(Graph& g, DanParams& p, std::span<const Var> vectors, Mode mode, Rng* rng) {
    if (vectors.empty()) throw EmptyDocumentError("dan_forward: document has no words");
    if (vectors.front().value().size() != p.dims.input_dim)
        throw ShapeError("dan_forward: word vectors have dimension " + std::to_string(vectors.front().value().size()) +
                         ", classifier expects " + std::to_string(p.dims.input_dim));
    const bool drop = mode == Mode::train && p.dims.dropout > 0.0;
    if (drop && !rng) throw Error("dan_forward: train mode with dropout needs a random stream");
    Var z = reduce_mean(vectors);
    if (drop && p.dims.dropout_input) z = dropout(z, p.dims.dropout, *rng);
    for (auto& layer : p.hidden) {
        z = relu(layer.apply(g, z));
        if (drop) z = dropout(z, p.dims.dropout, *rng);
    }
    return p.output.apply(g, z);
}

} // namespace caco
