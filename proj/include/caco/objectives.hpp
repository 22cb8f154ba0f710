#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "caco/data.hpp"
#include "caco/model.hpp"

namespace caco {

/// Weights of the auxiliary terms in L = Ls + lambda_d Ld + lambda_e Le + lambda_p Lp.
struct LossWeights {
    double dict = 1.0;
    double mimick = 0.001;
    double distill = 1.0;

    friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Mean negative log-likelihood of the gold labels, dropout active.
inline Var loss_classification(ForwardPass& pass, std::span<const LabeledExample> batch, Rng& rng) {
    if (batch.empty()) throw Error("loss_classification: empty batch");
    std::vector<Var> terms;
    terms.reserve(batch.size());
    for (const auto& ex : batch) terms.push_back(softmax_nll(pass.logits(ex.document, Mode::train, &rng), ex.label));
    std::vector<double> w(terms.size(), 1.0 / static_cast<double>(terms.size()));
    return weighted_sum(terms, w);
}

/// Mean squared distance between embeddings of translation pairs.
inline Var loss_dict(ForwardPass& pass, std::span<const WordPair> pairs) {
    if (pairs.empty()) throw Error("loss_dict: empty batch");
    std::vector<Var> terms;
    terms.reserve(pairs.size());
    for (const auto& p : pairs) terms.push_back(squared_distance(pass.characters(p.source), pass.characters(p.target)));
    std::vector<double> w(terms.size(), 1.0 / static_cast<double>(terms.size()));
    return weighted_sum(terms, w);
}

/// Rows of a pretrained table used as mimick targets.
struct MimickTarget {
    Word word;
    Tensor vector;
};

inline std::vector<MimickTarget> mimick_targets(const EmbeddingTable& table) {
    std::vector<MimickTarget> out;
    out.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) out.push_back({table.word(i), table.row_tensor(i)});
    return out;
}

/// Mean squared distance between e(w_i) and the constant rows E_i.
inline Var loss_mimick(ForwardPass& pass, std::span<const MimickTarget> rows) {
    if (rows.empty()) throw Error("loss_mimick: empty batch");
    Model& m = pass.model();
    if (!m.embedder) throw Error("loss_mimick: model has no character embedder");
    if (rows.front().vector.size() != m.embedder->dims.word_dim)
        throw ShapeError("loss_mimick: table dimension " + std::to_string(rows.front().vector.size()) +
                         " does not match embedder output dimension " + std::to_string(m.embedder->dims.word_dim));
    std::vector<Var> terms;
    terms.reserve(rows.size());
    for (const auto& r : rows)
        terms.push_back(squared_distance(pass.characters(r.word), pass.graph().constant(r.vector)));
    std::vector<double> w(terms.size(), 1.0 / static_cast<double>(terms.size()));
    return weighted_sum(terms, w);
}

/// Mean KL(p_ref(.|x_h) || p(.|x_s)) over parallel pairs, dropout active.
inline Var loss_distill(ForwardPass& pass, std::span<const DistillExample> batch, Rng& rng) {
    if (batch.empty()) throw Error("loss_distill: empty batch");
    std::vector<Var> terms;
    terms.reserve(batch.size());
    for (const auto& ex : batch) {
        if (ex.reference_output.size() != pass.model().labels.size())
            throw Error("loss_distill: missing or mis-sized reference output");
        terms.push_back(kl_divergence(ex.reference_output, pass.logits(ex.pair.source, Mode::train, &rng)));
    }
    std::vector<double> w(terms.size(), 1.0 / static_cast<double>(terms.size()));
    return weighted_sum(terms, w);
}

/// Minibatches for one optimizer step. Empty spans mean the task is absent.
struct TaskBatches {
    std::span<const LabeledExample> labeled;
    std::span<const WordPair> dict;
    std::span<const MimickTarget> mimick;
    std::span<const DistillExample> distill;
};

struct LossTerms {
    /// Graph node of the weighted total; valid only while its graph lives.
    Var total;
    double total_value = 0.0;
    double classification = 0.0;
    double dict = 0.0;
    double mimick = 0.0;
    double distill = 0.0;
};

/// Weighted sum of the present tasks; absent tasks contribute exactly 0. A
/// task with positive weight and no batch is an error, except that all tasks
/// may be absent from the classification side (auxiliary-only pretraining)
/// as long as at least one term exists.
inline LossTerms loss_total(ForwardPass& pass, const TaskBatches& batches, const LossWeights& weights, Rng& rng) {
    LossTerms out;
    std::vector<Var> terms;
    std::vector<double> w;
    if (!batches.labeled.empty()) {
        Var ls = loss_classification(pass, batches.labeled, rng);
        out.classification = ls.value().item();
        terms.push_back(ls);
        w.push_back(1.0);
    }
    auto aux = [&](double weight, bool present, const char* name, auto&& build, double& slot) {
        if (weight < 0.0) throw ConfigError(std::string("negative weight for ") + name);
        if (weight == 0.0) return;
        if (!present) throw ConfigError(std::string(name) + " weight is positive but no data is configured");
        Var v = build();
        slot = v.value().item();
        terms.push_back(v);
        w.push_back(weight);
    };
    aux(weights.dict, !batches.dict.empty(), "dictionary", [&] { return loss_dict(pass, batches.dict); }, out.dict);
    aux(weights.mimick, !batches.mimick.empty(), "mimick", [&] { return loss_mimick(pass, batches.mimick); }, out.mimick);
    aux(weights.distill, !batches.distill.empty(), "distillation", [&] { return loss_distill(pass, batches.distill, rng); },
        out.distill);
    if (terms.empty()) throw Error("loss_total: no task has data");
    out.total = weighted_sum(terms, w);
    out.total_value = out.total.value().item();
    return out;
}

} // namespace caco
