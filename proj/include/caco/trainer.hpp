#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "caco/objectives.hpp"

namespace caco {

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

class Adam {
public:
    explicit Adam(AdamConfig config = {}) : config_(config) {}

    /// Applies one bias-corrected update using each parameter's accumulated grad.
    void step(std::span<Parameter* const> params) {
        if (m_.empty()) {
            for (Parameter* p : params) {
                m_.push_back(Tensor::zeros_like(p->value));
                v_.push_back(Tensor::zeros_like(p->value));
            }
        }
        if (params.size() != m_.size())
            throw ShapeError("adam: parameter count changed from " + std::to_string(m_.size()) + " to " +
                             std::to_string(params.size()));
        ++t_;
        const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
        for (std::size_t k = 0; k < params.size(); ++k) {
            Parameter& p = *params[k];
            Tensor::require_same_shape(p.value, m_[k], "adam");
            Tensor::require_same_shape(p.value, p.grad, "adam");
            auto theta = p.value.data();
            auto g = p.grad.data();
            auto m = m_[k].data();
            auto v = v_[k].data();
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
                v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
                const double mhat = m[i] / c1;
                const double vhat = v[i] / c2;
                theta[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
            }
        }
    }

    std::size_t steps() const noexcept { return t_; }
    const AdamConfig& config() const noexcept { return config_; }

private:
    AdamConfig config_;
    std::vector<Tensor> m_, v_;
    std::size_t t_ = 0;
};

// ---------------------------------------------------------------------------
// Data assembly and sampling

struct CorpusSample {
    std::span<const LabeledExample> corpus;
    std::size_t count = 0;
};

/// Uniform without-replacement sample of `count` examples from each source,
/// concatenated. Samples keep corpus order; a full-size request is the identity.
inline std::vector<LabeledExample> assemble_training_set(std::span<const CorpusSample> sources, Rng& rng) {
    std::vector<LabeledExample> out;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        const auto& src = sources[s];
        if (src.count > src.corpus.size())
            throw ConfigError("source " + std::to_string(s) + ": requested " + std::to_string(src.count) +
                              " documents from a corpus of " + std::to_string(src.corpus.size()));
        if (src.count == src.corpus.size()) {
            out.insert(out.end(), src.corpus.begin(), src.corpus.end());
            continue;
        }
        auto idx = rng.sample_without_replacement(src.corpus.size(), src.count);
        std::sort(idx.begin(), idx.end());
        for (std::size_t i : idx) out.push_back(src.corpus[i]);
    }
    return out;
}

/// `size` items drawn uniformly with replacement.
template <class T>
std::vector<T> sample_aux_batch(std::span<const T> resource, std::size_t size, Rng& rng) {
    if (resource.empty()) throw Error("cannot sample an auxiliary batch from an empty resource");
    std::vector<T> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) out.push_back(resource[rng.index(resource.size())]);
    return out;
}

struct DistillSelection {
    std::vector<DistillExample> examples;
    std::vector<std::string> warnings;
};

/// Runs the frozen reference model on each reference-side document, bins pairs by
/// predicted label and draws floor(n / L) pairs per bin, so the selected
/// reference predictions are close to uniform over labels.
inline DistillSelection select_distill_docs(Model& reference, std::span<const ParallelPair> pool, std::size_t n, Rng& rng) {
    if (n > pool.size())
        throw ConfigError("requested " + std::to_string(n) + " parallel documents from a pool of " + std::to_string(pool.size()));
    const std::size_t labels = reference.labels.size();
    std::vector<std::vector<std::size_t>> bins(labels);
    std::vector<Prediction> predictions;
    predictions.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        predictions.push_back(predict(reference, pool[i].reference));
        bins[predictions.back().label].push_back(i);
    }
    const std::size_t per_bin = n / labels;
    DistillSelection out;
    for (std::size_t y = 0; y < labels; ++y) {
        const auto& bin = bins[y];
        if (bin.size() < per_bin)
            out.warnings.push_back("label '" + reference.labels.name(y) + "': only " + std::to_string(bin.size()) +
                                   " of " + std::to_string(per_bin) + " requested documents available");
        const std::size_t take = std::min(per_bin, bin.size());
        for (std::size_t k : rng.sample_without_replacement(bin.size(), take)) {
            const std::size_t i = bin[k];
            out.examples.push_back({pool[i], Tensor::vector(predictions[i].probabilities)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Training loop

enum class Schedule {
    /// All tasks optimized together from the first step.
    joint,
    /// `pretrain_epochs` of auxiliary tasks only, then joint training.
    pretrain_then_finetune,
};

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 16;
    std::size_t aux_batch_size = 16;
    LossWeights weights;
    AdamConfig adam;
    Schedule schedule = Schedule::joint;
    std::size_t pretrain_epochs = 0;
};

struct TrainingData {
    std::vector<LabeledExample> labeled;
    BilingualDictionary dictionary;
    std::vector<MimickTarget> mimick;
    std::vector<DistillExample> distill;
};

/// Mean of each loss component over an epoch's iterations.
struct EpochLog {
    std::size_t epoch = 0;
    bool pretraining = false;
    double classification = 0.0;
    double dict = 0.0;
    double mimick = 0.0;
    double distill = 0.0;
    double total = 0.0;
};

/// Weights actually applied for this model: tasks outside the variant are zero.
inline LossWeights effective_weights(const Model& model, const LossWeights& w) {
    LossWeights out;
    out.dict = uses_dictionary_task(model.variant()) ? w.dict : 0.0;
    out.mimick = uses_mimick_task(model.variant()) ? w.mimick : 0.0;
    out.distill = model.config.distill ? w.distill : 0.0;
    return out;
}

class Trainer {
public:
    using EpochCallback = std::function<void(const EpochLog&, Model&)>;

    Trainer(Model& model, const TrainingData& data, const TrainConfig& config)
        : model_(model), data_(data), config_(config), weights_(effective_weights(model, config.weights)),
          adam_(config.adam), params_(model.parameters()) {
        if (config.batch_size == 0 || config.aux_batch_size == 0) throw ConfigError("batch sizes must be positive");
        std::vector<std::string> missing;
        if (weights_.dict > 0.0 && data.dictionary.pairs.empty()) missing.emplace_back("dictionary");
        if (weights_.mimick > 0.0 && data.mimick.empty()) missing.emplace_back("embeddings");
        if (weights_.distill > 0.0 && data.distill.empty()) missing.emplace_back("distill_data");
        if (!missing.empty()) {
            std::string msg = std::string(variant_name(model.variant())) + " training is missing:";
            for (auto& m : missing) msg += " " + m;
            throw ConfigError(msg);
        }
        if (weights_.mimick > 0.0 && data.mimick.front().vector.size() != model.embedder->dims.word_dim)
            throw ShapeError("embedding table dimension " + std::to_string(data.mimick.front().vector.size()) +
                             " does not match embedder output dimension " +
                             std::to_string(model.embedder->dims.word_dim));
    }

    void on_epoch(EpochCallback cb) { callback_ = std::move(cb); }

    const LossWeights& weights() const noexcept { return weights_; }

    /// Runs the configured schedule. `rng` drives shuffling, auxiliary sampling
    /// and dropout, in that order within each iteration.
    std::vector<EpochLog> run(Rng& rng) {
        std::vector<EpochLog> log;
        std::size_t epoch = 0;
        if (config_.schedule == Schedule::pretrain_then_finetune)
            for (std::size_t e = 0; e < config_.pretrain_epochs; ++e) log.push_back(pretrain_epoch(epoch++, rng));
        if (data_.labeled.empty() && config_.epochs > 0) throw ConfigError("no labeled training documents");
        std::vector<std::size_t> order(data_.labeled.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t e = 0; e < config_.epochs; ++e) log.push_back(joint_epoch(epoch++, order, rng));
        return log;
    }

    /// One optimizer step on the given labeled minibatch plus freshly sampled
    /// auxiliary batches.
    LossTerms step(std::span<const LabeledExample> labeled, Rng& rng) {
        std::vector<WordPair> dict;
        std::vector<MimickTarget> mimick;
        std::vector<DistillExample> distill;
        if (weights_.dict > 0.0)
            dict = sample_aux_batch<WordPair>(data_.dictionary.pairs, config_.aux_batch_size, rng);
        if (weights_.mimick > 0.0) mimick = sample_aux_batch<MimickTarget>(data_.mimick, config_.aux_batch_size, rng);
        if (weights_.distill > 0.0)
            distill = sample_aux_batch<DistillExample>(data_.distill, config_.aux_batch_size, rng);
        zero_grads(params_);
        Graph g;
        ForwardPass pass(g, model_);
        LossTerms terms = loss_total(pass, {labeled, dict, mimick, distill}, weights_, rng);
        g.backward(terms.total);
        adam_.step(params_);
        return terms;
    }

private:
    EpochLog joint_epoch(std::size_t epoch, std::vector<std::size_t>& order, Rng& rng) {
        rng.shuffle(order);
        EpochLog entry{epoch, false};
        std::size_t iterations = 0;
        std::vector<LabeledExample> batch;
        for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
            batch.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + config_.batch_size); ++i)
                batch.push_back(data_.labeled[order[i]]);
            accumulate(entry, step(batch, rng));
            ++iterations;
        }
        return finish(entry, iterations);
    }

    EpochLog pretrain_epoch(std::size_t epoch, Rng& rng) {
        EpochLog entry{epoch, true};
        std::size_t largest = 0;
        if (weights_.dict > 0.0) largest = std::max(largest, data_.dictionary.size());
        if (weights_.mimick > 0.0) largest = std::max(largest, data_.mimick.size());
        if (weights_.distill > 0.0) largest = std::max(largest, data_.distill.size());
        if (largest == 0) throw ConfigError("pretraining requires at least one auxiliary task");
        const std::size_t iterations = (largest + config_.aux_batch_size - 1) / config_.aux_batch_size;
        for (std::size_t it = 0; it < iterations; ++it) accumulate(entry, step({}, rng));
        return finish(entry, iterations);
    }

    static void accumulate(EpochLog& entry, const LossTerms& t) {
        entry.classification += t.classification;
        entry.dict += t.dict;
        entry.mimick += t.mimick;
        entry.distill += t.distill;
        entry.total += t.total_value;
    }

    EpochLog finish(EpochLog entry, std::size_t iterations) {
        const double n = static_cast<double>(std::max<std::size_t>(iterations, 1));
        entry.classification /= n;
        entry.dict /= n;
        entry.mimick /= n;
        entry.distill /= n;
        entry.total /= n;
        if (callback_) callback_(entry, model_);
        return entry;
    }

    Model& model_;
    const TrainingData& data_;
    TrainConfig config_;
    LossWeights weights_;
    Adam adam_;
    std::vector<Parameter*> params_;
    EpochCallback callback_;
};

inline std::vector<EpochLog> train(Model& model, const TrainingData& data, const TrainConfig& config, Rng& rng) {
    Trainer trainer(model, data, config);
    return trainer.run(rng);
}

} // namespace caco
