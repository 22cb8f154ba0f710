#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "caco/autodiff.hpp"

namespace caco {

enum class Activation { sigmoid, tanh, relu };

namespace detail {

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline bool is_vector(const Tensor& t) { return t.rank() == 1; }

} // namespace detail

/// Numerically stable softmax (max subtracted before exponentiation).
inline std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) z += (out[i] = std::exp(logits[i] - m));
    for (double& v : out) v /= z;
    return out;
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    const double lse = m + std::log(z);
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
    return out;
}

/// W x + b for W[m x n], x[n], b[m].
inline Var affine(Var w, Var x, Var b) {
    const Tensor& W = w.value();
    const Tensor& X = x.value();
    const Tensor& B = b.value();
    if (W.rank() != 2 || !detail::is_vector(X) || !detail::is_vector(B) || W.shape()[1] != X.size() ||
        W.shape()[0] != B.size())
        throw ShapeError("affine: incompatible shapes W" + to_string(W.shape()) + " x" + to_string(X.shape()) +
                         " b" + to_string(B.shape()));
    const std::size_t m = W.shape()[0];
    const std::size_t n = W.shape()[1];
    Tensor out = B;
    const double* wd = W.data().data();
    const double* xd = X.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* wr = wd + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += wr[j] * xd[j];
        out[i] += acc;
    }
    const std::size_t wi = w.id(), xi = x.id(), bi = b.id();
    return w.graph().record(std::move(out), {w, x, b}, [wi, xi, bi, m, n](Graph& g, std::size_t self) {
        const double* gy = g.grad(self).data().data();
        if (Tensor* gw = g.grad_sink(wi)) {
            const double* xd = g.value(xi).data().data();
            double* gwd = gw->data().data();
            for (std::size_t i = 0; i < m; ++i) {
                if (gy[i] == 0.0) continue;
                double* row = gwd + i * n;
                for (std::size_t j = 0; j < n; ++j) row[j] += gy[i] * xd[j];
            }
        }
        if (Tensor* gx = g.grad_sink(xi)) {
            const double* wd = g.value(wi).data().data();
            double* gxd = gx->data().data();
            for (std::size_t i = 0; i < m; ++i) {
                if (gy[i] == 0.0) continue;
                const double* row = wd + i * n;
                for (std::size_t j = 0; j < n; ++j) gxd[j] += row[j] * gy[i];
            }
        }
        if (Tensor* gb = g.grad_sink(bi))
            for (std::size_t i = 0; i < m; ++i) (*gb)[i] += gy[i];
    });
}

inline Var elementwise(Activation kind, Var x) {
    Tensor out = x.value();
    for (double& v : out.data()) {
        switch (kind) {
        case Activation::sigmoid: v = detail::sigmoid(v); break;
        case Activation::tanh: v = std::tanh(v); break;
        case Activation::relu: v = v > 0.0 ? v : 0.0; break;
        }
    }
    const std::size_t xi = x.id();
    return x.graph().record(std::move(out), {x}, [xi, kind](Graph& g, std::size_t self) {
        Tensor* gx = g.grad_sink(xi);
        const Tensor& gy = g.grad(self);
        const Tensor& y = g.value(self);
        for (std::size_t i = 0; i < y.size(); ++i) {
            double d = 0.0;
            switch (kind) {
            case Activation::sigmoid: d = y[i] * (1.0 - y[i]); break;
            case Activation::tanh: d = 1.0 - y[i] * y[i]; break;
            case Activation::relu: d = g.value(xi)[i] > 0.0 ? 1.0 : 0.0; break;
            }
            (*gx)[i] += gy[i] * d;
        }
    });
}

inline Var sigmoid(Var x) { return elementwise(Activation::sigmoid, x); }
inline Var tanh(Var x) { return elementwise(Activation::tanh, x); }
inline Var relu(Var x) { return elementwise(Activation::relu, x); }

inline Var add(Var a, Var b) {
    Tensor::require_same_shape(a.value(), b.value(), "add");
    Tensor out = a.value();
    out.add_scaled(b.value());
    const std::size_t ai = a.id(), bi = b.id();
    return a.graph().record(std::move(out), {a, b}, [ai, bi](Graph& g, std::size_t self) {
        if (Tensor* ga = g.grad_sink(ai)) ga->add_scaled(g.grad(self));
        if (Tensor* gb = g.grad_sink(bi)) gb->add_scaled(g.grad(self));
    });
}

/// Hadamard product.
inline Var mul(Var a, Var b) {
    Tensor::require_same_shape(a.value(), b.value(), "mul");
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
    const std::size_t ai = a.id(), bi = b.id();
    return a.graph().record(std::move(out), {a, b}, [ai, bi](Graph& g, std::size_t self) {
        const Tensor& gy = g.grad(self);
        if (Tensor* ga = g.grad_sink(ai))
            for (std::size_t i = 0; i < gy.size(); ++i) (*ga)[i] += gy[i] * g.value(bi)[i];
        if (Tensor* gb = g.grad_sink(bi))
            for (std::size_t i = 0; i < gy.size(); ++i) (*gb)[i] += gy[i] * g.value(ai)[i];
    });
}

/// Elementwise product with a constant tensor (dropout masks).
inline Var mul_constant(Var x, Tensor mask) {
    Tensor::require_same_shape(x.value(), mask, "mul_constant");
    Tensor out = x.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    const std::size_t xi = x.id();
    return x.graph().record(std::move(out), {x}, [xi, mask = std::move(mask)](Graph& g, std::size_t self) {
        Tensor* gx = g.grad_sink(xi);
        const Tensor& gy = g.grad(self);
        for (std::size_t i = 0; i < gy.size(); ++i) (*gx)[i] += gy[i] * mask[i];
    });
}

inline Var scale(Var x, double s) {
    Tensor out = x.value();
    for (double& v : out.data()) v *= s;
    const std::size_t xi = x.id();
    return x.graph().record(std::move(out), {x}, [xi, s](Graph& g, std::size_t self) {
        g.grad_sink(xi)->add_scaled(g.grad(self), s);
    });
}

/// [a; b] for two vectors.
inline Var concat(Var a, Var b) {
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    if (!detail::is_vector(A) || !detail::is_vector(B))
        throw ShapeError("concat: expected vectors, got " + to_string(A.shape()) + " and " + to_string(B.shape()));
    std::vector<double> data(A.values());
    data.insert(data.end(), B.values().begin(), B.values().end());
    const std::size_t na = A.size();
    const std::size_t ai = a.id(), bi = b.id();
    return a.graph().record(Tensor::vector(std::move(data)), {a, b}, [ai, bi, na](Graph& g, std::size_t self) {
        const Tensor& gy = g.grad(self);
        if (Tensor* ga = g.grad_sink(ai))
            for (std::size_t i = 0; i < na; ++i) (*ga)[i] += gy[i];
        if (Tensor* gb = g.grad_sink(bi))
            for (std::size_t i = na; i < gy.size(); ++i) (*gb)[i - na] += gy[i];
    });
}

/// Row `index` of a matrix, as a vector.
inline Var row(Var matrix, std::size_t index) {
    const Tensor& M = matrix.value();
    if (M.rank() != 2 || index >= M.shape()[0])
        throw ShapeError("row: index " + std::to_string(index) + " out of range for " + to_string(M.shape()));
    auto r = M.row(index);
    const std::size_t mi = matrix.id();
    return matrix.graph().record(Tensor::vector(std::vector<double>(r.begin(), r.end())), {matrix},
                                 [mi, index](Graph& g, std::size_t self) {
                                     auto dst = g.grad_sink(mi)->row(index);
                                     const Tensor& gy = g.grad(self);
                                     for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += gy[j];
                                 });
}

/// Componentwise mean. The summation order is canonicalized (inputs sorted by
/// value) so the result is bit-identical under any permutation of `xs`.
inline Var reduce_mean(std::span<const Var> xs) {
    if (xs.empty()) throw EmptyDocumentError("reduce_mean: empty input list (empty document reached the classifier)");
    const Shape& shape = xs.front().value().shape();
    for (const Var& v : xs)
        if (v.value().shape() != shape)
            throw ShapeError("reduce_mean: shape mismatch " + to_string(shape) + " vs " + to_string(v.value().shape()));
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& va = xs[a].value().values();
        const auto& vb = xs[b].value().values();
        return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
    });
    Tensor out(shape);
    for (std::size_t k : order) out.add_scaled(xs[k].value());
    const double n = static_cast<double>(xs.size());
    for (double& v : out.data()) v /= n;
    std::vector<std::size_t> ids;
    ids.reserve(xs.size());
    for (const Var& v : xs) ids.push_back(v.id());
    return xs.front().graph().record(std::move(out), xs, [ids = std::move(ids), n](Graph& g, std::size_t self) {
        for (std::size_t id : ids)
            if (Tensor* gx = g.grad_sink(id)) gx->add_scaled(g.grad(self), 1.0 / n);
    });
}

/// -log softmax(logits)[gold].
inline Var softmax_nll(Var logits, std::size_t gold) {
    const Tensor& z = logits.value();
    if (gold >= z.size())
        throw Error("softmax_nll: gold label " + std::to_string(gold) + " out of range for " +
                    std::to_string(z.size()) + " classes");
    const auto logp = log_softmax(z.data());
    const std::size_t zi = logits.id();
    return logits.graph().record(Tensor::scalar(-logp[gold]), {logits}, [zi, gold](Graph& g, std::size_t self) {
        const double gy = g.grad(self)[0];
        const auto p = softmax(g.value(zi).data());
        Tensor* gz = g.grad_sink(zi);
        for (std::size_t i = 0; i < p.size(); ++i) (*gz)[i] += gy * (p[i] - (i == gold ? 1.0 : 0.0));
    });
}

/// ||a - b||^2.
inline Var squared_distance(Var a, Var b) {
    Tensor::require_same_shape(a.value(), b.value(), "squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.value().size(); ++i) {
        const double d = a.value()[i] - b.value()[i];
        s += d * d;
    }
    const std::size_t ai = a.id(), bi = b.id();
    return a.graph().record(Tensor::scalar(s), {a, b}, [ai, bi](Graph& g, std::size_t self) {
        const double gy = g.grad(self)[0];
        const Tensor& A = g.value(ai);
        const Tensor& B = g.value(bi);
        Tensor* ga = g.grad_sink(ai);
        Tensor* gb = g.grad_sink(bi);
        for (std::size_t i = 0; i < A.size(); ++i) {
            const double d = 2.0 * (A[i] - B[i]) * gy;
            if (ga) (*ga)[i] += d;
            if (gb) (*gb)[i] -= d;
        }
    });
}

/// Checks that `p` is a probability vector: finite, nonnegative, sums to 1 within 1e-9.
inline void validate_distribution(std::span<const double> p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) throw Error(std::string(what) + ": invalid probability " + std::to_string(v));
        sum += v;
    }
    if (p.empty() || std::abs(sum - 1.0) > 1e-9)
        throw Error(std::string(what) + ": probabilities sum to " + std::to_string(sum) + ", expected 1");
}

/// KL(p_ref || softmax(logits)). `p_ref` is a constant; terms with p_ref(y) = 0 contribute 0.
inline Var kl_divergence(const Tensor& p_ref, Var logits) {
    validate_distribution(p_ref.data(), "kl_divergence");
    if (p_ref.size() != logits.value().size())
        throw ShapeError("kl_divergence: reference " + to_string(p_ref.shape()) + " vs logits " +
                         to_string(logits.value().shape()));
    const auto logq = log_softmax(logits.value().data());
    double kl = 0.0;
    for (std::size_t y = 0; y < logq.size(); ++y)
        if (p_ref[y] > 0.0) kl += p_ref[y] * (std::log(p_ref[y]) - logq[y]);
    const std::size_t zi = logits.id();
    return logits.graph().record(Tensor::scalar(kl), {logits}, [zi, p_ref](Graph& g, std::size_t self) {
        const double gy = g.grad(self)[0];
        const auto q = softmax(g.value(zi).data());
        Tensor* gz = g.grad_sink(zi);
        for (std::size_t i = 0; i < q.size(); ++i) (*gz)[i] += gy * (q[i] - p_ref[i]);
    });
}

/// sum_k weights[k] * terms[k] over scalar terms.
inline Var weighted_sum(std::span<const Var> terms, std::span<const double> weights) {
    if (terms.empty() || terms.size() != weights.size())
        throw ShapeError("weighted_sum: " + std::to_string(terms.size()) + " terms, " +
                         std::to_string(weights.size()) + " weights");
    double s = 0.0;
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        s += weights[k] * terms[k].value().item();
        ids.push_back(terms[k].id());
    }
    std::vector<double> w(weights.begin(), weights.end());
    return terms.front().graph().record(Tensor::scalar(s), terms,
                                        [ids = std::move(ids), w = std::move(w)](Graph& g, std::size_t self) {
                                            const double gy = g.grad(self)[0];
                                            for (std::size_t k = 0; k < ids.size(); ++k)
                                                if (Tensor* gt = g.grad_sink(ids[k])) (*gt)[0] += gy * w[k];
                                        });
}

} // namespace caco
