#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "caco/tensor.hpp"

namespace caco {

/// A learnable tensor together with its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros_like(value)) {}

    void zero_grad() { grad.fill(0.0); }
};

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
public:
    Var() = default;
    Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

    const Tensor& value() const;
    const Tensor& grad() const;
    std::size_t id() const noexcept { return id_; }
    Graph& graph() const noexcept { return *graph_; }
    bool valid() const noexcept { return graph_ != nullptr; }

private:
    Graph* graph_ = nullptr;
    std::size_t id_ = 0;
};

/// Reverse-mode differentiation tape. Nodes are appended in evaluation order,
/// so the tape itself is a topological order of the (acyclic) graph.
class Graph {
public:
    /// Accumulates the node's gradient into its parents' gradients.
    using BackwardRule = std::function<void(Graph&, std::size_t self)>;

    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var constant(Tensor value) { return push(std::move(value), false, nullptr, {}); }

    /// Leaf bound to `p`. Repeated calls for the same parameter share one node.
    Var parameter(Parameter& p) {
        if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return {this, it->second};
        Var v = push(p.value, true, &p, {});
        param_nodes_.emplace(&p, v.id());
        return v;
    }

    /// Appends an interior node. `rule` is dropped when no input requires a gradient.
    Var record(Tensor value, std::initializer_list<Var> inputs, BackwardRule rule) {
        bool needs = false;
        for (const Var& in : inputs) needs = needs || nodes_[in.id()].requires_grad;
        return push(std::move(value), needs, nullptr, needs ? std::move(rule) : BackwardRule{});
    }

    Var record(Tensor value, std::span<const Var> inputs, BackwardRule rule) {
        bool needs = false;
        for (const Var& in : inputs) needs = needs || nodes_[in.id()].requires_grad;
        return push(std::move(value), needs, nullptr, needs ? std::move(rule) : BackwardRule{});
    }

    const Tensor& value(std::size_t id) const { return nodes_[id].value; }
    const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

    /// Gradient buffer of node `id` for accumulation, or nullptr when the node is constant.
    Tensor* grad_sink(std::size_t id) {
        Node& n = nodes_[id];
        return n.requires_grad ? &n.grad : nullptr;
    }

    std::size_t size() const noexcept { return nodes_.size(); }

    /// Propagates d(root)/d(node) through the tape and adds the leaf gradients
    /// into the bound Parameter::grad buffers. `root` must be a scalar.
    void backward(Var root) {
        const Tensor& rv = nodes_.at(root.id()).value;
        if (!rv.is_scalar())
            throw ShapeError("backward requires a scalar root, got shape " + to_string(rv.shape()));
        for (auto& n : nodes_)
            if (n.requires_grad) n.grad.fill(0.0);
        nodes_[root.id()].grad[0] = 1.0;
        for (std::size_t i = root.id() + 1; i-- > 0;) {
            Node& n = nodes_[i];
            if (n.requires_grad && n.backward) n.backward(*this, i);
        }
        for (auto& n : nodes_)
            if (n.param) n.param->grad.add_scaled(n.grad);
    }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        Parameter* param = nullptr;
        BackwardRule backward;
    };

    Var push(Tensor value, bool requires_grad, Parameter* param, BackwardRule rule) {
        Node n;
        n.grad = requires_grad ? Tensor::zeros_like(value) : Tensor();
        n.value = std::move(value);
        n.requires_grad = requires_grad;
        n.param = param;
        n.backward = std::move(rule);
        nodes_.push_back(std::move(n));
        return {this, nodes_.size() - 1};
    }

    // deque: values handed out by Var::value() stay valid as the tape grows.
    std::deque<Node> nodes_;
    std::unordered_map<const Parameter*, std::size_t> param_nodes_;
};

inline const Tensor& Var::value() const { return graph_->value(id_); }
inline const Tensor& Var::grad() const { return graph_->grad(id_); }

inline void zero_grads(std::span<Parameter* const> params) {
    for (Parameter* p : params) p->zero_grad();
}

} // namespace caco
