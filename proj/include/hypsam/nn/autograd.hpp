#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "hypsam/core/errors.hpp"
#include "hypsam/core/tensor.hpp"

// Reverse-mode autodiff over a dynamically built DAG. Every op returns a new
// node; backward() walks the graph in reverse topological order. Nodes built
// while grads are globally disabled (or from inputs that need no grad) carry
// no edges, so inference holds no graph.
namespace hypsam::nn {

inline bool& grad_enabled_flag() {
    thread_local bool enabled = true;
    return enabled;
}

struct NoGrad {
    bool prev;
    NoGrad() : prev(grad_enabled_flag()) { grad_enabled_flag() = false; }
    ~NoGrad() { grad_enabled_flag() = prev; }
};

template <class T>
struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node<T>>> inputs;
    // called with (grad of this node, value of this node)
    std::function<void(const Tensor<T>&, const Tensor<T>&)> backward_fn;

    void ensure_grad() {
        if (grad.shape != value.shape) grad = Tensor<T>(value.shape);
    }
    void zero_grad() {
        if (grad.shape == value.shape)
            grad.fill(T(0));
        else
            grad = Tensor<T>(value.shape);
    }
};

template <class T>
using Var = std::shared_ptr<Node<T>>;

template <class T>
Var<T> make_var(Tensor<T> value, bool requires_grad = false) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    return n;
}

template <class T>
Var<T> constant(Tensor<T> value) {
    return make_var(std::move(value), false);
}

namespace detail {

template <class T>
bool any_grad(std::initializer_list<Var<T>> ins) {
    if (!grad_enabled_flag()) return false;
    for (const auto& v : ins)
        if (v && v->requires_grad) return true;
    return false;
}

}  // namespace detail

// Build an op node. fn is only attached when some input needs gradients.
// Null vars (absent optional operands, e.g. bias) are allowed and skipped.
template <class T, class F>
Var<T> op_node(Tensor<T> value, std::initializer_list<Var<T>> ins, F&& fn) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    if (detail::any_grad<T>(ins)) {
        n->requires_grad = true;
        for (const auto& v : ins)
            if (v) n->inputs.push_back(v);
        n->backward_fn = std::forward<F>(fn);
    }
    return n;
}

template <class T>
void accumulate(const Var<T>& v, const Tensor<T>& g) {
    if (!v->requires_grad) return;
    v->ensure_grad();
    T* dst = v->grad.ptr();
    const T* src = g.ptr();
    int64_t n = g.numel();
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) dst[i] += src[i];
}

template <class T>
void backward(const Var<T>& root) {
    if (root->value.numel() != 1) throw Error("backward: root must be scalar");
    // iterative post-order DFS
    std::vector<Node<T>*> topo;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, size_t>> stack;
    stack.push_back({root.get(), 0});
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->inputs.size()) {
            Node<T>* child = node->inputs[idx].get();
            ++idx;
            if (child->requires_grad && !seen.count(child)) {
                seen.insert(child);
                stack.push_back({child, 0});
            }
        } else {
            topo.push_back(node);
            stack.pop_back();
        }
    }
    for (Node<T>* n : topo) n->zero_grad();
    root->grad.fill(T(1));
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        Node<T>* n = *it;
        if (n->backward_fn) n->backward_fn(n->grad, n->value);
    }
}

}  // namespace hypsam::nn
