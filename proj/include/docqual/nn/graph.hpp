#pragma once

#include "docqual/nn/tensor.hpp"
#include "docqual/rng.hpp"

#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace docqual::nn {

// Named trainable tensor. Gradients accumulate across every graph the
// parameter participates in until zero_grad() is called.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
    grad = Tensor::zeros(value.shape());
  }

  void zero_grad() { grad.array().setZero(); }
  long size() const { return value.size(); }
};

class Graph;

struct Node {
  Tensor val;
  Tensor grad;  // allocated on demand during backward
  bool needs_grad = false;
  Param* bound = nullptr;  // set for parameter leaves
  std::vector<Node*> parents;
  std::function<void(Node&)> backward;  // adds into parents' grads

  Tensor& g() {
    if (grad.empty()) grad = Tensor::zeros(val.shape());
    return grad;
  }
};

using Var = Node*;

// Define-by-run tape. Creation order is a topological order, so backward is
// a single reverse sweep. One graph per forward pass (or per batch).
class Graph {
 public:
  explicit Graph(bool train_mode = false, Rng* rng = nullptr)
      : train_mode_(train_mode), rng_(rng) {}

  bool train_mode() const { return train_mode_; }
  Rng& rng() { return *rng_; }
  bool has_rng() const { return rng_ != nullptr; }

  // Constant leaf (no gradient).
  Var input(Tensor v) {
    Node& n = alloc();
    n.val = std::move(v);
    n.needs_grad = false;
    return &n;
  }

  // Parameter leaf; one node per Param per graph. The node's gradient buffer
  // aliases the Param's, so backward writes accumulate there directly.
  Var param(Param& p) {
    auto it = param_nodes_.find(&p);
    if (it != param_nodes_.end()) return it->second;
    Node& n = alloc();
    n.val = p.value;
    n.needs_grad = p.trainable;
    n.bound = &p;
    if (p.trainable) {
      if (p.grad.empty()) p.grad = Tensor::zeros(p.value.shape());
      n.grad = p.grad;
    }
    param_nodes_[&p] = &n;
    return &n;
  }

  Var make(Tensor val, std::vector<Var> parents, std::function<void(Node&)> bw) {
    Node& n = alloc();
    n.val = std::move(val);
    n.parents = std::move(parents);
    for (Var p : n.parents)
      if (p->needs_grad) n.needs_grad = true;
    if (n.needs_grad) n.backward = std::move(bw);
    return &n;
  }

  // Reverse-mode sweep from a scalar root.
  void backward(Var root) {
    root->g().array().setConstant(1.0);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      Node* n = *it;
      if (n->needs_grad && n->backward && !n->grad.empty()) n->backward(*n);
    }
  }

  std::size_t node_count() const { return order_.size(); }

 private:
  Node& alloc() {
    arena_.emplace_back();
    order_.push_back(&arena_.back());
    return arena_.back();
  }

  std::deque<Node> arena_;
  std::vector<Node*> order_;
  std::unordered_map<Param*, Node*> param_nodes_;
  bool train_mode_;
  Rng* rng_;
};

}  // namespace docqual::nn
