#pragma once

#include "docqual/nn/graph.hpp"

#include <cmath>
#include <vector>

namespace docqual::nn {

// Adam with the standard defaults (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam {
 public:
  Adam(std::vector<Param*> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (Param* p : params_) {
      slots_.push_back({Tensor::zeros(p->value.shape()), Tensor::zeros(p->value.shape())});
    }
  }

  void zero_grad() {
    for (Param* p : params_) p->zero_grad();
  }

  void step() {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Param* p = params_[i];
      if (!p->trainable) continue;
      auto& m = slots_[i].m.array();
      auto& v = slots_[i].v.array();
      const auto& grad = p->grad.array();
      m = beta1_ * m + (1.0 - beta1_) * grad;
      v = beta2_ * v + (1.0 - beta2_) * grad.square();
      p->value.array() -= lr_ * (m / bc1) / ((v / bc2).sqrt() + eps_);
    }
  }

  double lr() const { return lr_; }

 private:
  struct Slot {
    Tensor m, v;
  };
  std::vector<Param*> params_;
  std::vector<Slot> slots_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
};

}  // namespace docqual::nn
