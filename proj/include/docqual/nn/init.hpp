#pragma once

#include "docqual/nn/tensor.hpp"
#include "docqual/rng.hpp"

#include <cmath>

namespace docqual::nn {

// Glorot/fan-balanced uniform init: U(-limit, limit), limit = sqrt(6/(fan_in+fan_out)).
inline Tensor glorot_uniform(std::vector<int> shape, int fan_in, int fan_out, Rng& rng) {
  double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Tensor t(std::move(shape));
  for (long i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
  return t;
}

inline Tensor uniform_init(std::vector<int> shape, double lo, double hi, Rng& rng) {
  Tensor t(std::move(shape));
  for (long i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace docqual::nn
