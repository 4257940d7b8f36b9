#pragma once

#include "docqual/nn/init.hpp"
#include "docqual/nn/ops.hpp"

#include <string>
#include <vector>

namespace docqual::nn {

// Single-direction LSTM. Gate weights are packed column-wise as [i | f | g | o].
struct LstmCell {
  Param w_in;   // [input_dim, 4H]
  Param w_rec;  // [H, 4H]
  Param bias;   // [1, 4H]
  int hidden = 0;

  LstmCell() = default;

  LstmCell(const std::string& prefix, int input_dim, int hidden_dim, Rng& rng)
      : hidden(hidden_dim) {
    w_in = Param(prefix + ".w_in",
                 glorot_uniform({input_dim, 4 * hidden_dim}, input_dim, hidden_dim, rng));
    w_rec = Param(prefix + ".w_rec",
                  glorot_uniform({hidden_dim, 4 * hidden_dim}, hidden_dim, hidden_dim, rng));
    bias = Param(prefix + ".bias", Tensor::zeros({1, 4 * hidden_dim}));
  }

  struct State {
    Var h;
    Var c;
  };

  State step(Graph& g, Var x, State s) {
    Var z = affine(g, x, g.param(w_in), g.param(bias));
    z = add(g, z, matmul(g, s.h, g.param(w_rec)));
    Var i = sigmoid(g, slice_cols(g, z, 0, hidden));
    Var f = sigmoid(g, slice_cols(g, z, hidden, hidden));
    Var cand = tanh_op(g, slice_cols(g, z, 2 * hidden, hidden));
    Var o = sigmoid(g, slice_cols(g, z, 3 * hidden, hidden));
    Var c = add(g, mul(g, f, s.c), mul(g, i, cand));
    Var h = mul(g, o, tanh_op(g, c));
    return {h, c};
  }

  // Runs the cell over a sequence of [1, input_dim] steps from a zero state.
  // With reverse=true, consumes the sequence backwards and returns the hidden
  // states re-aligned to the input order.
  std::vector<Var> run(Graph& g, const std::vector<Var>& xs, bool reverse = false) {
    State s{g.input(Tensor::zeros({1, hidden})), g.input(Tensor::zeros({1, hidden}))};
    std::vector<Var> hs(xs.size());
    if (!reverse) {
      for (std::size_t t = 0; t < xs.size(); ++t) {
        s = step(g, xs[t], s);
        hs[t] = s.h;
      }
    } else {
      for (std::size_t t = xs.size(); t-- > 0;) {
        s = step(g, xs[t], s);
        hs[t] = s.h;
      }
    }
    return hs;
  }

  std::vector<Param*> params() {
    return {&w_in, &w_rec, &bias};
  }
};

}  // namespace docqual::nn
