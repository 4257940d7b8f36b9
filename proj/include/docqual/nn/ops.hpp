#pragma once

#include "docqual/nn/graph.hpp"

#include <vector>

namespace docqual::nn {

enum class Padding { kValid, kSame };

// Elementwise / linear algebra. Shapes are asserted, matrices are [rows, cols].
Var add(Graph& g, Var a, Var b);
Var add_n(Graph& g, std::vector<Var> xs);
Var sub(Graph& g, Var a, Var b);
Var mul(Graph& g, Var a, Var b);
Var scale(Graph& g, Var a, double c);
Var matmul(Graph& g, Var a, Var b);
Var affine(Graph& g, Var x, Var w, Var b);  // x[m,n] * w[n,k] + b[1,k]

Var sigmoid(Graph& g, Var x);
Var tanh_op(Graph& g, Var x);
Var relu(Graph& g, Var x);

Var softmax_rows(Graph& g, Var x);
// Numerically stable -log softmax(logits)[label]; logits is [1,K].
Var cross_entropy_with_logits(Graph& g, Var logits, int label);

Var concat_cols(Graph& g, std::vector<Var> xs);
Var slice_cols(Graph& g, Var x, int start, int len);
Var stack_rows(Graph& g, std::vector<Var> rows);
Var colwise_max(Graph& g, Var x);  // [m,n] -> [1,n]

// Mean of the table rows given by idx; gradient scatters back into the rows.
Var gather_mean(Graph& g, Var table, const std::vector<int>& idx);

// Inverted dropout; identity when the graph is not in train mode.
Var dropout(Graph& g, Var x, double rate);

// Image ops operate on [H,W,C] tensors; filters are [kh,kw,Cin,Cout].
Var conv2d(Graph& g, Var x, Var w, Var b, int stride_h, int stride_w, Padding pad);
Var maxpool2d(Graph& g, Var x, int kh, int kw, int sh, int sw, Padding pad);
Var avgpool2d(Graph& g, Var x, int kh, int kw, int sh, int sw, Padding pad);
Var global_avg_pool(Graph& g, Var x);  // [H,W,C] -> [1,C]
// Per-channel y = x * scale + shift with scale/shift of shape [1,C].
Var channel_affine(Graph& g, Var x, Var scale_v, Var shift_v);

Var reshape(Graph& g, Var x, std::vector<int> shape);

// Marks a node so gradient is retained/stoppable there (saliency maps).
inline void retain_grad(Var v) { v->needs_grad = true; }

}  // namespace docqual::nn
