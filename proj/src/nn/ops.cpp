#include "docqual/nn/ops.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace docqual::nn {

namespace {

struct PadSpec {
  int out = 0;
  int pad_begin = 0;
};

PadSpec pad_dim(int in, int k, int s, Padding pad) {
  PadSpec p;
  if (pad == Padding::kSame) {
    p.out = (in + s - 1) / s;
    int total = std::max((p.out - 1) * s + k - in, 0);
    p.pad_begin = total / 2;
  } else {
    p.out = (in - k) / s + 1;
    p.pad_begin = 0;
  }
  return p;
}

}  // namespace

Var add(Graph& g, Var a, Var b) {
  assert(a->val.same_shape(b->val));
  Tensor y = a->val.clone();
  y.array() += b->val.array();
  return g.make(std::move(y), {a, b}, [](Node& n) {
    if (n.parents[0]->needs_grad) n.parents[0]->g().array() += n.grad.array();
    if (n.parents[1]->needs_grad) n.parents[1]->g().array() += n.grad.array();
  });
}

Var add_n(Graph& g, std::vector<Var> xs) {
  assert(!xs.empty());
  Tensor y = xs[0]->val.clone();
  for (std::size_t i = 1; i < xs.size(); ++i) y.array() += xs[i]->val.array();
  return g.make(std::move(y), xs, [](Node& n) {
    for (Var p : n.parents)
      if (p->needs_grad) p->g().array() += n.grad.array();
  });
}

Var sub(Graph& g, Var a, Var b) {
  assert(a->val.same_shape(b->val));
  Tensor y = a->val.clone();
  y.array() -= b->val.array();
  return g.make(std::move(y), {a, b}, [](Node& n) {
    if (n.parents[0]->needs_grad) n.parents[0]->g().array() += n.grad.array();
    if (n.parents[1]->needs_grad) n.parents[1]->g().array() -= n.grad.array();
  });
}

Var mul(Graph& g, Var a, Var b) {
  assert(a->val.same_shape(b->val));
  Tensor y = a->val.clone();
  y.array() *= b->val.array();
  return g.make(std::move(y), {a, b}, [](Node& n) {
    if (n.parents[0]->needs_grad)
      n.parents[0]->g().array() += n.grad.array() * n.parents[1]->val.array();
    if (n.parents[1]->needs_grad)
      n.parents[1]->g().array() += n.grad.array() * n.parents[0]->val.array();
  });
}

Var scale(Graph& g, Var a, double c) {
  Tensor y = a->val.clone();
  y.array() *= c;
  return g.make(std::move(y), {a}, [c](Node& n) {
    if (n.parents[0]->needs_grad) n.parents[0]->g().array() += n.grad.array() * c;
  });
}

Var matmul(Graph& g, Var a, Var b) {
  int m = a->val.dim(0), k = a->val.dim(1), n = b->val.dim(1);
  assert(b->val.dim(0) == k);
  Tensor y({m, n});
  y.mat2d().noalias() = a->val.mat2d() * b->val.mat2d();
  return g.make(std::move(y), {a, b}, [m, k, n](Node& nd) {
    auto dy = nd.grad.mat(m, n);
    if (nd.parents[0]->needs_grad)
      nd.parents[0]->g().mat(m, k).noalias() += dy * nd.parents[1]->val.mat(k, n).transpose();
    if (nd.parents[1]->needs_grad)
      nd.parents[1]->g().mat(k, n).noalias() += nd.parents[0]->val.mat(m, k).transpose() * dy;
  });
}

Var affine(Graph& g, Var x, Var w, Var b) {
  int m = x->val.dim(0), n = x->val.dim(1), k = w->val.dim(1);
  assert(w->val.dim(0) == n);
  assert(b->val.size() == k);
  Tensor y({m, k});
  y.mat2d().noalias() = x->val.mat2d() * w->val.mat2d();
  y.mat2d().rowwise() += b->val.mat(1, k).row(0);
  return g.make(std::move(y), {x, w, b}, [m, n, k](Node& nd) {
    auto dy = nd.grad.mat(m, k);
    if (nd.parents[0]->needs_grad)
      nd.parents[0]->g().mat(m, n).noalias() += dy * nd.parents[1]->val.mat(n, k).transpose();
    if (nd.parents[1]->needs_grad)
      nd.parents[1]->g().mat(n, k).noalias() += nd.parents[0]->val.mat(m, n).transpose() * dy;
    if (nd.parents[2]->needs_grad)
      nd.parents[2]->g().mat(1, k).row(0) += dy.colwise().sum();
  });
}

Var sigmoid(Graph& g, Var x) {
  Tensor y = x->val.clone();
  y.array() = 1.0 / (1.0 + (-y.array()).exp());
  Tensor saved = y;
  return g.make(std::move(y), {x}, [saved](Node& n) {
    if (n.parents[0]->needs_grad)
      n.parents[0]->g().array() +=
          n.grad.array() * saved.array() * (1.0 - saved.array());
  });
}

Var tanh_op(Graph& g, Var x) {
  Tensor y = x->val.clone();
  y.array() = y.array().tanh();
  Tensor saved = y;
  return g.make(std::move(y), {x}, [saved](Node& n) {
    if (n.parents[0]->needs_grad)
      n.parents[0]->g().array() += n.grad.array() * (1.0 - saved.array().square());
  });
}

Var relu(Graph& g, Var x) {
  Tensor y = x->val.clone();
  y.array() = y.array().max(0.0);
  Tensor saved = x->val;
  return g.make(std::move(y), {x}, [saved](Node& n) {
    if (n.parents[0]->needs_grad)
      n.parents[0]->g().array() +=
          n.grad.array() * (saved.array() > 0.0).cast<double>();
  });
}

Var softmax_rows(Graph& g, Var x) {
  int m = x->val.dim(0), k = x->val.dim(1);
  Tensor y({m, k});
  for (int i = 0; i < m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) mx = std::max(mx, x->val.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      double e = std::exp(x->val.at(i, j) - mx);
      y.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < k; ++j) y.at(i, j) /= sum;
  }
  Tensor saved = y;
  return g.make(std::move(y), {x}, [saved, m, k](Node& n) {
    if (!n.parents[0]->needs_grad) return;
    for (int i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int j = 0; j < k; ++j) dot += n.grad.at(i, j) * saved.at(i, j);
      for (int j = 0; j < k; ++j)
        n.parents[0]->g().at(i, j) += saved.at(i, j) * (n.grad.at(i, j) - dot);
    }
  });
}

Var cross_entropy_with_logits(Graph& g, Var logits, int label) {
  assert(logits->val.dim(0) == 1);
  int k = logits->val.dim(1);
  assert(label >= 0 && label < k);
  double mx = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) mx = std::max(mx, logits->val.at(0, j));
  double sum = 0.0;
  Tensor probs({1, k});
  for (int j = 0; j < k; ++j) {
    probs.at(0, j) = std::exp(logits->val.at(0, j) - mx);
    sum += probs.at(0, j);
  }
  for (int j = 0; j < k; ++j) probs.at(0, j) /= sum;
  double loss = mx + std::log(sum) - logits->val.at(0, label);
  return g.make(Tensor::scalar(loss), {logits}, [probs, label, k](Node& n) {
    if (!n.parents[0]->needs_grad) return;
    double up = n.grad[0];
    for (int j = 0; j < k; ++j) {
      double d = probs.at(0, j) - (j == label ? 1.0 : 0.0);
      n.parents[0]->g().at(0, j) += up * d;
    }
  });
}

Var concat_cols(Graph& g, std::vector<Var> xs) {
  assert(!xs.empty());
  int m = xs[0]->val.dim(0);
  int total = 0;
  for (Var x : xs) {
    assert(x->val.dim(0) == m);
    total += x->val.dim(1);
  }
  Tensor y({m, total});
  int off = 0;
  for (Var x : xs) {
    int c = x->val.dim(1);
    y.mat2d().middleCols(off, c) = x->val.mat2d();
    off += c;
  }
  return g.make(std::move(y), xs, [m, total](Node& n) {
    int off2 = 0;
    auto dy = n.grad.mat(m, total);
    for (Var p : n.parents) {
      int c = p->val.dim(1);
      if (p->needs_grad) p->g().mat2d() += dy.middleCols(off2, c);
      off2 += c;
    }
  });
}

Var slice_cols(Graph& g, Var x, int start, int len) {
  int m = x->val.dim(0), n = x->val.dim(1);
  assert(start >= 0 && start + len <= n);
  Tensor y({m, len});
  y.mat2d() = x->val.mat2d().middleCols(start, len);
  return g.make(std::move(y), {x}, [m, n, start, len](Node& nd) {
    if (nd.parents[0]->needs_grad)
      nd.parents[0]->g().mat(m, n).middleCols(start, len) += nd.grad.mat(m, len);
  });
}

Var stack_rows(Graph& g, std::vector<Var> rows) {
  assert(!rows.empty());
  int d = rows[0]->val.dim(1);
  int m = static_cast<int>(rows.size());
  Tensor y({m, d});
  for (int i = 0; i < m; ++i) {
    assert(rows[i]->val.dim(0) == 1 && rows[i]->val.dim(1) == d);
    y.mat2d().row(i) = rows[static_cast<std::size_t>(i)]->val.mat2d().row(0);
  }
  return g.make(std::move(y), rows, [m, d](Node& n) {
    auto dy = n.grad.mat(m, d);
    for (int i = 0; i < m; ++i) {
      Var p = n.parents[static_cast<std::size_t>(i)];
      if (p->needs_grad) p->g().mat(1, d).row(0) += dy.row(i);
    }
  });
}

Var colwise_max(Graph& g, Var x) {
  int m = x->val.dim(0), n = x->val.dim(1);
  Tensor y({1, n});
  std::vector<int> arg(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    double best = x->val.at(0, j);
    int bi = 0;
    for (int i = 1; i < m; ++i) {
      if (x->val.at(i, j) > best) {
        best = x->val.at(i, j);
        bi = i;
      }
    }
    y.at(0, j) = best;
    arg[static_cast<std::size_t>(j)] = bi;
  }
  return g.make(std::move(y), {x}, [arg, n](Node& nd) {
    if (!nd.parents[0]->needs_grad) return;
    for (int j = 0; j < n; ++j)
      nd.parents[0]->g().at(arg[static_cast<std::size_t>(j)], j) += nd.grad.at(0, j);
  });
}

Var gather_mean(Graph& g, Var table, const std::vector<int>& idx) {
  assert(!idx.empty());
  int d = table->val.dim(1);
  Tensor y({1, d});
  for (int i : idx) y.mat2d().row(0) += table->val.mat2d().row(i);
  y.array() /= static_cast<double>(idx.size());
  return g.make(std::move(y), {table}, [idx, d](Node& n) {
    if (!n.parents[0]->needs_grad) return;
    double inv = 1.0 / static_cast<double>(idx.size());
    auto dy = n.grad.mat(1, d);
    for (int i : idx) n.parents[0]->g().mat2d().row(i) += dy.row(0) * inv;
  });
}

Var dropout(Graph& g, Var x, double rate) {
  if (!g.train_mode() || rate <= 0.0) return x;
  assert(g.has_rng());
  double keep = 1.0 - rate;
  Tensor mask(x->val.shape());
  for (long i = 0; i < mask.size(); ++i)
    mask[i] = g.rng().uniform() < keep ? 1.0 / keep : 0.0;
  Tensor y = x->val.clone();
  y.array() *= mask.array();
  return g.make(std::move(y), {x}, [mask](Node& n) {
    if (n.parents[0]->needs_grad)
      n.parents[0]->g().array() += n.grad.array() * mask.array();
  });
}

Var conv2d(Graph& g, Var x, Var w, Var b, int stride_h, int stride_w, Padding pad) {
  int h = x->val.dim(0), wd = x->val.dim(1), c = x->val.dim(2);
  int kh = w->val.dim(0), kw = w->val.dim(1), co = w->val.dim(3);
  assert(w->val.dim(2) == c);
  PadSpec ph = pad_dim(h, kh, stride_h, pad);
  PadSpec pw = pad_dim(wd, kw, stride_w, pad);
  int oh = ph.out, ow = pw.out;
  long rows = static_cast<long>(oh) * ow;
  long cols = static_cast<long>(kh) * kw * c;

  Tensor col({static_cast<int>(rows), static_cast<int>(cols)});
  double* cp = col.data();
  const double* xp = x->val.data();
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      long r = (static_cast<long>(oy) * ow + ox) * cols;
      int iy0 = oy * stride_h - ph.pad_begin;
      int ix0 = ox * stride_w - pw.pad_begin;
      for (int ky = 0; ky < kh; ++ky) {
        int iy = iy0 + ky;
        long dst = r + static_cast<long>(ky) * kw * c;
        if (iy < 0 || iy >= h) {
          std::fill(cp + dst, cp + dst + static_cast<long>(kw) * c, 0.0);
          continue;
        }
        for (int kx = 0; kx < kw; ++kx) {
          int ix = ix0 + kx;
          if (ix < 0 || ix >= wd) {
            std::fill(cp + dst, cp + dst + c, 0.0);
          } else {
            const double* src = xp + (static_cast<long>(iy) * wd + ix) * c;
            std::copy(src, src + c, cp + dst);
          }
          dst += c;
        }
      }
    }
  }

  Tensor y({oh, ow, co});
  {
    auto ym = y.mat(static_cast<int>(rows), co);
    ym.noalias() = col.mat(static_cast<int>(rows), static_cast<int>(cols)) *
                   w->val.mat(static_cast<int>(cols), co);
    if (b != nullptr) ym.rowwise() += b->val.mat(1, co).row(0);
  }

  std::vector<Var> parents{x, w};
  if (b != nullptr) parents.push_back(b);
  bool needs = false;
  for (Var p : parents) needs |= p->needs_grad;
  // The patch matrix is only retained when gradients will flow.
  Tensor saved_col = needs ? col : Tensor();

  auto bw = [saved_col, h, wd, c, kh, kw, co, oh, ow, stride_h, stride_w, ph, pw,
             rows, cols](Node& n) {
    auto dy = n.grad.mat(static_cast<int>(rows), co);
    Var xv = n.parents[0];
    Var wv = n.parents[1];
    if (wv->needs_grad)
      wv->g().mat(static_cast<int>(cols), co).noalias() +=
          saved_col.mat(static_cast<int>(rows), static_cast<int>(cols)).transpose() * dy;
    if (n.parents.size() > 2 && n.parents[2]->needs_grad)
      n.parents[2]->g().mat(1, co).row(0) += dy.colwise().sum();
    if (xv->needs_grad) {
      Tensor dcol({static_cast<int>(rows), static_cast<int>(cols)});
      dcol.mat2d().noalias() = dy * wv->val.mat(static_cast<int>(cols), co).transpose();
      double* gp = xv->g().data();
      const double* dp = dcol.data();
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          long r = (static_cast<long>(oy) * ow + ox) * cols;
          int iy0 = oy * stride_h - ph.pad_begin;
          int ix0 = ox * stride_w - pw.pad_begin;
          for (int ky = 0; ky < kh; ++ky) {
            int iy = iy0 + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kw; ++kx) {
              int ix = ix0 + kx;
              if (ix < 0 || ix >= wd) continue;
              double* dst = gp + (static_cast<long>(iy) * wd + ix) * c;
              const double* src = dp + r + (static_cast<long>(ky) * kw + kx) * c;
              for (int ci = 0; ci < c; ++ci) dst[ci] += src[ci];
            }
          }
        }
      }
    }
  };
  return g.make(std::move(y), std::move(parents), std::move(bw));
}

Var maxpool2d(Graph& g, Var x, int kh, int kw, int sh, int sw, Padding pad) {
  int h = x->val.dim(0), wd = x->val.dim(1), c = x->val.dim(2);
  PadSpec ph = pad_dim(h, kh, sh, pad);
  PadSpec pw = pad_dim(wd, kw, sw, pad);
  int oh = ph.out, ow = pw.out;
  Tensor y({oh, ow, c});
  std::vector<long> arg(static_cast<std::size_t>(oh) * ow * c, -1);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int ci = 0; ci < c; ++ci) {
        double best = -std::numeric_limits<double>::infinity();
        long bi = -1;
        for (int ky = 0; ky < kh; ++ky) {
          int iy = oy * sh - ph.pad_begin + ky;
          if (iy < 0 || iy >= h) continue;
          for (int kx = 0; kx < kw; ++kx) {
            int ix = ox * sw - pw.pad_begin + kx;
            if (ix < 0 || ix >= wd) continue;
            double v = x->val.at3(iy, ix, ci);
            if (v > best) {
              best = v;
              bi = (static_cast<long>(iy) * wd + ix) * c + ci;
            }
          }
        }
        y.at3(oy, ox, ci) = best;
        arg[(static_cast<std::size_t>(oy) * ow + ox) * c + ci] = bi;
      }
    }
  }
  return g.make(std::move(y), {x}, [arg](Node& n) {
    if (!n.parents[0]->needs_grad) return;
    double* gp = n.parents[0]->g().data();
    const double* dy = n.grad.data();
    for (std::size_t i = 0; i < arg.size(); ++i)
      if (arg[i] >= 0) gp[arg[i]] += dy[static_cast<long>(i)];
  });
}

Var avgpool2d(Graph& g, Var x, int kh, int kw, int sh, int sw, Padding pad) {
  int h = x->val.dim(0), wd = x->val.dim(1), c = x->val.dim(2);
  PadSpec ph = pad_dim(h, kh, sh, pad);
  PadSpec pw = pad_dim(wd, kw, sw, pad);
  int oh = ph.out, ow = pw.out;
  Tensor y({oh, ow, c});
  // Padding cells are excluded from the divisor.
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      int y0 = std::max(oy * sh - ph.pad_begin, 0);
      int y1 = std::min(oy * sh - ph.pad_begin + kh, h);
      int x0 = std::max(ox * sw - pw.pad_begin, 0);
      int x1 = std::min(ox * sw - pw.pad_begin + kw, wd);
      double inv = 1.0 / (static_cast<double>(y1 - y0) * (x1 - x0));
      for (int ci = 0; ci < c; ++ci) {
        double s = 0.0;
        for (int iy = y0; iy < y1; ++iy)
          for (int ix = x0; ix < x1; ++ix) s += x->val.at3(iy, ix, ci);
        y.at3(oy, ox, ci) = s * inv;
      }
    }
  }
  return g.make(std::move(y), {x},
                [h, wd, c, kh, kw, sh, sw, ph, pw, oh, ow](Node& n) {
    if (!n.parents[0]->needs_grad) return;
    Tensor& gx = n.parents[0]->g();
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        int y0 = std::max(oy * sh - ph.pad_begin, 0);
        int y1 = std::min(oy * sh - ph.pad_begin + kh, h);
        int x0 = std::max(ox * sw - pw.pad_begin, 0);
        int x1 = std::min(ox * sw - pw.pad_begin + kw, wd);
        double inv = 1.0 / (static_cast<double>(y1 - y0) * (x1 - x0));
        for (int ci = 0; ci < c; ++ci) {
          double d = n.grad.at3(oy, ox, ci) * inv;
          for (int iy = y0; iy < y1; ++iy)
            for (int ix = x0; ix < x1; ++ix) gx.at3(iy, ix, ci) += d;
        }
      }
    }
  });
}

Var global_avg_pool(Graph& g, Var x) {
  int h = x->val.dim(0), wd = x->val.dim(1), c = x->val.dim(2);
  Tensor y({1, c});
  const double* xp = x->val.data();
  long hw = static_cast<long>(h) * wd;
  for (long i = 0; i < hw; ++i)
    for (int ci = 0; ci < c; ++ci) y[ci] += xp[i * c + ci];
  y.array() /= static_cast<double>(hw);
  return g.make(std::move(y), {x}, [hw, c](Node& n) {
    if (!n.parents[0]->needs_grad) return;
    double inv = 1.0 / static_cast<double>(hw);
    double* gp = n.parents[0]->g().data();
    for (long i = 0; i < hw; ++i)
      for (int ci = 0; ci < c; ++ci) gp[i * c + ci] += n.grad[ci] * inv;
  });
}

Var channel_affine(Graph& g, Var x, Var scale_v, Var shift_v) {
  int h = x->val.dim(0), wd = x->val.dim(1), c = x->val.dim(2);
  assert(scale_v->val.size() == c && shift_v->val.size() == c);
  Tensor y(x->val.shape());
  const double* xp = x->val.data();
  const double* sp = scale_v->val.data();
  const double* tp = shift_v->val.data();
  double* yp = y.data();
  long hw = static_cast<long>(h) * wd;
  for (long i = 0; i < hw; ++i)
    for (int ci = 0; ci < c; ++ci) yp[i * c + ci] = xp[i * c + ci] * sp[ci] + tp[ci];
  return g.make(std::move(y), {x, scale_v, shift_v}, [hw, c](Node& n) {
    const double* dy = n.grad.data();
    Var xv = n.parents[0];
    if (xv->needs_grad) {
      double* gp = xv->g().data();
      const double* sp = n.parents[1]->val.data();
      for (long i = 0; i < hw; ++i)
        for (int ci = 0; ci < c; ++ci) gp[i * c + ci] += dy[i * c + ci] * sp[ci];
    }
    if (n.parents[1]->needs_grad) {
      double* gs = n.parents[1]->g().data();
      const double* xp2 = xv->val.data();
      for (long i = 0; i < hw; ++i)
        for (int ci = 0; ci < c; ++ci) gs[ci] += dy[i * c + ci] * xp2[i * c + ci];
    }
    if (n.parents[2]->needs_grad) {
      double* gt = n.parents[2]->g().data();
      for (long i = 0; i < hw; ++i)
        for (int ci = 0; ci < c; ++ci) gt[ci] += dy[i * c + ci];
    }
  });
}

Var reshape(Graph& g, Var x, std::vector<int> shape) {
  Tensor y = x->val.reshaped(shape);
  // Shares storage; gradient is reshaped back on the way down.
  return g.make(std::move(y), {x}, [](Node& n) {
    if (n.parents[0]->needs_grad)
      n.parents[0]->g().array() += n.grad.array();
  });
}

}  // namespace docqual::nn
