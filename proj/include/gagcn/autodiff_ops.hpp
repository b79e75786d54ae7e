// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "gagcn/tape.hpp"
#include "gagcn/tensor_ops.hpp"

// Differentiable operations recorded on a Tape. Each op validates shapes via
// the underlying tensor op, stores the forward value, and registers a closure
// that routes the output gradient to its inputs.

namespace gagcn::ad {

namespace detail {
template <class T>
inline Tape<T>& same_tape(Var<T> a, Var<T> b) {
  if (a.tape != b.tape) throw ContractError("operands recorded on different tapes");
  return *a.tape;
}
}  // namespace detail

template <class T>
Var<T> add(Var<T> a, Var<T> b) {
  Tape<T>& tp = detail::same_tape(a, b);
  const Tensor<T>& av = tp.value(a.id);
  const Tensor<T>& bv = tp.value(b.id);
  if (!av.same_shape(bv)) {
    throw ShapeError("add: shapes differ: " + av.shape_str() + " vs " + bv.shape_str());
  }
  Tensor<T> out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return tp.record(std::move(out), [aid = a.id, bid = b.id](Tape<T>& t, int self) {
    const Tensor<T>& g = t.grad(self);
    Tensor<T>& ga = t.grad(aid);
    Tensor<T>& gb = t.grad(bid);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
  });
}

template <class T>
Var<T> scale(Var<T> a, T s) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out = tp.value(a.id);
  kern::scale(out.size(), s, out.data());
  return tp.record(std::move(out), [aid = a.id, s](Tape<T>& t, int self) {
    const Tensor<T>& g = t.grad(self);
    kern::axpy(g.size(), s, g.data(), t.grad(aid).data());
  });
}

template <class T>
Var<T> sum_all(Var<T> a) {
  Tape<T>& tp = *a.tape;
  const Tensor<T>& av = tp.value(a.id);
  Tensor<T> out({1});
  out[0] = kern::sum(av.data(), av.size());
  return tp.record(std::move(out), [aid = a.id](Tape<T>& t, int self) {
    const T g0 = t.grad(self)[0];
    Tensor<T>& ga = t.grad(aid);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g0;
  });
}

/// Scalar element of a tensor (flat index).
template <class T>
Var<T> pick(Var<T> a, std::size_t index) {
  Tape<T>& tp = *a.tape;
  const Tensor<T>& av = tp.value(a.id);
  if (index >= av.size()) throw ShapeError("pick: index out of range");
  Tensor<T> out({1});
  out[0] = av[index];
  return tp.record(std::move(out), [aid = a.id, index](Tape<T>& t, int self) {
    t.grad(aid)[index] += t.grad(self)[0];
  });
}

template <class T>
Var<T> matmul(Var<T> a, Var<T> b) {
  Tape<T>& tp = detail::same_tape(a, b);
  Tensor<T> out = gagcn::matmul(tp.value(a.id), tp.value(b.id));
  return tp.record(std::move(out), [aid = a.id, bid = b.id](Tape<T>& t, int self) {
    const Tensor<T>& A = t.value(aid);
    const Tensor<T>& B = t.value(bid);
    const Tensor<T>& G = t.grad(self);
    const int m = A.extent(0), k = A.extent(1), n = B.extent(1);
    // dA += G * B^T, dB += A^T * G
    matmul_nt_acc(G.data(), B.data(), t.grad(aid).data(), m, n, k);
    matmul_tn_acc(A.data(), G.data(), t.grad(bid).data(), k, m, n);
  });
}

template <class T>
Var<T> softmax(Var<T> x) {
  Tape<T>& tp = *x.tape;
  Tensor<T> y = gagcn::softmax(tp.value(x.id));
  return tp.record(std::move(y), [xid = x.id](Tape<T>& t, int self) {
    const Tensor<T>& y = t.value(self);
    const Tensor<T>& g = t.grad(self);
    Tensor<T>& gx = t.grad(xid);
    const T dot = kern::dot(g.data(), y.data(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (g[i] - dot);
  });
}

template <class T>
Var<T> kron(Var<T> a, Var<T> b) {
  Tape<T>& tp = detail::same_tape(a, b);
  Tensor<T> out = gagcn::kronecker(tp.value(a.id), tp.value(b.id));
  return tp.record(std::move(out), [aid = a.id, bid = b.id](Tape<T>& t, int self) {
    const Tensor<T>& A = t.value(aid);
    const Tensor<T>& B = t.value(bid);
    const Tensor<T>& G = t.grad(self);
    Tensor<T>& ga = t.grad(aid);
    Tensor<T>& gb = t.grad(bid);
    const int p = A.extent(0), q = A.extent(1), r = B.extent(0), s = B.extent(1);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < q; ++j) {
        T acc = T(0);
        for (int u = 0; u < r; ++u) {
          for (int v = 0; v < s; ++v) {
            const T guv = G.at(i * r + u, j * s + v);
            acc += guv * B.at(u, v);
            gb.at(u, v) += guv * A.at(i, j);
          }
        }
        ga.at(i, j) += acc;
      }
    }
  });
}

template <class T>
Var<T> act(Var<T> x, Activation kind) {
  Tape<T>& tp = *x.tape;
  Tensor<T> y = gagcn::activation(tp.value(x.id), kind);
  return tp.record(std::move(y), [xid = x.id, kind](Tape<T>& t, int self) {
    const Tensor<T>& y = t.value(self);
    const Tensor<T>& g = t.grad(self);
    Tensor<T>& gx = t.grad(xid);
    switch (kind) {
      case Activation::tanh:
        for (std::size_t i = 0; i < y.size(); ++i) gx[i] += (T(1) - y[i] * y[i]) * g[i];
        break;
      case Activation::relu: {
        const Tensor<T>& x = t.value(xid);
        for (std::size_t i = 0; i < y.size(); ++i) gx[i] += (x[i] > T(0) ? g[i] : T(0));
        break;
      }
      case Activation::identity:
        for (std::size_t i = 0; i < y.size(); ++i) gx[i] += g[i];
        break;
    }
  });
}

/// Mean over joint and frame axes of [w x N x T] -> [w].
template <class T>
Var<T> pool_nt(Var<T> h) {
  Tape<T>& tp = *h.tape;
  const Tensor<T>& hv = tp.value(h.id);
  if (hv.rank() != 3) throw ShapeError("pool_nt: expected 3-D features, got " + hv.shape_str());
  const int w = hv.extent(0);
  const std::size_t plane = static_cast<std::size_t>(hv.extent(1)) * hv.extent(2);
  Tensor<T> out({w});
  for (int c = 0; c < w; ++c) {
    out[static_cast<std::size_t>(c)] =
        kern::sum(hv.data() + c * plane, plane) / static_cast<T>(plane);
  }
  return tp.record(std::move(out), [hid = h.id, w, plane](Tape<T>& t, int self) {
    const Tensor<T>& g = t.grad(self);
    Tensor<T>& gh = t.grad(hid);
    for (int c = 0; c < w; ++c) {
      const T gc = g[static_cast<std::size_t>(c)] / static_cast<T>(plane);
      T* dst = gh.data() + c * plane;
      for (std::size_t i = 0; i < plane; ++i) dst[i] += gc;
    }
  });
}

/// Vector affine map: out = x^T W + b with x [k], W [k x o], b [o].
template <class T>
Var<T> affine_vec(Var<T> x, Var<T> w, Var<T> b) {
  Tape<T>& tp = detail::same_tape(x, w);
  detail::same_tape(x, b);
  const Tensor<T>& xv = tp.value(x.id);
  const Tensor<T>& wv = tp.value(w.id);
  const Tensor<T>& bv = tp.value(b.id);
  if (xv.rank() != 1 || wv.rank() != 2 || bv.rank() != 1 ||
      wv.extent(0) != static_cast<int>(xv.size()) || wv.extent(1) != static_cast<int>(bv.size())) {
    throw ShapeError("affine_vec: incompatible shapes " + xv.shape_str() + ", " + wv.shape_str() +
                     ", " + bv.shape_str());
  }
  const int k = wv.extent(0), o = wv.extent(1);
  Tensor<T> out = bv;
  for (int i = 0; i < k; ++i) {
    kern::axpy<T>(static_cast<std::size_t>(o), xv[static_cast<std::size_t>(i)],
                  wv.data() + static_cast<std::size_t>(i) * o, out.data());
  }
  return tp.record(std::move(out),
                   [xid = x.id, wid = w.id, bid = b.id, k, o](Tape<T>& t, int self) {
                     const Tensor<T>& g = t.grad(self);
                     const Tensor<T>& xv = t.value(xid);
                     const Tensor<T>& wv = t.value(wid);
                     Tensor<T>& gx = t.grad(xid);
                     Tensor<T>& gw = t.grad(wid);
                     Tensor<T>& gb = t.grad(bid);
                     for (int i = 0; i < k; ++i) {
                       gx[static_cast<std::size_t>(i)] +=
                           kern::dot<T>(g.data(), wv.data() + static_cast<std::size_t>(i) * o,
                                        static_cast<std::size_t>(o));
                       kern::axpy<T>(static_cast<std::size_t>(o), xv[static_cast<std::size_t>(i)],
                                     g.data(), gw.data() + static_cast<std::size_t>(i) * o);
                     }
                     for (int j = 0; j < o; ++j) gb[static_cast<std::size_t>(j)] += g[static_cast<std::size_t>(j)];
                   });
}

/// Feature transformation along the channel axis: h [w x N x T], W [w x w']
/// -> out[c',n,t] = sum_c W[c,c'] h[c,n,t].
template <class T>
Var<T> channel_map(Var<T> h, Var<T> w) {
  Tape<T>& tp = detail::same_tape(h, w);
  const Tensor<T>& hv = tp.value(h.id);
  const Tensor<T>& wv = tp.value(w.id);
  if (hv.rank() != 3 || wv.rank() != 2 || wv.extent(0) != hv.extent(0)) {
    throw ShapeError("channel_map: incompatible shapes " + hv.shape_str() + " and " +
                     wv.shape_str());
  }
  const int win = hv.extent(0), wout = wv.extent(1);
  const int joints = hv.extent(1), frames = hv.extent(2);
  const std::size_t plane = static_cast<std::size_t>(joints) * frames;
  Tensor<T> out({wout, joints, frames});
  // out_mat = W^T * h_mat with h_mat [win x plane]
  matmul_tn_acc(wv.data(), hv.data(), out.data(), wout, win, static_cast<int>(plane));
  return tp.record(std::move(out), [hid = h.id, wid = w.id, win, wout, plane](Tape<T>& t,
                                                                              int self) {
    const Tensor<T>& g = t.grad(self);
    const Tensor<T>& hv = t.value(hid);
    const Tensor<T>& wv = t.value(wid);
    Tensor<T>& gh = t.grad(hid);
    Tensor<T>& gw = t.grad(wid);
    // gW[c,c'] += dot(h[c,:], g[c',:]); gh[c,:] += sum_c' W[c,c'] g[c',:]
    for (int c = 0; c < win; ++c) {
      for (int cp = 0; cp < wout; ++cp) {
        gw.at(c, cp) += kern::dot<T>(hv.data() + c * plane, g.data() + cp * plane, plane);
        kern::axpy<T>(plane, wv.at(c, cp), g.data() + cp * plane, gh.data() + c * plane);
      }
    }
  });
}

/// Broadcast per-channel bias: h [w x N x T] + b [w].
template <class T>
Var<T> channel_bias(Var<T> h, Var<T> b) {
  Tape<T>& tp = detail::same_tape(h, b);
  const Tensor<T>& hv = tp.value(h.id);
  const Tensor<T>& bv = tp.value(b.id);
  if (hv.rank() != 3 || bv.rank() != 1 || bv.extent(0) != hv.extent(0)) {
    throw ShapeError("channel_bias: incompatible shapes " + hv.shape_str() + " and " +
                     bv.shape_str());
  }
  const int w = hv.extent(0);
  const std::size_t plane = static_cast<std::size_t>(hv.extent(1)) * hv.extent(2);
  Tensor<T> out = hv;
  for (int c = 0; c < w; ++c) {
    T* dst = out.data() + c * plane;
    const T bc = bv[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < plane; ++i) dst[i] += bc;
  }
  return tp.record(std::move(out), [hid = h.id, bid = b.id, w, plane](Tape<T>& t, int self) {
    const Tensor<T>& g = t.grad(self);
    Tensor<T>& gh = t.grad(hid);
    Tensor<T>& gb = t.grad(bid);
    for (std::size_t i = 0; i < g.size(); ++i) gh[i] += g[i];
    for (int c = 0; c < w; ++c) {
      gb[static_cast<std::size_t>(c)] += kern::sum(g.data() + c * plane, plane);
    }
  });
}

/// out[c] = as * h[c] * at^T per channel; the Kronecker-fused update without
/// materializing the (N*T) x (N*T) operator.
template <class T>
Var<T> st_apply(Var<T> as, Var<T> at, Var<T> h) {
  Tape<T>& tp = detail::same_tape(as, at);
  detail::same_tape(as, h);
  Tensor<T> out = st_apply_eval(tp.value(as.id), tp.value(at.id), tp.value(h.id));
  return tp.record(std::move(out), [aid = as.id, tid = at.id, hid = h.id](Tape<T>& t, int self) {
    const Tensor<T>& As = t.value(aid);
    const Tensor<T>& At = t.value(tid);
    const Tensor<T>& H = t.value(hid);
    const Tensor<T>& G = t.grad(self);
    Tensor<T>& gAs = t.grad(aid);
    Tensor<T>& gAt = t.grad(tid);
    Tensor<T>& gH = t.grad(hid);
    const int w = H.extent(0), joints = H.extent(1), frames = H.extent(2);
    const std::size_t plane = static_cast<std::size_t>(joints) * frames;
    Tensor<T> ga({joints, frames});   // G_c * At
    Tensor<T> xbt({joints, frames});  // H_c * At^T
    Tensor<T> ax({joints, frames});   // As * H_c
    for (int c = 0; c < w; ++c) {
      const T* gc = G.data() + c * plane;
      const T* hc = H.data() + c * plane;
      // dAs += G_c * At * H_c^T = (G_c * At) * H_c^T
      ga.fill(T(0));
      matmul_nn_acc(gc, At.data(), ga.data(), joints, frames, frames);
      matmul_nt_acc(ga.data(), hc, gAs.data(), joints, frames, joints);
      // dAt += G_c^T * (As * H_c)
      ax.fill(T(0));
      matmul_nn_acc(As.data(), hc, ax.data(), joints, joints, frames);
      matmul_tn_acc(gc, ax.data(), gAt.data(), frames, joints, frames);
      // dH_c += As^T * G_c * At = As^T * (G_c * At)
      matmul_tn_acc(As.data(), ga.data(), gH.data() + c * plane, joints, joints, frames);
    }
  });
}

/// Convex blend of candidate matrices: out = sum_i w[i] * cand[i].
template <class T>
Var<T> blend(const std::vector<Var<T>>& candidates, Var<T> w) {
  if (candidates.empty()) throw ConfigError("blend: empty candidate set");
  Tape<T>& tp = *w.tape;
  const Tensor<T>& wv = tp.value(w.id);
  if (wv.rank() != 1 || static_cast<std::size_t>(wv.extent(0)) != candidates.size()) {
    throw ConfigError("blend: coefficient count " + wv.shape_str() + " does not match " +
                      std::to_string(candidates.size()) + " candidates");
  }
  const Tensor<T>& first = tp.value(candidates[0].id);
  Tensor<T> out(first.shape());
  std::vector<int> cand_ids;
  cand_ids.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    detail::same_tape(candidates[i], w);
    const Tensor<T>& ci = tp.value(candidates[i].id);
    if (!ci.same_shape(first)) {
      throw ShapeError("blend: candidate shapes differ: " + first.shape_str() + " vs " +
                       ci.shape_str());
    }
    kern::axpy(out.size(), wv[i], ci.data(), out.data());
    cand_ids.push_back(candidates[i].id);
  }
  return tp.record(std::move(out), [cand_ids, wid = w.id](Tape<T>& t, int self) {
    const Tensor<T>& g = t.grad(self);
    const Tensor<T>& wv = t.value(wid);
    Tensor<T>& gw = t.grad(wid);
    for (std::size_t i = 0; i < cand_ids.size(); ++i) {
      const Tensor<T>& ci = t.value(cand_ids[i]);
      kern::axpy(g.size(), wv[i], g.data(), t.grad(cand_ids[i]).data());
      gw[i] += kern::dot(ci.data(), g.data(), g.size());
    }
  });
}

/// Causal dilated 1-D convolution along the frame axis, per joint:
/// out[o,n,t] = b[o] + sum_{i,kk} K[o,i,kk] * z[i,n,t-kk*dilation].
template <class T>
Var<T> causal_conv1d(Var<T> z, Var<T> kernel, Var<T> bias, int dilation) {
  Tape<T>& tp = detail::same_tape(z, kernel);
  detail::same_tape(z, bias);
  const Tensor<T>& zv = tp.value(z.id);
  const Tensor<T>& kv = tp.value(kernel.id);
  const Tensor<T>& bv = tp.value(bias.id);
  if (zv.rank() != 3 || kv.rank() != 3 || kv.extent(1) != zv.extent(0) || bv.rank() != 1 ||
      bv.extent(0) != kv.extent(0)) {
    throw ShapeError("causal_conv1d: incompatible shapes " + zv.shape_str() + ", " +
                     kv.shape_str() + ", " + bv.shape_str());
  }
  if (dilation < 1) throw ConfigError("causal_conv1d: dilation must be >= 1");
  const int wout = kv.extent(0), win = kv.extent(1), ksize = kv.extent(2);
  const int joints = zv.extent(1), frames = zv.extent(2);
  Tensor<T> out({wout, joints, frames});
  for (int o = 0; o < wout; ++o) {
    const T bo = bv[static_cast<std::size_t>(o)];
    T* oc = out.data() + static_cast<std::size_t>(o) * joints * frames;
    for (std::size_t i = 0; i < static_cast<std::size_t>(joints) * frames; ++i) oc[i] = bo;
    for (int i = 0; i < win; ++i) {
      const T* zc = zv.data() + static_cast<std::size_t>(i) * joints * frames;
      for (int kk = 0; kk < ksize; ++kk) {
        const int shift = kk * dilation;
        if (shift >= frames) continue;
        const T kval = kv.at(o, i, kk);
        for (int n = 0; n < joints; ++n) {
          kern::axpy<T>(static_cast<std::size_t>(frames - shift), kval,
                        zc + static_cast<std::size_t>(n) * frames,
                        oc + static_cast<std::size_t>(n) * frames + shift);
        }
      }
    }
  }
  return tp.record(
      std::move(out), [zid = z.id, kid = kernel.id, bid = bias.id, dilation](Tape<T>& t, int self) {
        const Tensor<T>& zv = t.value(zid);
        const Tensor<T>& kv = t.value(kid);
        const Tensor<T>& g = t.grad(self);
        Tensor<T>& gz = t.grad(zid);
        Tensor<T>& gk = t.grad(kid);
        Tensor<T>& gb = t.grad(bid);
        const int wout = kv.extent(0), win = kv.extent(1), ksize = kv.extent(2);
        const int joints = zv.extent(1), frames = zv.extent(2);
        const std::size_t plane = static_cast<std::size_t>(joints) * frames;
        for (int o = 0; o < wout; ++o) {
          const T* gc = g.data() + o * plane;
          gb[static_cast<std::size_t>(o)] += kern::sum(gc, plane);
          for (int i = 0; i < win; ++i) {
            const T* zc = zv.data() + i * plane;
            T* gzc = gz.data() + i * plane;
            for (int kk = 0; kk < ksize; ++kk) {
              const int shift = kk * dilation;
              if (shift >= frames) continue;
              const T kval = kv.at(o, i, kk);
              T acc = T(0);
              for (int n = 0; n < joints; ++n) {
                const std::size_t zoff = static_cast<std::size_t>(n) * frames;
                const std::size_t goff = zoff + static_cast<std::size_t>(shift);
                acc += kern::dot<T>(gc + goff, zc + zoff, static_cast<std::size_t>(frames - shift));
                kern::axpy<T>(static_cast<std::size_t>(frames - shift), kval, gc + goff,
                              gzc + zoff);
              }
              gk.at(o, i, kk) += acc;
            }
          }
        }
      });
}

/// Affine map along the frame axis: z [w x N x T], E [T x t], b [t]
/// -> out[c,n,tau] = b[tau] + sum_t z[c,n,t] E[t,tau].
template <class T>
Var<T> time_map(Var<T> z, Var<T> e, Var<T> b) {
  Tape<T>& tp = detail::same_tape(z, e);
  detail::same_tape(z, b);
  const Tensor<T>& zv = tp.value(z.id);
  const Tensor<T>& ev = tp.value(e.id);
  const Tensor<T>& bv = tp.value(b.id);
  if (zv.rank() != 3 || ev.rank() != 2 || ev.extent(0) != zv.extent(2) || bv.rank() != 1 ||
      bv.extent(0) != ev.extent(1)) {
    throw ShapeError("time_map: incompatible shapes " + zv.shape_str() + ", " + ev.shape_str() +
                     ", " + bv.shape_str());
  }
  const int w = zv.extent(0), joints = zv.extent(1);
  const int tin = ev.extent(0), tout = ev.extent(1);
  Tensor<T> out({w, joints, tout});
  for (int c = 0; c < w; ++c) {
    for (int n = 0; n < joints; ++n) {
      const T* zr = zv.data() + (static_cast<std::size_t>(c) * joints + n) * tin;
      T* orow = out.data() + (static_cast<std::size_t>(c) * joints + n) * tout;
      for (int j = 0; j < tout; ++j) orow[j] = bv[static_cast<std::size_t>(j)];
      for (int ti = 0; ti < tin; ++ti) {
        kern::axpy<T>(static_cast<std::size_t>(tout), zr[ti],
                      ev.data() + static_cast<std::size_t>(ti) * tout, orow);
      }
    }
  }
  return tp.record(std::move(out), [zid = z.id, eid = e.id, bid = b.id](Tape<T>& t, int self) {
    const Tensor<T>& zv = t.value(zid);
    const Tensor<T>& ev = t.value(eid);
    const Tensor<T>& g = t.grad(self);
    Tensor<T>& gz = t.grad(zid);
    Tensor<T>& ge = t.grad(eid);
    Tensor<T>& gb = t.grad(bid);
    const int w = zv.extent(0), joints = zv.extent(1);
    const int tin = ev.extent(0), tout = ev.extent(1);
    for (int c = 0; c < w; ++c) {
      for (int n = 0; n < joints; ++n) {
        const std::size_t row = static_cast<std::size_t>(c) * joints + n;
        const T* gr = g.data() + row * tout;
        const T* zr = zv.data() + row * tin;
        T* gzr = gz.data() + row * tin;
        for (int j = 0; j < tout; ++j) gb[static_cast<std::size_t>(j)] += gr[j];
        for (int ti = 0; ti < tin; ++ti) {
          gzr[ti] += kern::dot<T>(gr, ev.data() + static_cast<std::size_t>(ti) * tout,
                                  static_cast<std::size_t>(tout));
          kern::axpy<T>(static_cast<std::size_t>(tout), zr[ti], gr,
                        ge.data() + static_cast<std::size_t>(ti) * tout);
        }
      }
    }
  });
}

/// Broadcast add of a per-(channel, joint) offset base: offsets [C x N x t] +
/// base [C x N]. The base is data, not a differentiable input.
template <class T>
Var<T> add_frame_base(Var<T> offsets, const Tensor<T>& base) {
  Tape<T>& tp = *offsets.tape;
  const Tensor<T>& ov = tp.value(offsets.id);
  if (ov.rank() != 3 || base.rank() != 2 || base.extent(0) != ov.extent(0) ||
      base.extent(1) != ov.extent(1)) {
    throw ShapeError("add_frame_base: incompatible shapes " + ov.shape_str() + " and " +
                     base.shape_str());
  }
  const int c = ov.extent(0), n = ov.extent(1), tt = ov.extent(2);
  Tensor<T> out = ov;
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < n; ++j) {
      T* row = out.data() + (static_cast<std::size_t>(i) * n + j) * tt;
      const T v = base.at(i, j);
      for (int k = 0; k < tt; ++k) row[k] += v;
    }
  }
  return tp.record(std::move(out), [oid = offsets.id](Tape<T>& t, int self) {
    const Tensor<T>& g = t.grad(self);
    Tensor<T>& go = t.grad(oid);
    for (std::size_t i = 0; i < g.size(); ++i) go[i] += g[i];
  });
}

/// Mean per-joint position error against a fixed target, both [C x N x t]:
/// (1/(N*t)) * sum_{n,tau} ||pred[:,n,tau] - gt[:,n,tau]||_2.
template <class T>
Var<T> mpjpe_loss(Var<T> pred, const Tensor<T>& gt) {
  Tape<T>& tp = *pred.tape;
  const Tensor<T>& pv = tp.value(pred.id);
  if (!pv.same_shape(gt)) {
    throw ShapeError("mpjpe: shapes differ: " + pv.shape_str() + " vs " + gt.shape_str());
  }
  if (pv.rank() != 3) throw ShapeError("mpjpe: expected 3-D, got " + pv.shape_str());
  const int c = pv.extent(0), n = pv.extent(1), tt = pv.extent(2);
  const std::size_t plane = static_cast<std::size_t>(n) * tt;
  const T norm = T(1) / static_cast<T>(static_cast<std::size_t>(n) * tt);
  Tensor<T> out({1});
  T acc = T(0);
  for (std::size_t j = 0; j < plane; ++j) {
    T ss = T(0);
    for (int i = 0; i < c; ++i) {
      const T d = pv[i * plane + j] - gt[i * plane + j];
      ss += d * d;
    }
    acc += std::sqrt(ss);
  }
  out[0] = acc * norm;
  return tp.record(std::move(out), [pid = pred.id, gt, norm, c, plane](Tape<T>& t, int self) {
    const T g0 = t.grad(self)[0];
    const Tensor<T>& pv = t.value(pid);
    Tensor<T>& gp = t.grad(pid);
    for (std::size_t j = 0; j < plane; ++j) {
      T ss = T(0);
      for (int i = 0; i < c; ++i) {
        const T d = pv[i * plane + j] - gt[i * plane + j];
        ss += d * d;
      }
      const T r = std::sqrt(ss);
      if (r > T(0)) {
        const T s = g0 * norm / r;
        for (int i = 0; i < c; ++i) {
          gp[i * plane + j] += s * (pv[i * plane + j] - gt[i * plane + j]);
        }
      }
    }
  });
}

/// Mean absolute error against a fixed target, normalized by N*t (summed over
/// channels), both [C x N x t].
template <class T>
Var<T> mae_loss(Var<T> pred, const Tensor<T>& gt) {
  Tape<T>& tp = *pred.tape;
  const Tensor<T>& pv = tp.value(pred.id);
  if (!pv.same_shape(gt)) {
    throw ShapeError("mae: shapes differ: " + pv.shape_str() + " vs " + gt.shape_str());
  }
  if (pv.rank() != 3) throw ShapeError("mae: expected 3-D, got " + pv.shape_str());
  const int n = pv.extent(1), tt = pv.extent(2);
  const T norm = T(1) / static_cast<T>(static_cast<std::size_t>(n) * tt);
  Tensor<T> out({1});
  T acc = T(0);
  for (std::size_t i = 0; i < pv.size(); ++i) acc += std::abs(pv[i] - gt[i]);
  out[0] = acc * norm;
  return tp.record(std::move(out), [pid = pred.id, gt, norm](Tape<T>& t, int self) {
    const T g0 = t.grad(self)[0];
    const Tensor<T>& pv = t.value(pid);
    Tensor<T>& gp = t.grad(pid);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const T d = pv[i] - gt[i];
      if (d > T(0)) {
        gp[i] += g0 * norm;
      } else if (d < T(0)) {
        gp[i] -= g0 * norm;
      }
    }
  });
}

}  // namespace gagcn::ad
