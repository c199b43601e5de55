#pragma once

#include <algorithm>
#include <cmath>

#include "hypsam/kernels/conv2d.hpp"
#include "hypsam/kernels/resize.hpp"
#include "hypsam/nn/autograd.hpp"

namespace hypsam::nn {

constexpr int64_t kParGrain = 4096;

template <class T>
void check_same_shape(const Var<T>& a, const Var<T>& b, const char* op) {
    if (!same_shape(a->value.shape, b->value.shape))
        throw ShapeMismatch(std::string(op) + ": operand shapes differ");
}

// ---------------------------------------------------------------- elementwise

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
    check_same_shape(a, b, "add");
    Tensor<T> out(a->value.shape);
    const T* pa = a->value.ptr();
    const T* pb = b->value.ptr();
    T* po = out.ptr();
    int64_t n = out.numel();
#pragma omp parallel for schedule(static) if (n >= kParGrain)
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] + pb[i];
    return op_node(std::move(out), {a, b}, [a, b](const Tensor<T>& g, const Tensor<T>&) {
        accumulate(a, g);
        accumulate(b, g);
    });
}

template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
    check_same_shape(a, b, "sub");
    Tensor<T> out(a->value.shape);
    int64_t n = out.numel();
#pragma omp parallel for schedule(static) if (n >= kParGrain)
    for (int64_t i = 0; i < n; ++i) out[i] = a->value[i] - b->value[i];
    return op_node(std::move(out), {a, b}, [a, b](const Tensor<T>& g, const Tensor<T>&) {
        accumulate(a, g);
        if (b->requires_grad) {
            Tensor<T> gb(g.shape);
            for (int64_t i = 0; i < gb.numel(); ++i) gb[i] = -g[i];
            accumulate(b, gb);
        }
    });
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
    check_same_shape(a, b, "mul");
    Tensor<T> out(a->value.shape);
    int64_t n = out.numel();
#pragma omp parallel for schedule(static) if (n >= kParGrain)
    for (int64_t i = 0; i < n; ++i) out[i] = a->value[i] * b->value[i];
    return op_node(std::move(out), {a, b}, [a, b](const Tensor<T>& g, const Tensor<T>&) {
        if (a->requires_grad) {
            Tensor<T> ga(g.shape);
            for (int64_t i = 0; i < ga.numel(); ++i) ga[i] = g[i] * b->value[i];
            accumulate(a, ga);
        }
        if (b->requires_grad) {
            Tensor<T> gb(g.shape);
            for (int64_t i = 0; i < gb.numel(); ++i) gb[i] = g[i] * a->value[i];
            accumulate(b, gb);
        }
    });
}

template <class T>
Var<T> div(const Var<T>& a, const Var<T>& b) {
    check_same_shape(a, b, "div");
    Tensor<T> out(a->value.shape);
    int64_t n = out.numel();
#pragma omp parallel for schedule(static) if (n >= kParGrain)
    for (int64_t i = 0; i < n; ++i) out[i] = a->value[i] / b->value[i];
    return op_node(std::move(out), {a, b}, [a, b](const Tensor<T>& g, const Tensor<T>&) {
        if (a->requires_grad) {
            Tensor<T> ga(g.shape);
            for (int64_t i = 0; i < ga.numel(); ++i) ga[i] = g[i] / b->value[i];
            accumulate(a, ga);
        }
        if (b->requires_grad) {
            Tensor<T> gb(g.shape);
            for (int64_t i = 0; i < gb.numel(); ++i)
                gb[i] = -g[i] * a->value[i] / (b->value[i] * b->value[i]);
            accumulate(b, gb);
        }
    });
}

template <class T>
Var<T> scale(const Var<T>& a, T s) {
    Tensor<T> out(a->value.shape);
    int64_t n = out.numel();
#pragma omp parallel for schedule(static) if (n >= kParGrain)
    for (int64_t i = 0; i < n; ++i) out[i] = a->value[i] * s;
    return op_node(std::move(out), {a}, [a, s](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(g.shape);
        for (int64_t i = 0; i < ga.numel(); ++i) ga[i] = g[i] * s;
        accumulate(a, ga);
    });
}

template <class T>
Var<T> add_scalar(const Var<T>& a, T s) {
    Tensor<T> out(a->value.shape);
    for (int64_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] + s;
    return op_node(std::move(out), {a},
                   [a](const Tensor<T>& g, const Tensor<T>&) { accumulate(a, g); });
}

template <class T>
Var<T> relu(const Var<T>& a) {
    Tensor<T> out(a->value.shape);
    int64_t n = out.numel();
#pragma omp parallel for schedule(static) if (n >= kParGrain)
    for (int64_t i = 0; i < n; ++i) out[i] = a->value[i] > T(0) ? a->value[i] : T(0);
    return op_node(std::move(out), {a}, [a](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(g.shape);
        for (int64_t i = 0; i < ga.numel(); ++i) ga[i] = a->value[i] > T(0) ? g[i] : T(0);
        accumulate(a, ga);
    });
}

template <class T>
Var<T> sigmoid(const Var<T>& a) {
    Tensor<T> out(a->value.shape);
    int64_t n = out.numel();
#pragma omp parallel for schedule(static) if (n >= kParGrain)
    for (int64_t i = 0; i < n; ++i) out[i] = T(1) / (T(1) + std::exp(-a->value[i]));
    return op_node(std::move(out), {a}, [a](const Tensor<T>& g, const Tensor<T>& v) {
        if (!a->requires_grad) return;
        Tensor<T> ga(g.shape);
        for (int64_t i = 0; i < ga.numel(); ++i) ga[i] = g[i] * v[i] * (T(1) - v[i]);
        accumulate(a, ga);
    });
}

template <class T>
Var<T> log_op(const Var<T>& a) {
    Tensor<T> out(a->value.shape);
    for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::log(a->value[i]);
    return op_node(std::move(out), {a}, [a](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(g.shape);
        for (int64_t i = 0; i < ga.numel(); ++i) ga[i] = g[i] / a->value[i];
        accumulate(a, ga);
    });
}

// subgradient: passes only strictly inside the interval
template <class T>
Var<T> clamp(const Var<T>& a, T lo, T hi) {
    Tensor<T> out(a->value.shape);
    for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::min(hi, std::max(lo, a->value[i]));
    return op_node(std::move(out), {a}, [a, lo, hi](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(g.shape);
        for (int64_t i = 0; i < ga.numel(); ++i)
            ga[i] = (a->value[i] > lo && a->value[i] < hi) ? g[i] : T(0);
        accumulate(a, ga);
    });
}

template <class T>
Var<T> reshape(const Var<T>& a, Shape s) {
    if (shape_numel(s) != a->value.numel()) throw ShapeMismatch("reshape: numel differs");
    Tensor<T> out(std::move(s), a->value.data);
    return op_node(std::move(out), {a}, [a](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(a->value.shape, g.data);
        accumulate(a, ga);
    });
}

// ---------------------------------------------------------------- reductions

template <class T>
Var<T> sum_all(const Var<T>& a) {
    T acc = T(0);
    for (int64_t i = 0; i < a->value.numel(); ++i) acc += a->value[i];
    Tensor<T> out(Shape{1});
    out[0] = acc;
    return op_node(std::move(out), {a}, [a](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(a->value.shape, g[0]);
        accumulate(a, ga);
    });
}

template <class T>
Var<T> mean_all(const Var<T>& a) {
    int64_t n = a->value.numel();
    T acc = T(0);
    for (int64_t i = 0; i < n; ++i) acc += a->value[i];
    Tensor<T> out(Shape{1});
    out[0] = acc / static_cast<T>(n);
    return op_node(std::move(out), {a}, [a, n](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(a->value.shape, g[0] / static_cast<T>(n));
        accumulate(a, ga);
    });
}

// per-sample reduction over C,H,W: [B,C,H,W] -> [B]
template <class T>
Var<T> sum_per_sample(const Var<T>& a) {
    int B = a->value.dim(0);
    int64_t m = a->value.numel() / B;
    Tensor<T> out(Shape{B});
    for (int b = 0; b < B; ++b) {
        T acc = T(0);
        const T* p = a->value.ptr() + b * m;
        for (int64_t i = 0; i < m; ++i) acc += p[i];
        out[b] = acc;
    }
    return op_node(std::move(out), {a}, [a, B, m](const Tensor<T>& g, const Tensor<T>&) {
        if (!a->requires_grad) return;
        Tensor<T> ga(a->value.shape);
        for (int b = 0; b < B; ++b)
            for (int64_t i = 0; i < m; ++i) ga[b * m + i] = g[b];
        accumulate(a, ga);
    });
}

// ---------------------------------------------------------------- linear algebra

// x:[B,Fin], w:[Fout,Fin], b:[Fout] (optional) -> [B,Fout]
template <class T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
    int B = x->value.dim(0), Fin = x->value.dim(1), Fout = w->value.dim(0);
    if (w->value.dim(1) != Fin) throw ShapeMismatch("linear: weight/input mismatch");
    Tensor<T> out(Shape{B, Fout});
    for (int i = 0; i < B; ++i)
        for (int o = 0; o < Fout; ++o) {
            T acc = b ? b->value[o] : T(0);
            const T* xr = x->value.ptr() + static_cast<int64_t>(i) * Fin;
            const T* wr = w->value.ptr() + static_cast<int64_t>(o) * Fin;
            for (int k = 0; k < Fin; ++k) acc += xr[k] * wr[k];
            out[static_cast<int64_t>(i) * Fout + o] = acc;
        }
    return op_node(std::move(out), {x, w, b},
                   [x, w, b, B, Fin, Fout](const Tensor<T>& g, const Tensor<T>&) {
                       if (x->requires_grad) {
                           Tensor<T> gx(x->value.shape);
                           for (int i = 0; i < B; ++i)
                               for (int k = 0; k < Fin; ++k) {
                                   T acc = T(0);
                                   for (int o = 0; o < Fout; ++o)
                                       acc += g[static_cast<int64_t>(i) * Fout + o] *
                                              w->value[static_cast<int64_t>(o) * Fin + k];
                                   gx[static_cast<int64_t>(i) * Fin + k] = acc;
                               }
                           accumulate(x, gx);
                       }
                       if (w->requires_grad) {
                           Tensor<T> gw(w->value.shape);
                           for (int o = 0; o < Fout; ++o)
                               for (int k = 0; k < Fin; ++k) {
                                   T acc = T(0);
                                   for (int i = 0; i < B; ++i)
                                       acc += g[static_cast<int64_t>(i) * Fout + o] *
                                              x->value[static_cast<int64_t>(i) * Fin + k];
                                   gw[static_cast<int64_t>(o) * Fin + k] = acc;
                               }
                           accumulate(w, gw);
                       }
                       if (b && b->requires_grad) {
                           Tensor<T> gb(b->value.shape);
                           for (int o = 0; o < Fout; ++o) {
                               T acc = T(0);
                               for (int i = 0; i < B; ++i)
                                   acc += g[static_cast<int64_t>(i) * Fout + o];
                               gb[o] = acc;
                           }
                           accumulate(b, gb);
                       }
                   });
}

// softmax over the last dim of a 2-D tensor [B,N]
template <class T>
Var<T> softmax_rows(const Var<T>& a) {
    int B = a->value.dim(0), N = a->value.dim(1);
    Tensor<T> out(a->value.shape);
    for (int b = 0; b < B; ++b) {
        const T* row = a->value.ptr() + static_cast<int64_t>(b) * N;
        T mx = row[0];
        for (int i = 1; i < N; ++i) mx = std::max(mx, row[i]);
        T z = T(0);
        for (int i = 0; i < N; ++i) z += std::exp(row[i] - mx);
        for (int i = 0; i < N; ++i) out[static_cast<int64_t>(b) * N + i] = std::exp(row[i] - mx) / z;
    }
    return op_node(std::move(out), {a}, [a, B, N](const Tensor<T>& g, const Tensor<T>& v) {
        if (!a->requires_grad) return;
        Tensor<T> ga(a->value.shape);
        for (int b = 0; b < B; ++b) {
            const T* gr = g.ptr() + static_cast<int64_t>(b) * N;
            const T* vr = v.ptr() + static_cast<int64_t>(b) * N;
            T dot = T(0);
            for (int i = 0; i < N; ++i) dot += gr[i] * vr[i];
            for (int i = 0; i < N; ++i)
                ga[static_cast<int64_t>(b) * N + i] = vr[i] * (gr[i] - dot);
        }
        accumulate(a, ga);
    });
}

// ---------------------------------------------------------------- conv / shape ops

// x:[B,Ci,H,W], w:[Co,Ci,kh,kw], optional b:[Co]
template <class T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride, int pad) {
    int B = x->value.dim(0), Ci = x->value.dim(1), H = x->value.dim(2), W = x->value.dim(3);
    int Co = w->value.dim(0), kh = w->value.dim(2), kw = w->value.dim(3);
    if (w->value.dim(1) != Ci) throw ShapeMismatch("conv2d: channel mismatch");
    auto d = kern::ConvDims::make(B, Ci, H, W, Co, kh, kw, stride, pad);
    Tensor<T> out(Shape{B, Co, d.Ho, d.Wo});
    kern::conv2d_fwd(x->value.ptr(), w->value.ptr(), b ? b->value.ptr() : nullptr, out.ptr(), d);
    return op_node(std::move(out), {x, w, b}, [x, w, b, d](const Tensor<T>& g, const Tensor<T>&) {
        if (x->requires_grad) {
            Tensor<T> gx(x->value.shape);
            kern::conv2d_dgrad(g.ptr(), w->value.ptr(), gx.ptr(), d);
            accumulate(x, gx);
        }
        if (w->requires_grad || (b && b->requires_grad)) {
            Tensor<T> gw(w->value.shape);
            Tensor<T> gb = b ? Tensor<T>(b->value.shape) : Tensor<T>();
            kern::conv2d_wgrad(x->value.ptr(), g.ptr(), gw.ptr(), b ? gb.ptr() : nullptr, d);
            if (w->requires_grad) accumulate(w, gw);
            if (b && b->requires_grad) accumulate(b, gb);
        }
    });
}

// per-sample weights w:[B,Co,Ci,kh,kw], stride 1, same padding chosen by caller
template <class T>
Var<T> conv2d_per_sample(const Var<T>& x, const Var<T>& w, int pad) {
    int B = x->value.dim(0), Ci = x->value.dim(1), H = x->value.dim(2), W = x->value.dim(3);
    int Co = w->value.dim(1), kh = w->value.dim(3), kw = w->value.dim(4);
    if (w->value.dim(0) != B || w->value.dim(2) != Ci)
        throw ShapeMismatch("conv2d_per_sample: weight shape mismatch");
    auto d = kern::ConvDims::make(B, Ci, H, W, Co, kh, kw, 1, pad);
    Tensor<T> out(Shape{B, Co, d.Ho, d.Wo});
    kern::conv2d_fwd_ps(x->value.ptr(), w->value.ptr(), out.ptr(), d);
    return op_node(std::move(out), {x, w}, [x, w, d](const Tensor<T>& g, const Tensor<T>&) {
        if (x->requires_grad) {
            Tensor<T> gx(x->value.shape);
            kern::conv2d_dgrad_ps(g.ptr(), w->value.ptr(), gx.ptr(), d);
            accumulate(x, gx);
        }
        if (w->requires_grad) {
            Tensor<T> gw(w->value.shape);
            kern::conv2d_wgrad_ps(x->value.ptr(), g.ptr(), gw.ptr(), d);
            accumulate(w, gw);
        }
    });
}

template <class T>
Var<T> gap2d(const Var<T>& x) {
    int B = x->value.dim(0), C = x->value.dim(1), H = x->value.dim(2), W = x->value.dim(3);
    int64_t hw = static_cast<int64_t>(H) * W;
    Tensor<T> out(Shape{B, C});
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c) {
            const T* p = x->value.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
            T acc = T(0);
            for (int64_t i = 0; i < hw; ++i) acc += p[i];
            out[static_cast<int64_t>(b) * C + c] = acc / static_cast<T>(hw);
        }
    return op_node(std::move(out), {x}, [x, B, C, hw](const Tensor<T>& g, const Tensor<T>&) {
        if (!x->requires_grad) return;
        Tensor<T> gx(x->value.shape);
        for (int b = 0; b < B; ++b)
            for (int c = 0; c < C; ++c) {
                T gv = g[static_cast<int64_t>(b) * C + c] / static_cast<T>(hw);
                T* p = gx.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                for (int64_t i = 0; i < hw; ++i) p[i] = gv;
            }
        accumulate(x, gx);
    });
}

template <class T>
Var<T> upsample_bilinear(const Var<T>& x, int Ho, int Wo) {
    int B = x->value.dim(0), C = x->value.dim(1), H = x->value.dim(2), W = x->value.dim(3);
    Tensor<T> out(Shape{B, C, Ho, Wo});
    kern::resize_bilinear_fwd(x->value.ptr(), out.ptr(), B * C, H, W, Ho, Wo);
    return op_node(std::move(out), {x},
                   [x, B, C, H, W, Ho, Wo](const Tensor<T>& g, const Tensor<T>&) {
                       if (!x->requires_grad) return;
                       Tensor<T> gx(x->value.shape);
                       kern::resize_bilinear_bwd(g.ptr(), gx.ptr(), B * C, H, W, Ho, Wo);
                       accumulate(x, gx);
                   });
}

template <class T>
Var<T> concat_channels(const std::vector<Var<T>>& xs) {
    int B = xs[0]->value.dim(0), H = xs[0]->value.dim(2), W = xs[0]->value.dim(3);
    int Ctot = 0;
    for (const auto& x : xs) {
        if (x->value.dim(0) != B || x->value.dim(2) != H || x->value.dim(3) != W)
            throw ShapeMismatch("concat_channels: spatial/batch mismatch");
        Ctot += x->value.dim(1);
    }
    int64_t hw = static_cast<int64_t>(H) * W;
    Tensor<T> out(Shape{B, Ctot, H, W});
    for (int b = 0; b < B; ++b) {
        int coff = 0;
        for (const auto& x : xs) {
            int C = x->value.dim(1);
            std::copy(x->value.ptr() + static_cast<int64_t>(b) * C * hw,
                      x->value.ptr() + static_cast<int64_t>(b + 1) * C * hw,
                      out.ptr() + (static_cast<int64_t>(b) * Ctot + coff) * hw);
            coff += C;
        }
    }
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(out);
    bool needs = grad_enabled_flag() &&
                 std::any_of(xs.begin(), xs.end(), [](const Var<T>& v) { return v->requires_grad; });
    if (needs) {
        n->requires_grad = true;
        n->inputs = xs;
        n->backward_fn = [xs, B, Ctot, hw](const Tensor<T>& g, const Tensor<T>&) {
            for (int b = 0; b < B; ++b) {
                int coff = 0;
                for (const auto& x : xs) {
                    int C = x->value.dim(1);
                    if (x->requires_grad) {
                        x->ensure_grad();
                        T* dst = x->grad.ptr() + static_cast<int64_t>(b) * C * hw;
                        const T* src = g.ptr() + (static_cast<int64_t>(b) * Ctot + coff) * hw;
                        for (int64_t i = 0; i < C * hw; ++i) dst[i] += src[i];
                    }
                    coff += C;
                }
            }
        };
    }
    return n;
}

// Assemble per-sample dynamic kernels from a bank and four attention tensors.
// bank:[N,Co,Ci,k,k]  aw:[B,N]  af:[B,N,Co]  ac:[B,N,Ci]  as_:[B,N,k,k]
// -> [B,Co,Ci,k,k]
template <class T>
Var<T> assemble_dynamic_kernel(const Var<T>& bank, const Var<T>& aw, const Var<T>& af,
                               const Var<T>& ac, const Var<T>& as_) {
    int N = bank->value.dim(0), Co = bank->value.dim(1), Ci = bank->value.dim(2);
    int kh = bank->value.dim(3), kw = bank->value.dim(4);
    int B = aw->value.dim(0);
    if (aw->value.dim(1) != N || af->value.dim(1) != N || af->value.dim(2) != Co ||
        ac->value.dim(1) != N || ac->value.dim(2) != Ci || as_->value.dim(1) != N ||
        as_->value.dim(2) != kh || as_->value.dim(3) != kw)
        throw ShapeMismatch("assemble_dynamic_kernel: attention shape mismatch");
    int kk = kh * kw;
    auto bidx = [&](int n, int co, int ci, int s) {
        return ((static_cast<int64_t>(n) * Co + co) * Ci + ci) * kk + s;
    };
    Tensor<T> out(Shape{B, Co, Ci, kh, kw});
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < B; ++b) {
        for (int co = 0; co < Co; ++co) {
            for (int ci = 0; ci < Ci; ++ci)
                for (int s = 0; s < kk; ++s) {
                    T acc = T(0);
                    for (int n = 0; n < N; ++n) {
                        acc += aw->value[static_cast<int64_t>(b) * N + n] *
                               af->value[(static_cast<int64_t>(b) * N + n) * Co + co] *
                               ac->value[(static_cast<int64_t>(b) * N + n) * Ci + ci] *
                               as_->value[(static_cast<int64_t>(b) * N + n) * kk + s] *
                               bank->value[bidx(n, co, ci, s)];
                    }
                    out[((static_cast<int64_t>(b) * Co + co) * Ci + ci) * kk + s] = acc;
                }
        }
    }
    return op_node(
        std::move(out), {bank, aw, af, ac, as_},
        [bank, aw, af, ac, as_, B, N, Co, Ci, kk](const Tensor<T>& g, const Tensor<T>&) {
            auto bidx = [=](int n, int co, int ci, int s) {
                return ((static_cast<int64_t>(n) * Co + co) * Ci + ci) * kk + s;
            };
            auto gidx = [=](int b, int co, int ci, int s) {
                return ((static_cast<int64_t>(b) * Co + co) * Ci + ci) * kk + s;
            };
            if (bank->requires_grad) {
                Tensor<T> gb(bank->value.shape);
#pragma omp parallel for collapse(2) schedule(static)
                for (int n = 0; n < N; ++n)
                    for (int co = 0; co < Co; ++co)
                        for (int ci = 0; ci < Ci; ++ci)
                            for (int s = 0; s < kk; ++s) {
                                T acc = T(0);
                                for (int b = 0; b < B; ++b)
                                    acc += g[gidx(b, co, ci, s)] *
                                           aw->value[static_cast<int64_t>(b) * N + n] *
                                           af->value[(static_cast<int64_t>(b) * N + n) * Co + co] *
                                           ac->value[(static_cast<int64_t>(b) * N + n) * Ci + ci] *
                                           as_->value[(static_cast<int64_t>(b) * N + n) * kk + s];
                                gb[bidx(n, co, ci, s)] += acc;
                            }
                accumulate(bank, gb);
            }
            auto term = [&](int b, int n, int co, int ci, int s) {
                return g[gidx(b, co, ci, s)] * bank->value[bidx(n, co, ci, s)];
            };
            if (aw->requires_grad) {
                Tensor<T> gw(aw->value.shape);
                for (int b = 0; b < B; ++b)
                    for (int n = 0; n < N; ++n) {
                        T acc = T(0);
                        for (int co = 0; co < Co; ++co)
                            for (int ci = 0; ci < Ci; ++ci)
                                for (int s = 0; s < kk; ++s)
                                    acc += term(b, n, co, ci, s) *
                                           af->value[(static_cast<int64_t>(b) * N + n) * Co + co] *
                                           ac->value[(static_cast<int64_t>(b) * N + n) * Ci + ci] *
                                           as_->value[(static_cast<int64_t>(b) * N + n) * kk + s];
                        gw[static_cast<int64_t>(b) * N + n] = acc;
                    }
                accumulate(aw, gw);
            }
            if (af->requires_grad) {
                Tensor<T> gf(af->value.shape);
                for (int b = 0; b < B; ++b)
                    for (int n = 0; n < N; ++n)
                        for (int co = 0; co < Co; ++co) {
                            T acc = T(0);
                            for (int ci = 0; ci < Ci; ++ci)
                                for (int s = 0; s < kk; ++s)
                                    acc += term(b, n, co, ci, s) *
                                           ac->value[(static_cast<int64_t>(b) * N + n) * Ci + ci] *
                                           as_->value[(static_cast<int64_t>(b) * N + n) * kk + s];
                            gf[(static_cast<int64_t>(b) * N + n) * Co + co] =
                                acc * aw->value[static_cast<int64_t>(b) * N + n];
                        }
                accumulate(af, gf);
            }
            if (ac->requires_grad) {
                Tensor<T> gc(ac->value.shape);
                for (int b = 0; b < B; ++b)
                    for (int n = 0; n < N; ++n)
                        for (int ci = 0; ci < Ci; ++ci) {
                            T acc = T(0);
                            for (int co = 0; co < Co; ++co)
                                for (int s = 0; s < kk; ++s)
                                    acc += term(b, n, co, ci, s) *
                                           af->value[(static_cast<int64_t>(b) * N + n) * Co + co] *
                                           as_->value[(static_cast<int64_t>(b) * N + n) * kk + s];
                            gc[(static_cast<int64_t>(b) * N + n) * Ci + ci] =
                                acc * aw->value[static_cast<int64_t>(b) * N + n];
                        }
                accumulate(ac, gc);
            }
            if (as_->requires_grad) {
                Tensor<T> gs(as_->value.shape);
                for (int b = 0; b < B; ++b)
                    for (int n = 0; n < N; ++n)
                        for (int s = 0; s < kk; ++s) {
                            T acc = T(0);
                            for (int co = 0; co < Co; ++co)
                                for (int ci = 0; ci < Ci; ++ci)
                                    acc += term(b, n, co, ci, s) *
                                           af->value[(static_cast<int64_t>(b) * N + n) * Co + co] *
                                           ac->value[(static_cast<int64_t>(b) * N + n) * Ci + ci];
                            gs[(static_cast<int64_t>(b) * N + n) * kk + s] =
                                acc * aw->value[static_cast<int64_t>(b) * N + n];
                        }
                accumulate(as_, gs);
            }
        });
}

}  // namespace hypsam::nn
