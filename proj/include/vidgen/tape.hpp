#ifndef VIDGEN_TAPE_HPP
#define VIDGEN_TAPE_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "vidgen/tensor.hpp"

namespace vidgen {

// Reverse-mode tape over Tensor<S>. Nodes are appended in evaluation order, so
// index order is already topological; backward walks indices in reverse.
template <class S>
class Tape {
public:
    int input(Tensor<S> v) { return push(std::move(v), {}); }

    int push(Tensor<S> v, std::function<void(Tape&, int)> back) {
        nodes_.push_back(Node{std::move(v), Tensor<S>(), false, std::move(back)});
        return int(nodes_.size()) - 1;
    }

    const Tensor<S>& val(int i) const { return nodes_[size_t(i)].val; }

    Tensor<S>& grad(int i) {
        Node& n = nodes_[size_t(i)];
        if (!n.has_grad) {
            n.grad = Tensor<S>::zeros(n.val.shape);
            n.has_grad = true;
        }
        return n.grad;
    }

    bool has_grad(int i) const { return nodes_[size_t(i)].has_grad; }

    void backward(int root) {
        grad(root) = Tensor<S>::full(val(root).shape, S(1));
        for (int i = root; i >= 0; --i) {
            Node& n = nodes_[size_t(i)];
            if (n.has_grad && n.back) n.back(*this, i);
        }
    }

    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor<S> val;
        Tensor<S> grad;
        bool has_grad;
        std::function<void(Tape&, int)> back;
    };
    std::vector<Node> nodes_;
};

// ---- elementwise ----

template <class S>
int add(Tape<S>& t, int a, int b) {
    check_same_shape(t.val(a), t.val(b), "add");
    Tensor<S> out = t.val(a);
    for (int64_t i = 0; i < out.numel(); ++i) out[i] += t.val(b)[i];
    return t.push(std::move(out), [a, b](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>&ga = tp.grad(a), &gb = tp.grad(b);
        for (int64_t i = 0; i < g.numel(); ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
        }
    });
}

template <class S>
int sub(Tape<S>& t, int a, int b) {
    check_same_shape(t.val(a), t.val(b), "sub");
    Tensor<S> out = t.val(a);
    for (int64_t i = 0; i < out.numel(); ++i) out[i] -= t.val(b)[i];
    return t.push(std::move(out), [a, b](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>&ga = tp.grad(a), &gb = tp.grad(b);
        for (int64_t i = 0; i < g.numel(); ++i) {
            ga[i] += g[i];
            gb[i] -= g[i];
        }
    });
}

template <class S>
int mul(Tape<S>& t, int a, int b) {
    check_same_shape(t.val(a), t.val(b), "mul");
    Tensor<S> out = t.val(a);
    for (int64_t i = 0; i < out.numel(); ++i) out[i] *= t.val(b)[i];
    return t.push(std::move(out), [a, b](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        const Tensor<S>&va = tp.val(a), &vb = tp.val(b);
        Tensor<S>&ga = tp.grad(a), &gb = tp.grad(b);
        for (int64_t i = 0; i < g.numel(); ++i) {
            ga[i] += g[i] * vb[i];
            gb[i] += g[i] * va[i];
        }
    });
}

template <class S>
int scale(Tape<S>& t, int a, S c) {
    Tensor<S> out = t.val(a);
    for (auto& v : out.data) v *= c;
    return t.push(std::move(out), [a, c](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>& ga = tp.grad(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * c;
    });
}

template <class S>
int sigmoid(Tape<S>& t, int a) {
    Tensor<S> out = t.val(a);
    for (auto& v : out.data) v = S(1) / (S(1) + std::exp(-v));
    return t.push(std::move(out), [a](Tape<S>& tp, int self) {
        const Tensor<S>&g = tp.grad(self), &y = tp.val(self);
        Tensor<S>& ga = tp.grad(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * y[i] * (S(1) - y[i]);
    });
}

template <class S>
int silu(Tape<S>& t, int a) {
    Tensor<S> out = t.val(a);
    for (auto& v : out.data) v = v / (S(1) + std::exp(-v));
    return t.push(std::move(out), [a](Tape<S>& tp, int self) {
        const Tensor<S>&g = tp.grad(self), &x = tp.val(a);
        Tensor<S>& ga = tp.grad(a);
        for (int64_t i = 0; i < g.numel(); ++i) {
            S s = S(1) / (S(1) + std::exp(-x[i]));
            ga[i] += g[i] * s * (S(1) + x[i] * (S(1) - s));
        }
    });
}

// exact erf form, as in GEGLU
template <class S>
int gelu(Tape<S>& t, int a) {
    Tensor<S> out = t.val(a);
    for (auto& v : out.data) v = S(0.5) * v * (S(1) + std::erf(v / S(std::sqrt(2.0))));
    return t.push(std::move(out), [a](Tape<S>& tp, int self) {
        const Tensor<S>&g = tp.grad(self), &x = tp.val(a);
        Tensor<S>& ga = tp.grad(a);
        const S inv_sqrt2 = S(1) / S(std::sqrt(2.0));
        const S inv_sqrt2pi = S(1) / S(std::sqrt(2.0 * M_PI));
        for (int64_t i = 0; i < g.numel(); ++i) {
            S cdf = S(0.5) * (S(1) + std::erf(x[i] * inv_sqrt2));
            S pdf = inv_sqrt2pi * std::exp(S(-0.5) * x[i] * x[i]);
            ga[i] += g[i] * (cdf + x[i] * pdf);
        }
    });
}

// ---- linear algebra ----

// A[m,k] @ B[k,n]
template <class S>
int matmul(Tape<S>& t, int a, int b) {
    const Tensor<S>&A = t.val(a), &B = t.val(b);
    if (A.ndim() != 2 || B.ndim() != 2 || A.dim(1) != B.dim(0))
        throw std::invalid_argument("matmul: bad shapes " + A.shape_str() + " x " + B.shape_str());
    int64_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
    Tensor<S> out({m, n});
    out.mat(m, n).noalias() = A.mat(m, k) * B.mat(k, n);
    return t.push(std::move(out), [a, b, m, k, n](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        tp.grad(a).mat(m, k).noalias() += g.mat(m, n) * tp.val(b).mat(k, n).transpose();
        tp.grad(b).mat(k, n).noalias() += tp.val(a).mat(m, k).transpose() * g.mat(m, n);
    });
}

// x flattened to [rows, in] @ W[in, out] + bias[out]; result keeps leading dims
template <class S>
int linear(Tape<S>& t, int x, int w, int bias) {
    const Tensor<S>&X = t.val(x), &W = t.val(w), &B = t.val(bias);
    int64_t in = W.dim(0), out_dim = W.dim(1);
    if (X.numel() % in != 0) throw std::invalid_argument("linear: input width mismatch");
    if (B.numel() != out_dim) throw std::invalid_argument("linear: bias width mismatch");
    int64_t rows = X.numel() / in;
    std::vector<int64_t> out_shape(X.shape.begin(), X.shape.end() - 1);
    out_shape.push_back(out_dim);
    Tensor<S> out(out_shape);
    out.mat(rows, out_dim).noalias() = X.mat(rows, in) * W.mat(in, out_dim);
    for (int64_t r = 0; r < rows; ++r)
        for (int64_t c = 0; c < out_dim; ++c) out[r * out_dim + c] += B[c];
    return t.push(std::move(out), [x, w, bias, rows, in, out_dim](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        tp.grad(x).mat(rows, in).noalias() += g.mat(rows, out_dim) * tp.val(w).mat(in, out_dim).transpose();
        tp.grad(w).mat(in, out_dim).noalias() += tp.val(x).mat(rows, in).transpose() * g.mat(rows, out_dim);
        Tensor<S>& gb = tp.grad(bias);
        for (int64_t r = 0; r < rows; ++r)
            for (int64_t c = 0; c < out_dim; ++c) gb[c] += g[r * out_dim + c];
    });
}

// batched A[B,m,k] @ B[B,k,n]
template <class S>
int bmm(Tape<S>& t, int a, int b) {
    const Tensor<S>&A = t.val(a), &Bv = t.val(b);
    if (A.ndim() != 3 || Bv.ndim() != 3 || A.dim(0) != Bv.dim(0) || A.dim(2) != Bv.dim(1))
        throw std::invalid_argument("bmm: bad shapes");
    int64_t nb = A.dim(0), m = A.dim(1), k = A.dim(2), n = Bv.dim(2);
    Tensor<S> out({nb, m, n});
    for (int64_t i = 0; i < nb; ++i) {
        typename Tensor<S>::ConstMatMap Am(A.data.data() + i * m * k, m, k);
        typename Tensor<S>::ConstMatMap Bm(Bv.data.data() + i * k * n, k, n);
        typename Tensor<S>::MatMap Om(out.data.data() + i * m * n, m, n);
        Om.noalias() = Am * Bm;
    }
    return t.push(std::move(out), [a, b, nb, m, k, n](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>&ga = tp.grad(a), &gb = tp.grad(b);
        const Tensor<S>&va = tp.val(a), &vb = tp.val(b);
        for (int64_t i = 0; i < nb; ++i) {
            typename Tensor<S>::ConstMatMap Gm(g.data.data() + i * m * n, m, n);
            typename Tensor<S>::ConstMatMap Am(va.data.data() + i * m * k, m, k);
            typename Tensor<S>::ConstMatMap Bm(vb.data.data() + i * k * n, k, n);
            typename Tensor<S>::MatMap Gam(ga.data.data() + i * m * k, m, k);
            typename Tensor<S>::MatMap Gbm(gb.data.data() + i * k * n, k, n);
            Gam.noalias() += Gm * Bm.transpose();
            Gbm.noalias() += Am.transpose() * Gm;
        }
    });
}

// batched A[B,m,k] @ B[B,n,k]^T -> [B,m,n]  (Q K^T)
template <class S>
int bmm_nt(Tape<S>& t, int a, int b) {
    const Tensor<S>&A = t.val(a), &Bv = t.val(b);
    if (A.ndim() != 3 || Bv.ndim() != 3 || A.dim(0) != Bv.dim(0) || A.dim(2) != Bv.dim(2))
        throw std::invalid_argument("bmm_nt: bad shapes");
    int64_t nb = A.dim(0), m = A.dim(1), k = A.dim(2), n = Bv.dim(1);
    Tensor<S> out({nb, m, n});
    for (int64_t i = 0; i < nb; ++i) {
        typename Tensor<S>::ConstMatMap Am(A.data.data() + i * m * k, m, k);
        typename Tensor<S>::ConstMatMap Bm(Bv.data.data() + i * n * k, n, k);
        typename Tensor<S>::MatMap Om(out.data.data() + i * m * n, m, n);
        Om.noalias() = Am * Bm.transpose();
    }
    return t.push(std::move(out), [a, b, nb, m, k, n](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>&ga = tp.grad(a), &gb = tp.grad(b);
        const Tensor<S>&va = tp.val(a), &vb = tp.val(b);
        for (int64_t i = 0; i < nb; ++i) {
            typename Tensor<S>::ConstMatMap Gm(g.data.data() + i * m * n, m, n);
            typename Tensor<S>::ConstMatMap Am(va.data.data() + i * m * k, m, k);
            typename Tensor<S>::ConstMatMap Bm(vb.data.data() + i * n * k, n, k);
            typename Tensor<S>::MatMap Gam(ga.data.data() + i * m * k, m, k);
            typename Tensor<S>::MatMap Gbm(gb.data.data() + i * n * k, n, k);
            Gam.noalias() += Gm * Bm;
            Gbm.noalias() += Gm.transpose() * Am;
        }
    });
}

// softmax over the last dimension
template <class S>
int softmax_lastdim(Tape<S>& t, int a) {
    const Tensor<S>& A = t.val(a);
    int64_t cols = A.dim(A.ndim() - 1);
    int64_t rows = A.numel() / cols;
    Tensor<S> out = A;
    for (int64_t r = 0; r < rows; ++r) {
        S* p = out.data.data() + r * cols;
        S mx = p[0];
        for (int64_t c = 1; c < cols; ++c) mx = std::max(mx, p[c]);
        S sum(0);
        for (int64_t c = 0; c < cols; ++c) {
            p[c] = std::exp(p[c] - mx);
            sum += p[c];
        }
        for (int64_t c = 0; c < cols; ++c) p[c] /= sum;
    }
    return t.push(std::move(out), [a, rows, cols](Tape<S>& tp, int self) {
        const Tensor<S>&g = tp.grad(self), &y = tp.val(self);
        Tensor<S>& ga = tp.grad(a);
        for (int64_t r = 0; r < rows; ++r) {
            const S* gp = g.data.data() + r * cols;
            const S* yp = y.data.data() + r * cols;
            S dot(0);
            for (int64_t c = 0; c < cols; ++c) dot += gp[c] * yp[c];
            S* gap = ga.data.data() + r * cols;
            for (int64_t c = 0; c < cols; ++c) gap[c] += yp[c] * (gp[c] - dot);
        }
    });
}

// ---- shape ops ----

template <class S>
int reshape(Tape<S>& t, int a, std::vector<int64_t> shape) {
    Tensor<S> out = t.val(a).reshaped(shape);
    return t.push(std::move(out), [a](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>& ga = tp.grad(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga[i] += g[i];
    });
}

// out[i] = in[idx[i]]; idx may repeat entries (tiling); backward scatters.
template <class S>
int gather(Tape<S>& t, int a, std::shared_ptr<const std::vector<int64_t>> idx, std::vector<int64_t> out_shape) {
    Tensor<S> out(out_shape);
    const Tensor<S>& A = t.val(a);
    for (int64_t i = 0; i < out.numel(); ++i) out[i] = A[(*idx)[size_t(i)]];
    return t.push(std::move(out), [a, idx](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>& ga = tp.grad(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga[(*idx)[size_t(i)]] += g[i];
    });
}

// x[N,C,H,W] channel slice [c0,c1)
template <class S>
int slice_channels(Tape<S>& t, int a, int64_t c0, int64_t c1) {
    const Tensor<S>& A = t.val(a);
    int64_t N = A.dim(0), C = A.dim(1), HW = A.dim(2) * A.dim(3);
    Tensor<S> out({N, c1 - c0, A.dim(2), A.dim(3)});
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = c0; c < c1; ++c)
            for (int64_t p = 0; p < HW; ++p) out[(n * (c1 - c0) + (c - c0)) * HW + p] = A[(n * C + c) * HW + p];
    return t.push(std::move(out), [a, c0, c1, N, C, HW](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>& ga = tp.grad(a);
        for (int64_t n = 0; n < N; ++n)
            for (int64_t c = c0; c < c1; ++c)
                for (int64_t p = 0; p < HW; ++p) ga[(n * C + c) * HW + p] += g[(n * (c1 - c0) + (c - c0)) * HW + p];
    });
}

template <class S>
int concat_channels(Tape<S>& t, int a, int b) {
    const Tensor<S>&A = t.val(a), &B = t.val(b);
    int64_t N = A.dim(0), Ca = A.dim(1), Cb = B.dim(1), HW = A.dim(2) * A.dim(3);
    if (B.dim(0) != N || B.dim(2) != A.dim(2) || B.dim(3) != A.dim(3))
        throw std::invalid_argument("concat_channels: shape mismatch");
    Tensor<S> out({N, Ca + Cb, A.dim(2), A.dim(3)});
    for (int64_t n = 0; n < N; ++n) {
        for (int64_t c = 0; c < Ca; ++c)
            for (int64_t p = 0; p < HW; ++p) out[(n * (Ca + Cb) + c) * HW + p] = A[(n * Ca + c) * HW + p];
        for (int64_t c = 0; c < Cb; ++c)
            for (int64_t p = 0; p < HW; ++p) out[(n * (Ca + Cb) + Ca + c) * HW + p] = B[(n * Cb + c) * HW + p];
    }
    return t.push(std::move(out), [a, b, N, Ca, Cb, HW](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>&ga = tp.grad(a), &gb = tp.grad(b);
        for (int64_t n = 0; n < N; ++n) {
            for (int64_t c = 0; c < Ca; ++c)
                for (int64_t p = 0; p < HW; ++p) ga[(n * Ca + c) * HW + p] += g[(n * (Ca + Cb) + c) * HW + p];
            for (int64_t c = 0; c < Cb; ++c)
                for (int64_t p = 0; p < HW; ++p) gb[(n * Cb + c) * HW + p] += g[(n * (Ca + Cb) + Ca + c) * HW + p];
        }
    });
}

// bias[C] broadcast over x[N,C,H,W]
template <class S>
int add_channel_bias(Tape<S>& t, int x, int bias) {
    const Tensor<S>&X = t.val(x), &B = t.val(bias);
    int64_t N = X.dim(0), C = X.dim(1), HW = X.dim(2) * X.dim(3);
    if (B.numel() != C) throw std::invalid_argument("add_channel_bias: width mismatch");
    Tensor<S> out = X;
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c)
            for (int64_t p = 0; p < HW; ++p) out[(n * C + c) * HW + p] += B[c];
    return t.push(std::move(out), [x, bias, N, C, HW](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>&gx = tp.grad(x), &gb = tp.grad(bias);
        for (int64_t i = 0; i < g.numel(); ++i) gx[i] += g[i];
        for (int64_t n = 0; n < N; ++n)
            for (int64_t c = 0; c < C; ++c)
                for (int64_t p = 0; p < HW; ++p) gb[c] += g[(n * C + c) * HW + p];
    });
}

// add pe rows 0..T-1 to tokens x[B,T,C]; pe is [Lmax,C]
template <class S>
int add_position_encoding(Tape<S>& t, int x, int pe) {
    const Tensor<S>&X = t.val(x), &P = t.val(pe);
    int64_t Bn = X.dim(0), T = X.dim(1), C = X.dim(2);
    if (P.dim(0) < T || P.dim(1) != C) throw std::invalid_argument("add_position_encoding: length/width mismatch");
    Tensor<S> out = X;
    for (int64_t b = 0; b < Bn; ++b)
        for (int64_t f = 0; f < T; ++f)
            for (int64_t c = 0; c < C; ++c) out[(b * T + f) * C + c] += P[f * C + c];
    return t.push(std::move(out), [x, pe, Bn, T, C](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>&gx = tp.grad(x), &gp = tp.grad(pe);
        for (int64_t i = 0; i < g.numel(); ++i) gx[i] += g[i];
        for (int64_t b = 0; b < Bn; ++b)
            for (int64_t f = 0; f < T; ++f)
                for (int64_t c = 0; c < C; ++c) gp[f * C + c] += g[(b * T + f) * C + c];
    });
}

// ---- conv ----

// x[N,Cin,H,W], w[Cout,Cin,kh,kw], bias[Cout]; zero padding
template <class S>
int conv2d(Tape<S>& t, int x, int w, int bias, int stride, int pad) {
    const Tensor<S>&X = t.val(x), &W = t.val(w), &B = t.val(bias);
    int64_t N = X.dim(0), Cin = X.dim(1), H = X.dim(2), Wd = X.dim(3);
    int64_t Cout = W.dim(0), kh = W.dim(2), kw = W.dim(3);
    if (W.dim(1) != Cin) throw std::invalid_argument("conv2d: channel mismatch");
    int64_t Ho = (H + 2 * pad - kh) / stride + 1, Wo = (Wd + 2 * pad - kw) / stride + 1;
    Tensor<S> out({N, Cout, Ho, Wo});
    for (int64_t n = 0; n < N; ++n)
        for (int64_t co = 0; co < Cout; ++co)
            for (int64_t oy = 0; oy < Ho; ++oy)
                for (int64_t ox = 0; ox < Wo; ++ox) {
                    S acc = B[co];
                    for (int64_t ci = 0; ci < Cin; ++ci)
                        for (int64_t ky = 0; ky < kh; ++ky) {
                            int64_t iy = oy * stride + ky - pad;
                            if (iy < 0 || iy >= H) continue;
                            for (int64_t kx = 0; kx < kw; ++kx) {
                                int64_t ix = ox * stride + kx - pad;
                                if (ix < 0 || ix >= Wd) continue;
                                acc += X[((n * Cin + ci) * H + iy) * Wd + ix] *
                                       W[((co * Cin + ci) * kh + ky) * kw + kx];
                            }
                        }
                    out[((n * Cout + co) * Ho + oy) * Wo + ox] = acc;
                }
    return t.push(std::move(out), [x, w, bias, stride, pad, N, Cin, H, Wd, Cout, kh, kw, Ho, Wo](Tape<S>& tp,
                                                                                                 int self) {
        const Tensor<S>& g = tp.grad(self);
        const Tensor<S>&X = tp.val(x), &W = tp.val(w);
        Tensor<S>&gx = tp.grad(x), &gw = tp.grad(w), &gb = tp.grad(bias);
        for (int64_t n = 0; n < N; ++n)
            for (int64_t co = 0; co < Cout; ++co)
                for (int64_t oy = 0; oy < Ho; ++oy)
                    for (int64_t ox = 0; ox < Wo; ++ox) {
                        S go = g[((n * Cout + co) * Ho + oy) * Wo + ox];
                        if (go == S(0)) continue;
                        gb[co] += go;
                        for (int64_t ci = 0; ci < Cin; ++ci)
                            for (int64_t ky = 0; ky < kh; ++ky) {
                                int64_t iy = oy * stride + ky - pad;
                                if (iy < 0 || iy >= H) continue;
                                for (int64_t kx = 0; kx < kw; ++kx) {
                                    int64_t ix = ox * stride + kx - pad;
                                    if (ix < 0 || ix >= Wd) continue;
                                    gx[((n * Cin + ci) * H + iy) * Wd + ix] +=
                                        go * W[((co * Cin + ci) * kh + ky) * kw + kx];
                                    gw[((co * Cin + ci) * kh + ky) * kw + kx] +=
                                        go * X[((n * Cin + ci) * H + iy) * Wd + ix];
                                }
                            }
                    }
    });
}

template <class S>
int upsample_nearest2x(Tape<S>& t, int x) {
    const Tensor<S>& X = t.val(x);
    int64_t N = X.dim(0), C = X.dim(1), H = X.dim(2), W = X.dim(3);
    Tensor<S> out({N, C, H * 2, W * 2});
    for (int64_t nc = 0; nc < N * C; ++nc)
        for (int64_t y = 0; y < H * 2; ++y)
            for (int64_t xw = 0; xw < W * 2; ++xw)
                out[(nc * H * 2 + y) * W * 2 + xw] = X[(nc * H + y / 2) * W + xw / 2];
    return t.push(std::move(out), [x, N, C, H, W](Tape<S>& tp, int self) {
        const Tensor<S>& g = tp.grad(self);
        Tensor<S>& gx = tp.grad(x);
        for (int64_t nc = 0; nc < N * C; ++nc)
            for (int64_t y = 0; y < H * 2; ++y)
                for (int64_t xw = 0; xw < W * 2; ++xw)
                    gx[(nc * H + y / 2) * W + xw / 2] += g[(nc * H * 2 + y) * W * 2 + xw];
    });
}

// ---- reductions ----

template <class S>
int sum(Tape<S>& t, int a) {
    // accumulate in double so float-mode losses stay FD-friendly
    double acc = 0.0;
    for (S v : t.val(a).data) acc += double(v);
    Tensor<S> out({1});
    out[0] = S(acc);
    return t.push(std::move(out), [a](Tape<S>& tp, int self) {
        S g = tp.grad(self)[0];
        Tensor<S>& ga = tp.grad(a);
        for (int64_t i = 0; i < ga.numel(); ++i) ga[i] += g;
    });
}

template <class S>
int mean(Tape<S>& t, int a) {
    int64_t n = t.val(a).numel();
    return scale(t, sum(t, a), S(1) / S(n));
}

template <class S>
int mse(Tape<S>& t, int a, int b) {
    int d = sub(t, a, b);
    return mean(t, mul(t, d, d));
}

}  // namespace vidgen

#endif  // VIDGEN_TAPE_HPP
