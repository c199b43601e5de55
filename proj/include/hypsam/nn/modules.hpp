#pragma once

#include <string>
#include <vector>

#include "hypsam/core/rng.hpp"
#include "hypsam/nn/ops.hpp"

namespace hypsam::nn {

using real = float;
using RVar = Var<real>;

struct ParamInfo {
    std::string name;
    RVar param;
    bool backbone = false;  // lr group
};

struct BufferInfo {
    std::string name;
    Tensor<real>* buf;
};

struct ParamRegistry {
    std::vector<ParamInfo> params;
    std::vector<BufferInfo> buffers;

    void add(const std::string& name, const RVar& p, bool backbone = false) {
        params.push_back({name, p, backbone});
    }
    void add_buffer(const std::string& name, Tensor<real>* b) { buffers.push_back({name, b}); }

    int64_t param_count() const {
        int64_t n = 0;
        for (const auto& p : params) n += p.param->value.numel();
        return n;
    }
};

inline RVar new_param(Tensor<real> t) { return make_var(std::move(t), true); }

// Kaiming-normal for conv / linear weights feeding ReLU
inline Tensor<real> he_normal(const Shape& shape, int fan_in, Rng& rng) {
    Tensor<real> t(shape);
    double std = std::sqrt(2.0 / fan_in);
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = static_cast<real>(rng.normal(0.0, std));
    return t;
}

// batch normalization over (B,H,W) per channel; running stats live in the module
template <class T>
Var<T> batchnorm2d(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                   Tensor<T>* running_mean, Tensor<T>* running_var, bool training,
                   T momentum = T(0.1), T eps = T(1e-5)) {
    int B = x->value.dim(0), C = x->value.dim(1), H = x->value.dim(2), W = x->value.dim(3);
    int64_t hw = static_cast<int64_t>(H) * W;
    int64_t m = static_cast<int64_t>(B) * hw;
    Tensor<T> mean(Shape{C}), invstd(Shape{C});
    if (training) {
        for (int c = 0; c < C; ++c) {
            T acc = T(0);
            for (int b = 0; b < B; ++b) {
                const T* p = x->value.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                for (int64_t i = 0; i < hw; ++i) acc += p[i];
            }
            mean[c] = acc / static_cast<T>(m);
            T vacc = T(0);
            for (int b = 0; b < B; ++b) {
                const T* p = x->value.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                for (int64_t i = 0; i < hw; ++i) {
                    T d = p[i] - mean[c];
                    vacc += d * d;
                }
            }
            T var = vacc / static_cast<T>(m);
            invstd[c] = T(1) / std::sqrt(var + eps);
            if (running_mean && running_var) {
                T unbiased = m > 1 ? vacc / static_cast<T>(m - 1) : var;
                (*running_mean)[c] = (T(1) - momentum) * (*running_mean)[c] + momentum * mean[c];
                (*running_var)[c] = (T(1) - momentum) * (*running_var)[c] + momentum * unbiased;
            }
        }
    } else {
        for (int c = 0; c < C; ++c) {
            mean[c] = (*running_mean)[c];
            invstd[c] = T(1) / std::sqrt((*running_var)[c] + eps);
        }
    }
    Tensor<T> out(x->value.shape);
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c) {
            const T* p = x->value.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
            T* o = out.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
            T g = gamma->value[c], bt = beta->value[c], mu = mean[c], is = invstd[c];
            for (int64_t i = 0; i < hw; ++i) o[i] = (p[i] - mu) * is * g + bt;
        }
    return op_node(
        std::move(out), {x, gamma, beta},
        [x, gamma, beta, mean, invstd, training, B, C, hw, m](const Tensor<T>& g,
                                                              const Tensor<T>&) {
            // dgamma_c = sum dy*xhat ; dbeta_c = sum dy
            Tensor<T> dgamma(Shape{C}), dbeta(Shape{C});
            for (int c = 0; c < C; ++c) {
                T sg = T(0), sb = T(0);
                for (int b = 0; b < B; ++b) {
                    const T* gp = g.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                    const T* xp = x->value.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                    for (int64_t i = 0; i < hw; ++i) {
                        sg += gp[i] * (xp[i] - mean[c]) * invstd[c];
                        sb += gp[i];
                    }
                }
                dgamma[c] = sg;
                dbeta[c] = sb;
            }
            if (gamma->requires_grad) accumulate(gamma, dgamma);
            if (beta->requires_grad) accumulate(beta, dbeta);
            if (x->requires_grad) {
                Tensor<T> gx(x->value.shape);
#pragma omp parallel for collapse(2) schedule(static)
                for (int b = 0; b < B; ++b)
                    for (int c = 0; c < C; ++c) {
                        const T* gp = g.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                        const T* xp = x->value.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                        T* dp = gx.ptr() + (static_cast<int64_t>(b) * C + c) * hw;
                        T ga = gamma->value[c] * invstd[c];
                        if (training) {
                            T mg = dbeta[c] / static_cast<T>(m);
                            T mgx = dgamma[c] / static_cast<T>(m);
                            for (int64_t i = 0; i < hw; ++i) {
                                T xhat = (xp[i] - mean[c]) * invstd[c];
                                dp[i] = ga * (gp[i] - mg - xhat * mgx);
                            }
                        } else {
                            for (int64_t i = 0; i < hw; ++i) dp[i] = ga * gp[i];
                        }
                    }
                accumulate(x, gx);
            }
        });
}

class Conv2d {
public:
    Conv2d() = default;
    Conv2d(int cin, int cout, int k, int stride, int pad, bool bias, Rng& rng)
        : stride_(stride), pad_(pad) {
        weight_ = new_param(he_normal(Shape{cout, cin, k, k}, cin * k * k, rng));
        if (bias) bias_ = new_param(Tensor<real>(Shape{cout}));
    }

    RVar forward(const RVar& x) const { return conv2d(x, weight_, bias_, stride_, pad_); }

    void collect(const std::string& prefix, ParamRegistry& reg, bool backbone = false) const {
        reg.add(prefix + ".weight", weight_, backbone);
        if (bias_) reg.add(prefix + ".bias", bias_, backbone);
    }

    RVar weight() const { return weight_; }
    RVar bias() const { return bias_; }

private:
    RVar weight_, bias_;
    int stride_ = 1, pad_ = 0;
};

class BatchNorm2d {
public:
    BatchNorm2d() = default;
    explicit BatchNorm2d(int c) : running_mean_(Shape{c}, real(0)), running_var_(Shape{c}, real(1)) {
        gamma_ = new_param(Tensor<real>(Shape{c}, real(1)));
        beta_ = new_param(Tensor<real>(Shape{c}, real(0)));
    }

    RVar forward(const RVar& x, bool training) {
        return batchnorm2d(x, gamma_, beta_, &running_mean_, &running_var_, training);
    }

    void collect(const std::string& prefix, ParamRegistry& reg, bool backbone = false) {
        reg.add(prefix + ".gamma", gamma_, backbone);
        reg.add(prefix + ".beta", beta_, backbone);
        reg.add_buffer(prefix + ".running_mean", &running_mean_);
        reg.add_buffer(prefix + ".running_var", &running_var_);
    }

private:
    RVar gamma_, beta_;
    Tensor<real> running_mean_, running_var_;
};

// Conv + BatchNorm + ReLU
class CBR {
public:
    CBR() = default;
    CBR(int cin, int cout, int k, int stride, Rng& rng)
        : conv_(cin, cout, k, stride, k / 2, false, rng), bn_(cout) {}

    RVar forward(const RVar& x, bool training) {
        return relu(bn_.forward(conv_.forward(x), training));
    }

    void collect(const std::string& prefix, ParamRegistry& reg, bool backbone = false) {
        conv_.collect(prefix + ".conv", reg, backbone);
        bn_.collect(prefix + ".bn", reg, backbone);
    }

private:
    Conv2d conv_;
    BatchNorm2d bn_;
};

class Linear {
public:
    Linear() = default;
    Linear(int fin, int fout, Rng& rng) {
        // Xavier-uniform
        Tensor<real> w(Shape{fout, fin});
        double bound = std::sqrt(6.0 / (fin + fout));
        for (int64_t i = 0; i < w.numel(); ++i)
            w[i] = static_cast<real>(rng.uniform(-bound, bound));
        weight_ = new_param(std::move(w));
        bias_ = new_param(Tensor<real>(Shape{fout}));
    }

    RVar forward(const RVar& x) const { return linear(x, weight_, bias_); }

    void collect(const std::string& prefix, ParamRegistry& reg, bool backbone = false) const {
        reg.add(prefix + ".weight", weight_, backbone);
        reg.add(prefix + ".bias", bias_, backbone);
    }

    RVar weight() const { return weight_; }
    RVar bias() const { return bias_; }

private:
    RVar weight_, bias_;
};

}  // namespace hypsam::nn
