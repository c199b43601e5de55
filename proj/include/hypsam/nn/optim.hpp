#pragma once

#include <cmath>
#include <numbers>

#include "hypsam/nn/modules.hpp"

namespace hypsam::nn {

// SGD with momentum and weight decay; two lr groups (backbone / rest) with a
// shared cosine schedule over total steps.
class SgdOptimizer {
public:
    SgdOptimizer(const ParamRegistry& reg, double lr_backbone, double lr_head, double momentum,
                 double weight_decay, int64_t total_steps)
        : reg_(reg),
          lr_backbone_(lr_backbone),
          lr_head_(lr_head),
          momentum_(momentum),
          weight_decay_(weight_decay),
          total_steps_(total_steps) {
        velocity_.reserve(reg.params.size());
        for (const auto& p : reg.params) velocity_.emplace_back(p.param->value.shape);
    }

    double lr_at(int64_t step, double base) const {
        if (total_steps_ <= 1) return base;
        double t = static_cast<double>(step) / static_cast<double>(total_steps_);
        if (t > 1.0) t = 1.0;
        return base * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }

    double current_lr() const { return lr_at(step_, lr_head_); }

    void zero_grad() {
        for (const auto& p : reg_.params) p.param->zero_grad();
    }

    void step() {
        double lr_b = lr_at(step_, lr_backbone_);
        double lr_h = lr_at(step_, lr_head_);
        for (size_t i = 0; i < reg_.params.size(); ++i) {
            const auto& p = reg_.params[i];
            if (p.param->grad.shape != p.param->value.shape) continue;  // never touched
            double lr = p.backbone ? lr_b : lr_h;
            real* w = p.param->value.ptr();
            real* g = p.param->grad.ptr();
            real* v = velocity_[i].ptr();
            int64_t n = p.param->value.numel();
            for (int64_t j = 0; j < n; ++j) {
                real d = g[j] + static_cast<real>(weight_decay_) * w[j];
                v[j] = static_cast<real>(momentum_) * v[j] + d;
                w[j] -= static_cast<real>(lr) * v[j];
            }
        }
        ++step_;
    }

private:
    const ParamRegistry& reg_;
    double lr_backbone_, lr_head_, momentum_, weight_decay_;
    int64_t total_steps_;
    int64_t step_ = 0;
    std::vector<Tensor<real>> velocity_;
};

}  // namespace hypsam::nn
