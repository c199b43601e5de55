#pragma once

#include "hypsam/nn/ops.hpp"

// Supervision terms: hybrid (BCE + SSIM + IoU) on the saliency branches and
// dice on the boundary branch. All differentiable through the autograd graph;
// templated so gradient checks can run in double precision.
namespace hypsam::losses {

using nn::Var;

template <class T>
Var<T> as_b1hw(const Var<T>& x) {
    if (x->value.ndim() == 4) return x;
    if (x->value.ndim() == 2)
        return nn::reshape(x, Shape{1, 1, x->value.dim(0), x->value.dim(1)});
    throw ShapeMismatch("loss input must be HxW or Bx1xHxW");
}

template <class T>
Var<T> bce_loss(const Var<T>& pred, const Var<T>& gt, T eps = T(1e-7)) {
    nn::check_same_shape(pred, gt, "bce_loss");
    auto p = nn::clamp(pred, eps, T(1) - eps);
    auto one_minus_p = nn::add_scalar(nn::scale(p, T(-1)), T(1));
    auto one_minus_g = nn::add_scalar(nn::scale(gt, T(-1)), T(1));
    auto ll = nn::add(nn::mul(gt, nn::log_op(p)), nn::mul(one_minus_g, nn::log_op(one_minus_p)));
    return nn::scale(nn::mean_all(ll), T(-1));
}

template <class T>
Tensor<T> gaussian_window(int k, T sigma) {
    Tensor<T> w(Shape{1, 1, k, k});
    int h = k / 2;
    T sum = T(0);
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) {
            T d2 = static_cast<T>((y - h) * (y - h) + (x - h) * (x - h));
            T v = std::exp(-d2 / (T(2) * sigma * sigma));
            w[y * k + x] = v;
            sum += v;
        }
    for (int64_t i = 0; i < w.numel(); ++i) w[i] /= sum;
    return w;
}

// 1 - mean SSIM with a Gaussian window (zero-padded, single channel).
template <class T>
Var<T> ssim_loss(const Var<T>& pred, const Var<T>& gt, int window = 11, T sigma = T(1.5)) {
    nn::check_same_shape(pred, gt, "ssim_loss");
    auto p = as_b1hw(pred);
    auto g = as_b1hw(gt);
    auto win = nn::constant(gaussian_window<T>(window, sigma));
    int pad = window / 2;
    const T c1 = T(0.01) * T(0.01);
    const T c2 = T(0.03) * T(0.03);

    auto mu_p = nn::conv2d(p, win, Var<T>{}, 1, pad);
    auto mu_g = nn::conv2d(g, win, Var<T>{}, 1, pad);
    auto mu_pg = nn::mul(mu_p, mu_g);
    auto mu_pp = nn::mul(mu_p, mu_p);
    auto mu_gg = nn::mul(mu_g, mu_g);
    auto var_p = nn::sub(nn::conv2d(nn::mul(p, p), win, Var<T>{}, 1, pad), mu_pp);
    auto var_g = nn::sub(nn::conv2d(nn::mul(g, g), win, Var<T>{}, 1, pad), mu_gg);
    auto cov = nn::sub(nn::conv2d(nn::mul(p, g), win, Var<T>{}, 1, pad), mu_pg);

    auto num = nn::mul(nn::add_scalar(nn::scale(mu_pg, T(2)), c1),
                       nn::add_scalar(nn::scale(cov, T(2)), c2));
    auto den = nn::mul(nn::add_scalar(nn::add(mu_pp, mu_gg), c1),
                       nn::add_scalar(nn::add(var_p, var_g), c2));
    auto ssim_map = nn::div(num, den);
    return nn::add_scalar(nn::scale(nn::mean_all(ssim_map), T(-1)), T(1));
}

// soft IoU with +1 smoothing, averaged per sample
template <class T>
Var<T> iou_loss(const Var<T>& pred, const Var<T>& gt) {
    nn::check_same_shape(pred, gt, "iou_loss");
    auto p = as_b1hw(pred);
    auto g = as_b1hw(gt);
    auto inter = nn::sum_per_sample(nn::mul(p, g));
    auto sums = nn::add(nn::sum_per_sample(p), nn::sum_per_sample(g));
    auto uni = nn::sub(sums, inter);
    auto frac = nn::div(nn::add_scalar(inter, T(1)), nn::add_scalar(uni, T(1)));
    return nn::add_scalar(nn::scale(nn::mean_all(frac), T(-1)), T(1));
}

template <class T>
Var<T> dice_loss(const Var<T>& pred, const Var<T>& gt) {
    nn::check_same_shape(pred, gt, "dice_loss");
    auto p = as_b1hw(pred);
    auto g = as_b1hw(gt);
    auto inter = nn::sum_per_sample(nn::mul(p, g));
    auto sums = nn::add(nn::sum_per_sample(p), nn::sum_per_sample(g));
    auto frac = nn::div(nn::add_scalar(nn::scale(inter, T(2)), T(1)), nn::add_scalar(sums, T(1)));
    return nn::add_scalar(nn::scale(nn::mean_all(frac), T(-1)), T(1));
}

template <class T>
Var<T> hybrid_loss(const Var<T>& pred, const Var<T>& gt) {
    return nn::add(nn::add(bce_loss(pred, gt), ssim_loss(pred, gt)), iou_loss(pred, gt));
}

template <class T>
struct LossTerms {
    Var<T> l_r, l_t, l_m, l_b, l_f;
    Var<T> total;
};

// Five-branch supervision: hybrid on R/T/M/fused vs the mask, dice on the
// boundary branch vs the boundary label.
template <class T>
LossTerms<T> total_loss(const Var<T>& sal_rgb, const Var<T>& sal_thermal,
                        const Var<T>& sal_mixed, const Var<T>& sal_boundary,
                        const Var<T>& sal_fused, const Var<T>& gt, const Var<T>& boundary_gt) {
    LossTerms<T> lt;
    lt.l_r = hybrid_loss(sal_rgb, gt);
    lt.l_t = hybrid_loss(sal_thermal, gt);
    lt.l_m = hybrid_loss(sal_mixed, gt);
    lt.l_b = dice_loss(sal_boundary, boundary_gt);
    lt.l_f = hybrid_loss(sal_fused, gt);
    lt.total = nn::add(nn::add(nn::add(nn::add(lt.l_r, lt.l_t), lt.l_m), lt.l_b), lt.l_f);
    return lt;
}

}  // namespace hypsam::losses
