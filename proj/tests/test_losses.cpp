#include <doctest.h>

#include <cmath>

#include "hypsam/core/rng.hpp"
#include "hypsam/losses/losses.hpp"

using namespace hypsam;
using nn::Var;

namespace {

Tensor<double> rand_map(int h, int w, Rng& rng, double lo = 0.0, double hi = 1.0) {
    Tensor<double> t(Shape{h, w});
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

Tensor<double> rand_binary(int h, int w, Rng& rng, double p = 0.4) {
    Tensor<double> t(Shape{h, w});
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    return t;
}

double bce_oracle(const Tensor<double>& p, const Tensor<double>& g, double eps) {
    double acc = 0;
    for (int64_t i = 0; i < p.numel(); ++i) {
        double v = std::min(1.0 - eps, std::max(eps, p[i]));
        acc += -(g[i] * std::log(v) + (1.0 - g[i]) * std::log(1.0 - v));
    }
    return acc / static_cast<double>(p.numel());
}

double iou_oracle(const Tensor<double>& p, const Tensor<double>& g) {
    double inter = 0, sum = 0;
    for (int64_t i = 0; i < p.numel(); ++i) {
        inter += p[i] * g[i];
        sum += p[i] + g[i];
    }
    return 1.0 - (inter + 1.0) / (sum - inter + 1.0);
}

double dice_oracle(const Tensor<double>& p, const Tensor<double>& g) {
    double inter = 0, sum = 0;
    for (int64_t i = 0; i < p.numel(); ++i) {
        inter += p[i] * g[i];
        sum += p[i] + g[i];
    }
    return 1.0 - (2.0 * inter + 1.0) / (sum + 1.0);
}

}  // namespace

TEST_CASE("bce loss: perfect, maximum-entropy, oracle") {
    Rng rng(21);
    auto g = rand_binary(8, 8, rng);
    auto lv = losses::bce_loss(nn::constant(g), nn::constant(g), 1e-7);
    CHECK(lv->value[0] <= 1e-6);

    Tensor<double> half(Shape{8, 8}, 0.5);
    auto l2 = losses::bce_loss(nn::constant(half), nn::constant(g));
    CHECK(l2->value[0] == doctest::Approx(std::log(2.0)).epsilon(1e-9));

    auto p = rand_map(8, 8, rng);
    auto l3 = losses::bce_loss(nn::constant(p), nn::constant(g), 1e-7);
    CHECK(l3->value[0] == doctest::Approx(bce_oracle(p, g, 1e-7)).epsilon(1e-6));
}

TEST_CASE("ssim loss: self-similarity, inverted, range") {
    Rng rng(22);
    auto g = rand_map(16, 16, rng);
    auto l = losses::ssim_loss(nn::constant(g), nn::constant(g));
    CHECK(l->value[0] == doctest::Approx(0.0).epsilon(1e-6));

    // half-black / half-white image vs its inversion
    Tensor<double> a(Shape{16, 16}), b(Shape{16, 16});
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            a[y * 16 + x] = x < 8 ? 0.0 : 1.0;
            b[y * 16 + x] = x < 8 ? 1.0 : 0.0;
        }
    auto linv = losses::ssim_loss(nn::constant(b), nn::constant(a));
    CHECK(linv->value[0] > 0.9);

    for (int trial = 0; trial < 5; ++trial) {
        auto p = rand_map(12, 12, rng);
        auto q = rand_map(12, 12, rng);
        double v = losses::ssim_loss(nn::constant(p), nn::constant(q))->value[0];
        CHECK(v >= 0.0);
        CHECK(v <= 2.0);
    }
}

TEST_CASE("iou and dice: closed forms and oracle") {
    Rng rng(23);
    auto g = rand_binary(8, 8, rng);
    CHECK(losses::iou_loss(nn::constant(g), nn::constant(g))->value[0] ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(losses::dice_loss(nn::constant(g), nn::constant(g))->value[0] ==
          doctest::Approx(0.0).epsilon(1e-9));

    double m = 0;
    for (int64_t i = 0; i < g.numel(); ++i) m += g[i];
    Tensor<double> zero(Shape{8, 8}, 0.0);
    CHECK(losses::iou_loss(nn::constant(zero), nn::constant(g))->value[0] ==
          doctest::Approx(1.0 - 1.0 / (m + 1.0)).epsilon(1e-12));
    CHECK(losses::dice_loss(nn::constant(zero), nn::constant(g))->value[0] ==
          doctest::Approx(1.0 - 1.0 / (m + 1.0)).epsilon(1e-12));

    auto p = rand_map(8, 8, rng);
    CHECK(losses::iou_loss(nn::constant(p), nn::constant(g))->value[0] ==
          doctest::Approx(iou_oracle(p, g)).epsilon(1e-6));
    CHECK(losses::dice_loss(nn::constant(p), nn::constant(g))->value[0] ==
          doctest::Approx(dice_oracle(p, g)).epsilon(1e-6));
}

TEST_CASE("hybrid equals bce + ssim + iou exactly") {
    Rng rng(24);
    auto p = rand_map(10, 10, rng);
    auto g = rand_binary(10, 10, rng);
    auto vp = nn::constant(p);
    auto vg = nn::constant(g);
    double hybrid = losses::hybrid_loss(vp, vg)->value[0];
    double parts = losses::bce_loss(vp, vg)->value[0] + losses::ssim_loss(vp, vg)->value[0] +
                   losses::iou_loss(vp, vg)->value[0];
    CHECK(hybrid == parts);
}

TEST_CASE("total loss: perfect prediction, exact sum, nonnegative terms") {
    Rng rng(25);
    auto g = rand_binary(12, 12, rng);
    auto bnd = rand_binary(12, 12, rng, 0.15);
    auto vg = nn::constant(g);
    auto vb = nn::constant(bnd);
    auto lt = losses::total_loss(vg, vg, vg, vb, vg, vg, vb);
    CHECK(lt.total->value[0] <= 1e-5);

    auto p1 = nn::constant(rand_map(12, 12, rng));
    auto p2 = nn::constant(rand_map(12, 12, rng));
    auto p3 = nn::constant(rand_map(12, 12, rng));
    auto p4 = nn::constant(rand_map(12, 12, rng));
    auto p5 = nn::constant(rand_map(12, 12, rng));
    auto lt2 = losses::total_loss(p1, p2, p3, p4, p5, vg, vb);
    double manual =
        (((lt2.l_r->value[0] + lt2.l_t->value[0]) + lt2.l_m->value[0]) + lt2.l_b->value[0]) +
        lt2.l_f->value[0];
    CHECK(lt2.total->value[0] == manual);
    CHECK(lt2.l_r->value[0] >= 0.0);
    CHECK(lt2.l_t->value[0] >= 0.0);
    CHECK(lt2.l_m->value[0] >= 0.0);
    CHECK(lt2.l_b->value[0] >= 0.0);
    CHECK(lt2.l_f->value[0] >= 0.0);
}

TEST_CASE("analytic gradients match central differences for every loss") {
    Rng rng(26);
    const double h = 1e-5;
    auto g = rand_binary(4, 4, rng);
    auto p0 = rand_map(4, 4, rng, 0.05, 0.95);

    struct Case {
        const char* name;
        std::function<double(const Var<double>&, const Var<double>&)> eval;
    };
    std::vector<Case> cases = {
        {"bce", [](const Var<double>& p, const Var<double>& gg) {
             return losses::bce_loss(p, gg)->value[0];
         }},
        {"ssim", [](const Var<double>& p, const Var<double>& gg) {
             return losses::ssim_loss(p, gg)->value[0];
         }},
        {"iou", [](const Var<double>& p, const Var<double>& gg) {
             return losses::iou_loss(p, gg)->value[0];
         }},
        {"dice", [](const Var<double>& p, const Var<double>& gg) {
             return losses::dice_loss(p, gg)->value[0];
         }},
    };

    for (const auto& c : cases) {
        CAPTURE(c.name);
        auto vp = nn::make_var(p0, true);
        auto vg = nn::constant(g);
        Var<double> loss;
        if (std::string(c.name) == "bce") loss = losses::bce_loss(vp, vg);
        if (std::string(c.name) == "ssim") loss = losses::ssim_loss(vp, vg);
        if (std::string(c.name) == "iou") loss = losses::iou_loss(vp, vg);
        if (std::string(c.name) == "dice") loss = losses::dice_loss(vp, vg);
        nn::backward(loss);
        Rng pick(31);
        for (int t = 0; t < 12; ++t) {
            int64_t i = pick.uniform_int(0, static_cast<int>(p0.numel() - 1));
            Tensor<double> pp = p0, pm = p0;
            pp[i] += h;
            pm[i] -= h;
            double fd =
                (c.eval(nn::constant(pp), vg) - c.eval(nn::constant(pm), vg)) / (2 * h);
            CHECK(vp->grad[i] == doctest::Approx(fd).epsilon(1e-3));
        }
    }
}

TEST_CASE("gradient descent step on total loss never increases it") {
    Rng rng(27);
    for (int inst = 0; inst < 20; ++inst) {
        auto g = rand_binary(6, 6, rng);
        auto bnd = rand_binary(6, 6, rng, 0.2);
        std::vector<Tensor<double>> preds;
        for (int i = 0; i < 5; ++i) preds.push_back(rand_map(6, 6, rng, 0.05, 0.95));

        auto eval = [&](const std::vector<Tensor<double>>& ps, bool want_grad,
                        std::vector<Tensor<double>>* grads) {
            std::vector<Var<double>> vs;
            for (const auto& t : ps) vs.push_back(nn::make_var(t, want_grad));
            auto lt = losses::total_loss(vs[0], vs[1], vs[2], vs[3], vs[4], nn::constant(g),
                                         nn::constant(bnd));
            if (want_grad) {
                nn::backward(lt.total);
                grads->clear();
                for (const auto& v : vs) grads->push_back(v->grad);
            }
            return lt.total->value[0];
        };
        std::vector<Tensor<double>> grads;
        double before = eval(preds, true, &grads);
        double step = 1e-3;
        std::vector<Tensor<double>> moved = preds;
        for (size_t k = 0; k < moved.size(); ++k)
            for (int64_t i = 0; i < moved[k].numel(); ++i) moved[k][i] -= step * grads[k][i];
        double after = eval(moved, false, nullptr);
        CHECK(after <= before + 1e-12);
    }
}
