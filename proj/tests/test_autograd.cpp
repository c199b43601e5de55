#include <doctest.h>

#include <functional>

#include "hypsam/core/rng.hpp"
#include "hypsam/nn/modules.hpp"
#include "hypsam/nn/ops.hpp"

using namespace hypsam;
using nn::Var;

namespace {

Tensor<double> rand_t(Shape s, Rng& rng, double lo = -1, double hi = 1) {
    Tensor<double> t(std::move(s));
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

// builds the graph twice per probed coordinate and compares the analytic
// gradient of a scalar output against central differences
void gradcheck(const std::vector<Tensor<double>>& inputs,
               const std::function<Var<double>(const std::vector<Var<double>>&)>& build,
               double h = 1e-6, double tol = 1e-5, int probes_per_input = 8) {
    std::vector<Var<double>> vars;
    for (const auto& t : inputs) vars.push_back(nn::make_var(t, true));
    auto out = build(vars);
    REQUIRE(out->value.numel() == 1);
    nn::backward(out);

    Rng pick(123);
    for (size_t vi = 0; vi < inputs.size(); ++vi) {
        for (int probe = 0; probe < probes_per_input; ++probe) {
            int64_t i = pick.uniform_int(0, static_cast<int>(inputs[vi].numel() - 1));
            auto eval = [&](double delta) {
                std::vector<Var<double>> vs;
                for (size_t k = 0; k < inputs.size(); ++k) {
                    Tensor<double> t = inputs[k];
                    if (k == vi) t[i] += delta;
                    vs.push_back(nn::make_var(t, false));
                }
                return build(vs)->value[0];
            };
            double fd = (eval(h) - eval(-h)) / (2 * h);
            double an = vars[vi]->grad[i];
            CHECK(an == doctest::Approx(fd).epsilon(tol).scale(1.0));
        }
    }
}

}  // namespace

TEST_CASE("elementwise and reduction gradients") {
    Rng rng(1);
    auto a = rand_t({2, 3}, rng, 0.2, 2.0);
    auto b = rand_t({2, 3}, rng, 0.5, 2.0);
    gradcheck({a, b}, [](const std::vector<Var<double>>& v) {
        auto x = nn::mul(nn::add(v[0], v[1]), nn::div(v[0], v[1]));
        return nn::mean_all(nn::mul(x, x));
    });
    gradcheck({a}, [](const std::vector<Var<double>>& v) {
        return nn::sum_all(nn::sigmoid(nn::scale(v[0], 1.7)));
    });
    gradcheck({a}, [](const std::vector<Var<double>>& v) {
        return nn::mean_all(nn::log_op(nn::add_scalar(nn::relu(v[0]), 0.3)));
    });
}

TEST_CASE("softmax rows: sums to one and gradient checks") {
    Rng rng(2);
    auto a = rand_t({4, 5}, rng, -3, 3);
    auto v = nn::make_var(a, true);
    auto s = nn::softmax_rows(v);
    for (int r = 0; r < 4; ++r) {
        double sum = 0;
        for (int c = 0; c < 5; ++c) sum += s->value[r * 5 + c];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    gradcheck({a}, [](const std::vector<Var<double>>& vv) {
        auto sm = nn::softmax_rows(vv[0]);
        return nn::mean_all(nn::mul(sm, sm));
    });
}

TEST_CASE("linear gradient") {
    Rng rng(3);
    auto x = rand_t({3, 4}, rng);
    auto w = rand_t({2, 4}, rng);
    auto b = rand_t({2}, rng);
    gradcheck({x, w, b}, [](const std::vector<Var<double>>& v) {
        auto y = nn::linear(v[0], v[1], v[2]);
        return nn::mean_all(nn::mul(y, y));
    });
}

TEST_CASE("conv2d autograd gradient") {
    Rng rng(4);
    auto x = rand_t({2, 2, 5, 5}, rng);
    auto w = rand_t({3, 2, 3, 3}, rng);
    auto b = rand_t({3}, rng);
    gradcheck({x, w, b}, [](const std::vector<Var<double>>& v) {
        auto y = nn::conv2d(v[0], v[1], v[2], 1, 1);
        return nn::mean_all(nn::mul(y, y));
    });
}

TEST_CASE("gap, upsample, concat gradients") {
    Rng rng(5);
    auto x = rand_t({2, 3, 4, 4}, rng);
    auto y = rand_t({2, 2, 4, 4}, rng);
    gradcheck({x}, [](const std::vector<Var<double>>& v) {
        return nn::mean_all(nn::mul(nn::gap2d(v[0]), nn::gap2d(v[0])));
    });
    gradcheck({x}, [](const std::vector<Var<double>>& v) {
        auto up = nn::upsample_bilinear(v[0], 7, 9);
        return nn::mean_all(nn::mul(up, up));
    });
    gradcheck({x, y}, [](const std::vector<Var<double>>& v) {
        auto c = nn::concat_channels<double>({v[0], v[1]});
        return nn::mean_all(nn::mul(c, c));
    });
}

TEST_CASE("per-sample conv and dynamic kernel assembly gradients") {
    Rng rng(6);
    auto x = rand_t({2, 2, 4, 4}, rng);
    auto w = rand_t({2, 3, 2, 3, 3}, rng);
    gradcheck({x, w}, [](const std::vector<Var<double>>& v) {
        auto y = nn::conv2d_per_sample(v[0], v[1], 1);
        return nn::mean_all(nn::mul(y, y));
    });

    int N = 2, Co = 2, Ci = 2, k = 3, B = 2;
    auto bank = rand_t({N, Co, Ci, k, k}, rng);
    auto aw = rand_t({B, N}, rng, 0.1, 1.0);
    auto af = rand_t({B, N, Co}, rng, 0.1, 1.0);
    auto ac = rand_t({B, N, Ci}, rng, 0.1, 1.0);
    auto as_ = rand_t({B, N, k, k}, rng, 0.1, 1.0);
    gradcheck({bank, aw, af, ac, as_}, [](const std::vector<Var<double>>& v) {
        auto eff = nn::assemble_dynamic_kernel(v[0], v[1], v[2], v[3], v[4]);
        return nn::mean_all(nn::mul(eff, eff));
    });
}

TEST_CASE("batchnorm training gradient and eval determinism") {
    Rng rng(7);
    auto x = rand_t({3, 2, 3, 3}, rng);
    auto gamma = rand_t({2}, rng, 0.5, 1.5);
    auto beta = rand_t({2}, rng, -0.5, 0.5);
    gradcheck(
        {x, gamma, beta},
        [](const std::vector<Var<double>>& v) {
            auto y = nn::batchnorm2d(v[0], v[1], v[2], static_cast<Tensor<double>*>(nullptr),
                                     static_cast<Tensor<double>*>(nullptr), true);
            return nn::mean_all(nn::mul(y, y));
        },
        1e-6, 1e-4);

    Tensor<double> rm(Shape{2}, 0.1), rv(Shape{2}, 0.9);
    auto vx = nn::make_var(x, false);
    auto vg = nn::make_var(gamma, false);
    auto vb = nn::make_var(beta, false);
    auto y1 = nn::batchnorm2d(vx, vg, vb, &rm, &rv, false);
    auto y2 = nn::batchnorm2d(vx, vg, vb, &rm, &rv, false);
    for (int64_t i = 0; i < y1->value.numel(); ++i) CHECK(y1->value[i] == y2->value[i]);
}

TEST_CASE("no-grad mode builds no graph") {
    Rng rng(8);
    auto x = nn::make_var(rand_t({2, 2}, rng), true);
    nn::NoGrad ng;
    auto y = nn::mul(x, x);
    CHECK_FALSE(y->requires_grad);
    CHECK(y->inputs.empty());
}

TEST_CASE("reshape round-trips values and gradients") {
    Rng rng(9);
    auto a = rand_t({2, 6}, rng);
    gradcheck({a}, [](const std::vector<Var<double>>& v) {
        auto r = nn::reshape(v[0], Shape{2, 2, 3});
        return nn::mean_all(nn::mul(r, r));
    });
}
