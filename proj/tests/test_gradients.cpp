#include <doctest.h>

#include <cmath>
#include <vector>

#include "model/net.h"
#include "test_util.h"

using namespace dualray;

namespace {

ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.latent_d = 4;
    cfg.model_dim = 24;
    cfg.depth = 2;
    cfg.heads = 2;
    return cfg;
}

TokenSequence random_sequence(Rng& rng, int t, int h, int w, int d) {
    auto fill = [&rng](Grid4f& g) {
        for (float& x : g.data) x = float(rng.uniform(-0.8, 0.8));
    };
    Grid4f vx(t, h, w, d), px(t, h, w, 2 * d), vy(t, h, w, d), py(t, h, w, 2 * d);
    fill(vx);
    fill(px);
    fill(vy);
    fill(py);
    return assemble_tokens(vx, px, vy, py);
}

void randomize_params(Params<double>& p, uint64_t seed, double amp = 0.08) {
    Rng rng(seed);
    visit_params(p, [&](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-amp, amp);
    });
}

}  // namespace

TEST_CASE("reverse-mode gradients match central differences") {
    ModelConfig cfg = tiny_config();
    Params<double> p;
    shape_params(p, cfg);
    randomize_params(p, 2024);

    Rng rng(55);
    TokenSequence seq = random_sequence(rng, 2, 2, 2, cfg.latent_d);
    double sigma = 0.37;
    MatRM<double> target(8, cfg.latent_d);
    for (Eigen::Index i = 0; i < target.size(); ++i)
        target.data()[i] = rng.uniform(-0.5, 0.5);

    Params<double> grad;
    shape_params(grad, cfg);
    net_loss_grad(p, seq, sigma, target, grad);

    std::vector<double> flat, gflat;
    params_to_flat(p, flat);
    params_to_flat(grad, gflat);
    REQUIRE(flat.size() == gflat.size());

    const double h = 1e-4;
    Params<double> probe;
    shape_params(probe, cfg);
    for (int trial = 0; trial < 50; ++trial) {
        size_t i = rng.uniform_index(flat.size());
        std::vector<double> bump = flat;
        bump[i] = flat[i] + h;
        params_from_flat(probe, bump);
        double lp = (net_forward(probe, seq, sigma) - target).squaredNorm();
        bump[i] = flat[i] - h;
        params_from_flat(probe, bump);
        double lm = (net_forward(probe, seq, sigma) - target).squaredNorm();

        double count = double(target.size());
        double fd = (lp - lm) / (2 * h) / count;
        double an = gflat[i];
        double rel = std::abs(fd - an) / std::max(1e-8, std::max(std::abs(fd), std::abs(an)));
        bool ok = rel < 1e-4 || std::abs(fd - an) < 1e-12;
        CHECK(ok);
        if (!ok)
            MESSAGE("coord ", i, " fd ", fd, " analytic ", an, " rel ", rel);
    }
}

TEST_CASE("gradient vanishes at a perfect prediction") {
    ModelConfig cfg = tiny_config();
    Params<double> p;
    shape_params(p, cfg);
    randomize_params(p, 7);

    Rng rng(8);
    TokenSequence seq = random_sequence(rng, 2, 2, 2, cfg.latent_d);
    MatRM<double> target = net_forward(p, seq, 0.2);

    Params<double> grad;
    shape_params(grad, cfg);
    double loss = net_loss_grad(p, seq, 0.2, target, grad);
    CHECK(loss == 0.0);

    double peak = 0;
    visit_params(grad, [&peak](const auto& t) {
        if (t.size() > 0) peak = std::max(peak, double(t.cwiseAbs().maxCoeff()));
    });
    CHECK(peak <= 1e-10);
}

TEST_CASE("backprop is linear in the output error") {
    ModelConfig cfg = tiny_config();
    Params<double> p;
    shape_params(p, cfg);
    randomize_params(p, 9);

    Rng rng(10);
    TokenSequence seq = random_sequence(rng, 2, 2, 2, cfg.latent_d);
    MatRM<double> out = net_forward(p, seq, 0.6);
    MatRM<double> target(out.rows(), out.cols());
    for (Eigen::Index i = 0; i < target.size(); ++i)
        target.data()[i] = rng.uniform(-0.5, 0.5);
    // Reflecting the target through the output doubles every residual.
    MatRM<double> target2 = 2.0 * target - out;

    Params<double> g1, g2;
    shape_params(g1, cfg);
    shape_params(g2, cfg);
    double l1 = net_loss_grad(p, seq, 0.6, target, g1);
    double l2 = net_loss_grad(p, seq, 0.6, target2, g2);
    CHECK(l2 == doctest::Approx(4.0 * l1).epsilon(1e-9));

    std::vector<double> f1, f2;
    params_to_flat(g1, f1);
    params_to_flat(g2, f2);
    for (size_t i = 0; i < f1.size(); ++i) {
        double want = 2.0 * f1[i];
        CHECK(std::abs(f2[i] - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("loss grad rejects a mismatched target") {
    ModelConfig cfg = tiny_config();
    Params<double> p;
    shape_params(p, cfg);
    randomize_params(p, 11);
    Rng rng(12);
    TokenSequence seq = random_sequence(rng, 2, 2, 2, cfg.latent_d);
    MatRM<double> target(7, cfg.latent_d);
    target.setZero();
    Params<double> grad;
    shape_params(grad, cfg);
    CHECK_THROWS_AS(net_loss_grad(p, seq, 0.1, target, grad), DataError);
}
