#include <cmath>

#include <gtest/gtest.h>

#include "foodscore/error.hpp"
#include "foodscore/network.hpp"
#include "gradcheck.hpp"

using namespace foodscore;

namespace {

ModelConfig small_config(std::size_t in = 10)
{
    ModelConfig c;
    c.input_dim = in;
    c.encoder_hidden = {8};
    c.embedding_dim = 4;
    c.head_hidden = {};
    c.dropout = 0.3;
    return c;
}

Eigen::MatrixXd random_inputs(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = rng.normal();
    }
    return x;
}

bool params_equal(const Parameters& a, const Parameters& b)
{
    if (!a.same_shape(b)) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].weight != b.layers[l].weight || a.layers[l].bias != b.layers[l].bias) return false;
    }
    return true;
}

} // namespace

TEST(Config, Widths)
{
    ModelConfig c;
    c.input_dim = 1426;
    EXPECT_EQ(c.layer_widths(), (std::vector<std::size_t>{1426, 1024, 768, 256, 256, 128, 1}));
    EXPECT_EQ(c.encoder_layer_count(), 3u);
    EXPECT_DOUBLE_EQ(c.dropout, 0.3);
    EXPECT_EQ(ModelConfig::from_json(c.to_json()), c);
    c.dropout = 1.0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Init, SeededAndGlorotBounded)
{
    const auto cfg = small_config();
    const auto a = init_params(cfg, 5);
    EXPECT_TRUE(params_equal(a, init_params(cfg, 5)));
    EXPECT_FALSE(params_equal(a, init_params(cfg, 6)));
    EXPECT_EQ(a.count(), 10u * 8 + 8 + 8 * 4 + 4 + 4 + 1);
    const double limit = std::sqrt(6.0 / 18.0);
    EXPECT_LE(a.layers[0].weight.cwiseAbs().maxCoeff(), limit);
    EXPECT_EQ(a.layers[0].bias.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forward, EvalDeterministic)
{
    const auto cfg = small_config();
    const auto p = init_params(cfg, 1);
    const auto x = random_inputs(10, 5, 2);
    EXPECT_EQ(forward(p, cfg, x, Mode::eval), forward(p, cfg, x, Mode::eval));
}

TEST(Forward, ZeroWeightsGiveZero)
{
    const auto cfg = small_config();
    auto p = init_params(cfg, 1);
    for (auto& l : p.layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
    const auto out = forward(p, cfg, random_inputs(10, 7, 3), Mode::eval);
    for (Eigen::Index i = 0; i < out.size(); ++i) EXPECT_EQ(out(i), 0.0);
}

TEST(Forward, AffineArithmetic)
{
    ModelConfig cfg;
    cfg.input_dim = 1;
    cfg.encoder_hidden = {};
    cfg.embedding_dim = 1;
    cfg.head_hidden = {};
    cfg.dropout = 0.0;
    auto p = init_params(cfg, 0);
    p.layers[0].weight(0, 0) = 1.0;
    p.layers[0].bias(0) = 0.0;
    p.layers[1].weight(0, 0) = 2.0;
    p.layers[1].bias(0) = 1.0;
    Eigen::MatrixXd x(1, 1);
    x << 3.0;
    EXPECT_DOUBLE_EQ(forward(p, cfg, x, Mode::eval)(0), 7.0);
    p.layers[1].bias(0) = -10.0;
    EXPECT_DOUBLE_EQ(forward(p, cfg, x, Mode::eval)(0), -4.0);
}

TEST(Forward, ShapeChecked)
{
    const auto cfg = small_config();
    const auto p = init_params(cfg, 1);
    EXPECT_THROW(forward(p, cfg, random_inputs(9, 2, 1), Mode::eval), Error);
    EXPECT_THROW(forward(p, cfg, random_inputs(10, 2, 1), Mode::train), Error);
}

TEST(Forward, InvertedDropoutMasks)
{
    auto cfg = small_config();
    cfg.encoder_hidden = {64};
    cfg.embedding_dim = 64;
    const auto p = init_params(cfg, 1);
    const auto x = random_inputs(10, 50, 4);
    Rng rng(9);
    ForwardCache cache;
    forward(p, cfg, x, Mode::train, &rng, &cache);
    std::size_t zeros = 0, total = 0;
    for (std::size_t l = 0; l < cfg.encoder_layer_count(); ++l) {
        const auto& m = cache.masks[l];
        ASSERT_GT(m.size(), 0);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            const double v = m.data()[i];
            ASSERT_TRUE(v == 0.0 || std::fabs(v - 1.0 / 0.7) < 1e-15);
            zeros += v == 0.0;
            ++total;
        }
    }
    EXPECT_NEAR(static_cast<double>(zeros) / static_cast<double>(total), 0.3, 0.03);
    EXPECT_EQ(cache.masks.back().size(), 0);
}

TEST(Forward, TrainModeSeeded)
{
    const auto cfg = small_config();
    const auto p = init_params(cfg, 1);
    const auto x = random_inputs(10, 5, 2);
    Rng a(3), b(3);
    EXPECT_EQ(forward(p, cfg, x, Mode::train, &a), forward(p, cfg, x, Mode::train, &b));
}

TEST(Loss, Examples)
{
    const std::vector<double> a{1.0, 2.0, 3.0};
    EXPECT_EQ(mse_loss(a, a), 0.0);
    EXPECT_EQ(mse_loss(std::vector<double>{0.0}, std::vector<double>{2.0}), 4.0);
    EXPECT_EQ(mse_loss(std::vector<double>{1.0, 3.0}, std::vector<double>{0.0, 0.0}), 5.0);
    EXPECT_THROW(mse_loss(std::vector<double>{}, std::vector<double>{}), Error);
    EXPECT_THROW(mse_loss(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), Error);
}

TEST(Backward, ZeroLossZeroGradients)
{
    const auto cfg = small_config();
    const auto p = init_params(cfg, 3);
    const auto x = random_inputs(10, 4, 5);
    ForwardCache cache;
    const Eigen::RowVectorXd y = forward(p, cfg, x, Mode::eval, nullptr, &cache);
    const auto g = backward(p, cfg, cache, y);
    for (const auto& l : g.layers) {
        EXPECT_EQ(l.weight.cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(l.bias.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Backward, FiniteDifferences)
{
    const auto r = gradcheck::run(small_config(), 17, 200);
    EXPECT_EQ(r.coordinates, 200u);
    EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(Backward, FiniteDifferencesDeeper)
{
    ModelConfig cfg;
    cfg.input_dim = 7;
    cfg.encoder_hidden = {12, 9};
    cfg.embedding_dim = 6;
    cfg.head_hidden = {5, 3};
    const auto r = gradcheck::run(cfg, 23, 150, 9);
    EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(Backward, ThroughFixedDropoutMask)
{
    const auto cfg = small_config();
    auto p = init_params(cfg, 8);
    const auto x = random_inputs(10, 6, 1);
    Eigen::RowVectorXd y = Eigen::RowVectorXd::Constant(6, 0.5);
    auto loss = [&](const Parameters& q) {
        Rng rng(77);
        const Eigen::RowVectorXd out = forward(q, cfg, x, Mode::train, &rng);
        return (out - y).squaredNorm() / 6.0;
    };
    Rng rng(77);
    ForwardCache cache;
    forward(p, cfg, x, Mode::train, &rng, &cache);
    const auto g = backward(p, cfg, cache, y);
    double worst = 0.0;
    for (Eigen::Index r = 0; r < p.layers[0].weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < p.layers[0].weight.cols(); ++c) {
            const double saved = p.layers[0].weight(r, c);
            p.layers[0].weight(r, c) = saved + 1e-5;
            const double up = loss(p);
            p.layers[0].weight(r, c) = saved - 1e-5;
            const double down = loss(p);
            p.layers[0].weight(r, c) = saved;
            const double num = (up - down) / 2e-5;
            const double a = g.layers[0].weight(r, c);
            worst = std::max(worst, std::fabs(a - num) / std::max({std::fabs(a), std::fabs(num), 1e-8}));
        }
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Backward, StaleCacheRejected)
{
    const auto cfg = small_config();
    auto p = init_params(cfg, 3);
    const auto x = random_inputs(10, 4, 5);
    ForwardCache cache;
    forward(p, cfg, x, Mode::eval, nullptr, &cache);
    Eigen::RowVectorXd y = Eigen::RowVectorXd::Zero(4);
    auto state = AdamState::for_params(p);
    adam_step(state, p, backward(p, cfg, cache, y), 1e-3);
    try {
        backward(p, cfg, cache, y);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::StaleCache);
    }
    EXPECT_THROW(backward(p, cfg, ForwardCache{}, y), Error);
}

TEST(Adam, ZeroGradients)
{
    const auto cfg = small_config();
    auto p = init_params(cfg, 3);
    const auto before = p;
    auto state = AdamState::for_params(p);
    adam_step(state, p, Parameters::zeros_like(p), 5e-4);
    EXPECT_EQ(state.step, 1u);
    EXPECT_TRUE(params_equal(p, before));
}

TEST(Adam, FirstStepClosedForm)
{
    Parameters p;
    p.layers.push_back({Eigen::MatrixXd::Constant(1, 1, 0.25), Eigen::VectorXd::Zero(1)});
    Parameters g = Parameters::zeros_like(p);
    g.layers[0].weight(0, 0) = 1.0;
    auto state = AdamState::for_params(p);
    adam_step(state, p, g, 5e-4);
    // m_hat = 1, v_hat = 1
    EXPECT_NEAR(p.layers[0].weight(0, 0), 0.25 - 5e-4 / (1.0 + 1e-8), 1e-15);
    EXPECT_EQ(p.layers[0].bias(0), 0.0);
}

TEST(Adam, SecondStepClosedForm)
{
    Parameters p;
    p.layers.push_back({Eigen::MatrixXd::Constant(1, 1, 0.0), Eigen::VectorXd::Zero(1)});
    Parameters g = Parameters::zeros_like(p);
    auto state = AdamState::for_params(p);
    g.layers[0].weight(0, 0) = 1.0;
    adam_step(state, p, g, 0.1);
    g.layers[0].weight(0, 0) = -2.0;
    adam_step(state, p, g, 0.1);
    const double m = 0.9 * 0.1 + 0.1 * -2.0;
    const double v = 0.999 * 0.001 + 0.001 * 4.0;
    const double step2 = 0.1 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
    EXPECT_NEAR(p.layers[0].weight(0, 0), -0.1 / (1.0 + 1e-8) - step2, 1e-14);
}

TEST(Plateau, HalvesAfterNineBadEpochs)
{
    PlateauScheduler s;
    s.step(1.0);
    for (int i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(s.step(1.0), 5e-4);
    EXPECT_DOUBLE_EQ(s.step(1.0), 2.5e-4);
}

TEST(Plateau, ImprovingStreamKeepsRate)
{
    PlateauScheduler s;
    double loss = 10.0;
    for (int i = 0; i < 200; ++i) {
        loss *= 0.99;
        EXPECT_DOUBLE_EQ(s.step(loss), 5e-4);
    }
}

TEST(Plateau, FloorAtMinimum)
{
    PlateauScheduler s;
    s.step(1.0);
    for (int i = 0; i < 1000; ++i) s.step(1.0);
    EXPECT_DOUBLE_EQ(s.lr, 1e-6);
}

TEST(EarlyStop, SixteenthBadEpochStops)
{
    EarlyStopping es;
    auto d = es.update(1.0);
    EXPECT_TRUE(d.improved);
    for (int i = 1; i <= 15; ++i) EXPECT_FALSE(es.update(1.0).stop) << i;
    d = es.update(1.0);
    EXPECT_TRUE(d.stop);
    EXPECT_EQ(d.best_epoch, 0);
}

TEST(EarlyStop, ImprovementResets)
{
    EarlyStopping es;
    es.update(1.0);
    for (int i = 0; i < 10; ++i) es.update(2.0);
    const auto d = es.update(0.5);
    EXPECT_TRUE(d.improved);
    EXPECT_EQ(d.best_epoch, 11);
    EXPECT_EQ(es.bad_epochs, 0);
}
