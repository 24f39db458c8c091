#include "foodscore/network.hpp"

#include <cmath>

#include "foodscore/error.hpp"

namespace foodscore {
namespace {

void check(bool ok, ErrorKind kind, const char* what)
{
    if (!ok) throw Error(kind, what);
}

} // namespace

std::vector<std::size_t> ModelConfig::layer_widths() const
{
    std::vector<std::size_t> w{input_dim};
    w.insert(w.end(), encoder_hidden.begin(), encoder_hidden.end());
    w.push_back(embedding_dim);
    w.insert(w.end(), head_hidden.begin(), head_hidden.end());
    w.push_back(1);
    return w;
}

void ModelConfig::validate() const
{
    for (auto w : layer_widths()) {
        if (w < 1) throw Error(ErrorKind::Config, "layer widths must be >= 1");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(ErrorKind::Config, "dropout must lie in [0, 1)");
}

nlohmann::json ModelConfig::to_json() const
{
    return {{"input_dim", input_dim},
            {"encoder_hidden", encoder_hidden},
            {"embedding_dim", embedding_dim},
            {"head_hidden", head_hidden},
            {"dropout", dropout}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j)
{
    ModelConfig c;
    c.input_dim = j.value("input_dim", std::size_t{0});
    c.encoder_hidden = j.value("encoder_hidden", c.encoder_hidden);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    c.head_hidden = j.value("head_hidden", c.head_hidden);
    c.dropout = j.value("dropout", c.dropout);
    return c;
}

std::size_t Parameters::count() const noexcept
{
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

bool Parameters::same_shape(const Parameters& other) const noexcept
{
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& a = layers[i];
        const auto& b = other.layers[i];
        if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() || a.bias.size() != b.bias.size()) return false;
    }
    return true;
}

Parameters Parameters::zeros_like(const Parameters& other)
{
    Parameters p;
    for (const auto& l : other.layers) {
        p.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
    }
    return p;
}

Parameters init_params(const ModelConfig& config, std::uint64_t seed)
{
    config.validate();
    const auto widths = config.layer_widths();
    Rng rng(seed);
    Parameters p;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto fan_in = widths[l];
        const auto fan_out = widths[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out))};
        // column-major fill order keeps the draw sequence independent of Eigen internals
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
            for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = limit * (2.0 * rng.uniform() - 1.0);
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

Eigen::RowVectorXd forward(const Parameters& params, const ModelConfig& config, const Eigen::MatrixXd& inputs, Mode mode,
                           Rng* dropout_rng, ForwardCache* cache)
{
    if (params.layers.empty() || inputs.rows() != params.layers.front().weight.cols()) {
        throw Error(ErrorKind::ShapeMismatch, "input has " + std::to_string(inputs.rows()) + " features; model expects " +
                                                  std::to_string(params.layers.empty() ? 0 : params.layers.front().weight.cols()));
    }
    const std::size_t n_layers = params.layers.size();
    const std::size_t n_encoder = config.encoder_layer_count();
    const bool dropout_on = mode == Mode::train && config.dropout > 0.0;
    if (dropout_on && !dropout_rng) throw Error(ErrorKind::Invariant, "train-mode dropout needs a random stream");
    const double keep_scale = 1.0 / (1.0 - config.dropout);

    if (cache) {
        cache->inputs.assign(n_layers, {});
        cache->preactivation.assign(n_layers, {});
        cache->masks.assign(n_layers, {});
        cache->version = params.version;
        cache->valid = true;
    }

    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto& layer = params.layers[l];
        Eigen::MatrixXd z = layer.weight * a;
        z.colwise() += layer.bias;
        if (cache) {
            cache->inputs[l] = std::move(a);
            cache->preactivation[l] = z;
        }
        if (l + 1 == n_layers) return z.row(0);

        a = z.cwiseMax(0.0);
        if (l < n_encoder && dropout_on) {
            Eigen::MatrixXd mask(a.rows(), a.cols());
            for (Eigen::Index c = 0; c < mask.cols(); ++c) {
                for (Eigen::Index r = 0; r < mask.rows(); ++r) mask(r, c) = dropout_rng->uniform() < config.dropout ? 0.0 : keep_scale;
            }
            a = a.cwiseProduct(mask);
            if (cache) cache->masks[l] = std::move(mask);
        }
    }
    return {};
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets)
{
    check(!predictions.empty(), ErrorKind::EmptyBatch, "empty batch");
    check(predictions.size() == targets.size(), ErrorKind::ShapeMismatch, "predictions and targets differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        sum += d * d;
    }
    return sum / static_cast<double>(predictions.size());
}

Gradients backward(const Parameters& params, const ModelConfig& config, const ForwardCache& cache, const Eigen::RowVectorXd& targets)
{
    (void)config;
    if (!cache.valid || cache.version != params.version || cache.inputs.size() != params.layers.size()) {
        throw Error(ErrorKind::StaleCache, "forward cache does not belong to the current parameters");
    }
    const std::size_t n_layers = params.layers.size();
    const Eigen::MatrixXd& out = cache.preactivation.back();
    check(out.cols() == targets.size() && out.cols() > 0, ErrorKind::ShapeMismatch, "targets do not match the cached batch");
    const double batch = static_cast<double>(targets.size());

    Gradients grads = Parameters::zeros_like(params);
    Eigen::MatrixXd delta = (2.0 / batch) * (out.row(0) - targets);
    for (std::size_t l = n_layers; l-- > 0;) {
        if (l + 1 < n_layers) {
            // delta currently holds dLoss/d(activation output of layer l)
            if (cache.masks[l].size() > 0) delta = delta.cwiseProduct(cache.masks[l]);
            delta = delta.cwiseProduct((cache.preactivation[l].array() > 0.0).cast<double>().matrix());
        }
        grads.layers[l].weight.noalias() = delta * cache.inputs[l].transpose();
        grads.layers[l].bias = delta.rowwise().sum();
        if (l > 0) delta = params.layers[l].weight.transpose() * delta;
    }
    return grads;
}

AdamState AdamState::for_params(const Parameters& params, AdamConfig config)
{
    return {config, Parameters::zeros_like(params), Parameters::zeros_like(params), 0};
}

void adam_step(AdamState& state, Parameters& params, const Gradients& grads, double lr)
{
    if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v)) {
        throw Error(ErrorKind::ShapeMismatch, "optimizer state does not match parameter shapes");
    }
    const auto& c = state.config;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);
    auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
        p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
    };
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        update(params.layers[l].weight, state.m.layers[l].weight, state.v.layers[l].weight, grads.layers[l].weight);
        update(params.layers[l].bias, state.m.layers[l].bias, state.v.layers[l].bias, grads.layers[l].bias);
    }
    ++params.version;
}

double PlateauScheduler::step(double val_loss)
{
    if (improves(val_loss, best, threshold)) {
        best = val_loss;
        bad_epochs = 0;
    } else if (++bad_epochs > patience) {
        lr = std::max(lr * factor, min_lr);
        bad_epochs = 0;
    }
    return lr;
}

EarlyStopping::Decision EarlyStopping::update(double val_loss)
{
    Decision d;
    if (improves(val_loss, best, threshold)) {
        best = val_loss;
        best_epoch = epoch;
        bad_epochs = 0;
        d.improved = true;
    } else {
        ++bad_epochs;
    }
    ++epoch;
    d.stop = bad_epochs > patience;
    d.best_epoch = best_epoch;
    return d;
}

} // namespace foodscore
