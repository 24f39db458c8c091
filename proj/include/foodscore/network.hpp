#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "foodscore/random.hpp"

namespace foodscore {

/// Encoder (input -> hidden... -> embedding) followed by a regression head
/// (embedding -> hidden... -> 1). Every encoder layer is affine -> ReLU -> dropout;
/// head hidden layers are affine -> ReLU; the output layer is affine only.
struct ModelConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> encoder_hidden{1024, 768};
    std::size_t embedding_dim = 256;
    std::vector<std::size_t> head_hidden{256, 128};
    double dropout = 0.3;

    /// [input, encoder..., embedding, head..., 1]
    std::vector<std::size_t> layer_widths() const;
    std::size_t encoder_layer_count() const noexcept { return encoder_hidden.size() + 1; }
    void validate() const;

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
    bool operator==(const ModelConfig&) const = default;
};

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
};

struct Parameters {
    std::vector<DenseLayer> layers;
    /// Bumped by every optimizer step; caches record the version they were built from.
    std::uint64_t version = 0;

    std::size_t count() const noexcept;
    bool same_shape(const Parameters& other) const noexcept;
    static Parameters zeros_like(const Parameters& other);
};

using Gradients = Parameters;

/// Glorot-uniform weights, zero biases.
Parameters init_params(const ModelConfig& config, std::uint64_t seed);

enum class Mode { train, eval };

struct ForwardCache {
    std::vector<Eigen::MatrixXd> inputs;       // activation entering layer l (features x batch)
    std::vector<Eigen::MatrixXd> preactivation;
    std::vector<Eigen::MatrixXd> masks;        // inverted-dropout masks per encoder layer; empty when inactive
    std::uint64_t version = 0;
    bool valid = false;
};

/// `inputs` holds one sample per column. Dropout is applied only in train mode
/// and draws from `dropout_rng`. Returns one prediction per column.
Eigen::RowVectorXd forward(const Parameters& params, const ModelConfig& config, const Eigen::MatrixXd& inputs, Mode mode,
                           Rng* dropout_rng = nullptr, ForwardCache* cache = nullptr);

/// Mean of squared differences. Throws Error(EmptyBatch) / Error(ShapeMismatch).
double mse_loss(std::span<const double> predictions, std::span<const double> targets);

/// Gradients of the batch MSE for the forward pass recorded in `cache`.
/// Throws Error(StaleCache) if the parameters changed since that pass.
Gradients backward(const Parameters& params, const ModelConfig& config, const ForwardCache& cache,
                   const Eigen::RowVectorXd& targets);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    Parameters m;
    Parameters v;
    std::uint64_t step = 0;

    static AdamState for_params(const Parameters& params, AdamConfig config = {});
};

/// One bias-corrected Adam update in place.
void adam_step(AdamState& state, Parameters& params, const Gradients& grads, double lr);

/// Relative improvement test shared by the scheduler and early stopping.
inline bool improves(double value, double best, double threshold) noexcept { return value < best * (1.0 - threshold); }

/// Reduce-on-plateau: after more than `patience` consecutive epochs without a
/// relative improvement, lr <- max(lr * factor, min_lr) and the counter resets.
struct PlateauScheduler {
    double lr = 5e-4;
    double factor = 0.5;
    double min_lr = 1e-6;
    int patience = 8;
    double threshold = 1e-6;
    double best = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;

    double step(double val_loss);
};

/// Stops once the count of consecutive non-improving epochs exceeds `patience`.
struct EarlyStopping {
    int patience = 15;
    double threshold = 1e-6;
    double best = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
    int bad_epochs = 0;
    int epoch = 0;

    struct Decision {
        bool stop = false;
        bool improved = false;
        int best_epoch = -1;
    };

    Decision update(double val_loss);
};

} // namespace foodscore
