#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "foodscore/featurizer.hpp"
#include "foodscore/network.hpp"
#include "foodscore/targets.hpp"

namespace foodscore {

struct TrainConfig {
    std::size_t batch_size = 32;
    double learning_rate = 5e-4;
    AdamConfig adam;
    int scheduler_patience = 8;
    double scheduler_factor = 0.5;
    double min_learning_rate = 1e-6;
    int early_stop_patience = 15;
    double improvement_threshold = 1e-6;
    int max_epochs = 300;
    double train_fraction = 0.70;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
    static TrainConfig from_json(const nlohmann::json& j, TrainConfig defaults);
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Seeded permutation cut into train/val/test by the configured fractions.
Split make_split(std::size_t n, const TrainConfig& config);

struct RegressionMetrics {
    double r2 = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    /// False when the actual values are constant; r2 is then NaN.
    bool r2_defined = true;
};

/// R^2 = 1 - SS_res / SS_tot, RMSE, MAE. Needs >= 2 rows (TooFewRows).
RegressionMetrics regression_metrics(std::span<const double> predicted, std::span<const double> actual);

struct TrainReport {
    RegressionMetrics test;
    int epochs_run = 0;
    int best_epoch = -1;
    double final_learning_rate = 0.0;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::size_t n_test = 0;
    std::vector<double> train_loss;
    std::vector<double> val_loss;

    nlohmann::json to_json() const;
    static TrainReport from_json(const nlohmann::json& j);
};

/// Network, input scaler and target scale for one target.
struct NutrientModel {
    TargetKey target = TargetKey::calories;
    ModelConfig config;
    Parameters params;
    ScalerParams scaler;
    /// Network output is multiplied by this to recover target units.
    double target_scale = 1.0;
    std::string fingerprint;
    TrainReport report;

    /// Raw regression output for unscaled hybrid vectors (one per row).
    std::vector<double> predict_rows(const Eigen::MatrixXd& rows) const;
    double predict(std::span<const double> hybrid) const;
};

RegressionMetrics evaluate(const NutrientModel& model, const Eigen::MatrixXd& rows, std::span<const double> actual);

struct FitResult {
    Parameters params;
    int epochs_run = 0;
    int best_epoch = -1;
    double final_learning_rate = 0.0;
    std::vector<double> train_loss;
    std::vector<double> val_loss;
};

/// Mini-batch Adam with plateau scheduling and early stopping on the validation
/// loss. Inputs hold one (already scaled) sample per column. Returns the
/// parameters from the best validation epoch.
FitResult fit_network(const ModelConfig& model_config, const TrainConfig& config, const Eigen::MatrixXd& train_x,
                      const Eigen::RowVectorXd& train_y, const Eigen::MatrixXd& val_x, const Eigen::RowVectorXd& val_y);

/// Splits, fits the scaler on the training rows, trains, and evaluates on the
/// test split. `rows` holds unscaled hybrid vectors, one per row.
NutrientModel train_target(const Eigen::MatrixXd& rows, std::span<const double> targets, TargetKey target,
                           ModelConfig model_config, const TrainConfig& config, std::string fingerprint = {});

} // namespace foodscore
