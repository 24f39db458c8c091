#include "foodscore/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "foodscore/error.hpp"

namespace foodscore {
namespace {

constexpr std::uint64_t kSplitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;
constexpr std::uint64_t kInitStream = 3;

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, std::span<const std::size_t> idx)
{
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(idx[i]));
    return out;
}

Eigen::RowVectorXd gather(const Eigen::RowVectorXd& v, std::span<const std::size_t> idx)
{
    Eigen::RowVectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
    return out;
}

double eval_loss(const Parameters& params, const ModelConfig& cfg, const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y)
{
    const Eigen::RowVectorXd pred = forward(params, cfg, x, Mode::eval);
    return mse_loss(std::span(pred.data(), static_cast<std::size_t>(pred.size())), std::span(y.data(), static_cast<std::size_t>(y.size())));
}

std::size_t floor_count(double fraction, std::size_t n)
{
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

} // namespace

void TrainConfig::validate() const
{
    if (batch_size < 1) throw Error(ErrorKind::Config, "batch_size must be >= 1");
    if (scheduler_patience < 1 || early_stop_patience < 1) throw Error(ErrorKind::Config, "patience values must be >= 1");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::Config, "learning_rate must be > 0");
    if (max_epochs < 1) throw Error(ErrorKind::Config, "max_epochs must be >= 1");
    if (train_fraction <= 0.0 || val_fraction <= 0.0 || test_fraction <= 0.0 ||
        std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        throw Error(ErrorKind::Config, "split fractions must be positive and sum to 1");
    }
}

nlohmann::json TrainConfig::to_json() const
{
    return {{"batch_size", batch_size},
            {"learning_rate", learning_rate},
            {"beta1", adam.beta1},
            {"beta2", adam.beta2},
            {"adam_epsilon", adam.epsilon},
            {"scheduler_patience", scheduler_patience},
            {"scheduler_factor", scheduler_factor},
            {"min_learning_rate", min_learning_rate},
            {"early_stop_patience", early_stop_patience},
            {"improvement_threshold", improvement_threshold},
            {"max_epochs", max_epochs},
            {"train_fraction", train_fraction},
            {"val_fraction", val_fraction},
            {"test_fraction", test_fraction},
            {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) { return from_json(j, TrainConfig{}); }

TrainConfig TrainConfig::from_json(const nlohmann::json& j, TrainConfig c)
{
    for (const auto& [key, value] : j.items()) {
        if (key == "batch_size") c.batch_size = value.get<std::size_t>();
        else if (key == "learning_rate") c.learning_rate = value.get<double>();
        else if (key == "beta1") c.adam.beta1 = value.get<double>();
        else if (key == "beta2") c.adam.beta2 = value.get<double>();
        else if (key == "adam_epsilon") c.adam.epsilon = value.get<double>();
        else if (key == "scheduler_patience") c.scheduler_patience = value.get<int>();
        else if (key == "scheduler_factor") c.scheduler_factor = value.get<double>();
        else if (key == "min_learning_rate") c.min_learning_rate = value.get<double>();
        else if (key == "early_stop_patience") c.early_stop_patience = value.get<int>();
        else if (key == "improvement_threshold") c.improvement_threshold = value.get<double>();
        else if (key == "max_epochs") c.max_epochs = value.get<int>();
        else if (key == "train_fraction") c.train_fraction = value.get<double>();
        else if (key == "val_fraction") c.val_fraction = value.get<double>();
        else if (key == "test_fraction") c.test_fraction = value.get<double>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else throw Error(ErrorKind::Config, "unknown training key '" + key + "'");
    }
    c.validate();
    return c;
}

Split make_split(std::size_t n, const TrainConfig& config)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, kSplitStream));
    rng.shuffle(std::span(idx));
    const auto n_train = floor_count(config.train_fraction, n);
    const auto n_val = floor_count(config.val_fraction, n);
    Split s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    return s;
}

RegressionMetrics regression_metrics(std::span<const double> predicted, std::span<const double> actual)
{
    if (predicted.size() != actual.size()) throw Error(ErrorKind::ShapeMismatch, "prediction and target lengths differ");
    if (actual.size() < 2) throw Error(ErrorKind::TooFewRows, "regression metrics need at least 2 rows");
    const double n = static_cast<double>(actual.size());
    const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / n;
    double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        ss_res += e * e;
        abs_sum += std::abs(e);
        const double d = actual[i] - mean;
        ss_tot += d * d;
    }
    RegressionMetrics m;
    m.rmse = std::sqrt(ss_res / n);
    m.mae = abs_sum / n;
    if (ss_tot > 0.0) {
        m.r2 = 1.0 - ss_res / ss_tot;
    } else {
        m.r2 = std::numeric_limits<double>::quiet_NaN();
        m.r2_defined = false;
    }
    return m;
}

nlohmann::json TrainReport::to_json() const
{
    nlohmann::json r2 = test.r2_defined ? nlohmann::json(test.r2) : nlohmann::json(nullptr);
    return {{"r2", r2},
            {"rmse", test.rmse},
            {"mae", test.mae},
            {"epochs_run", epochs_run},
            {"best_epoch", best_epoch},
            {"final_learning_rate", final_learning_rate},
            {"n_train", n_train},
            {"n_val", n_val},
            {"n_test", n_test},
            {"train_loss", train_loss},
            {"val_loss", val_loss}};
}

TrainReport TrainReport::from_json(const nlohmann::json& j)
{
    TrainReport r;
    if (j.at("r2").is_null()) {
        r.test.r2 = std::numeric_limits<double>::quiet_NaN();
        r.test.r2_defined = false;
    } else {
        r.test.r2 = j.at("r2").get<double>();
    }
    r.test.rmse = j.at("rmse").get<double>();
    r.test.mae = j.at("mae").get<double>();
    r.epochs_run = j.at("epochs_run").get<int>();
    r.best_epoch = j.at("best_epoch").get<int>();
    r.final_learning_rate = j.at("final_learning_rate").get<double>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_val = j.at("n_val").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.train_loss = j.at("train_loss").get<std::vector<double>>();
    r.val_loss = j.at("val_loss").get<std::vector<double>>();
    return r;
}

std::vector<double> NutrientModel::predict_rows(const Eigen::MatrixXd& rows) const
{
    const Eigen::MatrixXd x = apply_scaler(scaler, rows).transpose();
    const Eigen::RowVectorXd out = forward(params, config, x, Mode::eval);
    std::vector<double> result(static_cast<std::size_t>(out.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) result[static_cast<std::size_t>(i)] = out(i) * target_scale;
    return result;
}

double NutrientModel::predict(std::span<const double> hybrid) const
{
    Eigen::MatrixXd row(1, static_cast<Eigen::Index>(hybrid.size()));
    for (std::size_t i = 0; i < hybrid.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = hybrid[i];
    return predict_rows(row).front();
}

RegressionMetrics evaluate(const NutrientModel& model, const Eigen::MatrixXd& rows, std::span<const double> actual)
{
    const auto pred = model.predict_rows(rows);
    return regression_metrics(pred, actual);
}

FitResult fit_network(const ModelConfig& model_config, const TrainConfig& config, const Eigen::MatrixXd& train_x,
                      const Eigen::RowVectorXd& train_y, const Eigen::MatrixXd& val_x, const Eigen::RowVectorXd& val_y)
{
    config.validate();
    model_config.validate();
    if (train_x.cols() < 1 || val_x.cols() < 1) throw Error(ErrorKind::TooFewRows, "training and validation sets must be non-empty");

    Parameters params = init_params(model_config, derive_seed(config.seed, kInitStream));
    AdamState adam = AdamState::for_params(params, config.adam);
    PlateauScheduler scheduler{config.learning_rate, config.scheduler_factor, config.min_learning_rate, config.scheduler_patience,
                               config.improvement_threshold};
    EarlyStopping stopper{config.early_stop_patience, config.improvement_threshold};
    Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
    Rng dropout_rng(derive_seed(config.seed, kDropoutStream));

    FitResult result;
    Parameters best = params;
    std::vector<std::size_t> order(static_cast<std::size_t>(train_x.cols()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    ForwardCache cache;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(std::span(order));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const auto count = std::min(config.batch_size, order.size() - start);
            const auto idx = std::span(order).subspan(start, count);
            const Eigen::MatrixXd xb = gather_columns(train_x, idx);
            const Eigen::RowVectorXd yb = gather(train_y, idx);
            const Eigen::RowVectorXd pred = forward(params, model_config, xb, Mode::train, &dropout_rng, &cache);
            epoch_loss += (pred - yb).squaredNorm();
            const Gradients grads = backward(params, model_config, cache, yb);
            adam_step(adam, params, grads, scheduler.lr);
        }
        result.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
        const double val = eval_loss(params, model_config, val_x, val_y);
        result.val_loss.push_back(val);
        scheduler.step(val);
        const auto decision = stopper.update(val);
        if (decision.improved) best = params;
        result.epochs_run = epoch + 1;
        if (decision.stop) break;
    }
    result.best_epoch = stopper.best_epoch;
    result.final_learning_rate = scheduler.lr;
    result.params = std::move(best);
    return result;
}

NutrientModel train_target(const Eigen::MatrixXd& rows, std::span<const double> targets, TargetKey target,
                           ModelConfig model_config, const TrainConfig& config, std::string fingerprint)
{
    config.validate();
    if (rows.rows() < 10) throw Error(ErrorKind::TooFewRows, std::string(target_name(target)) + " has fewer than 10 rows");
    if (static_cast<std::size_t>(rows.rows()) != targets.size()) throw Error(ErrorKind::ShapeMismatch, "row and target counts differ");

    const auto split = make_split(static_cast<std::size_t>(rows.rows()), config);
    if (split.train.size() < 2 || split.val.empty() || split.test.size() < 2) {
        throw Error(ErrorKind::TooFewRows, "split leaves an empty partition for " + std::string(target_name(target)));
    }
    auto take_rows = [&](const std::vector<std::size_t>& idx) {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), rows.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(idx[i]));
        return out;
    };
    auto take_targets = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> out;
        for (auto i : idx) out.push_back(targets[i]);
        return out;
    };

    NutrientModel model;
    model.target = target;
    model_config.input_dim = static_cast<std::size_t>(rows.cols());
    model.config = model_config;
    model.fingerprint = std::move(fingerprint);

    const Eigen::MatrixXd train_rows = take_rows(split.train);
    model.scaler = fit_scaler(train_rows);
    const auto train_t = take_targets(split.train);
    {
        const double n = static_cast<double>(train_t.size());
        const double mean = std::accumulate(train_t.begin(), train_t.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : train_t) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / n);
        model.target_scale = sd > kScalerEpsilon ? sd : 1.0;
    }

    auto scaled_targets = [&](const std::vector<double>& t) {
        Eigen::RowVectorXd out(static_cast<Eigen::Index>(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i) out(static_cast<Eigen::Index>(i)) = t[i] / model.target_scale;
        return out;
    };
    const Eigen::MatrixXd train_x = apply_scaler(model.scaler, train_rows).transpose();
    const Eigen::MatrixXd val_x = apply_scaler(model.scaler, take_rows(split.val)).transpose();

    auto fit = fit_network(model.config, config, train_x, scaled_targets(train_t), val_x, scaled_targets(take_targets(split.val)));
    model.params = std::move(fit.params);

    model.report.test = evaluate(model, take_rows(split.test), take_targets(split.test));
    model.report.epochs_run = fit.epochs_run;
    model.report.best_epoch = fit.best_epoch;
    model.report.final_learning_rate = fit.final_learning_rate;
    model.report.n_train = split.train.size();
    model.report.n_val = split.val.size();
    model.report.n_test = split.test.size();
    model.report.train_loss = std::move(fit.train_loss);
    model.report.val_loss = std::move(fit.val_loss);
    return model;
}

} // namespace foodscore
