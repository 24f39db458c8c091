#include "foodscore/featurizer.hpp"

#include <algorithm>
#include <cmath>

#include "foodscore/error.hpp"
#include "foodscore/hashing.hpp"

namespace foodscore {

nlohmann::json ScalerParams::to_json() const { return {{"mean", mean}, {"scale", scale}}; }

ScalerParams ScalerParams::from_json(const nlohmann::json& j)
{
    ScalerParams p{j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
    if (p.mean.size() != p.scale.size()) throw Error(ErrorKind::CorruptFile, "scaler mean/scale lengths differ");
    return p;
}

ScalerParams fit_scaler(const Eigen::MatrixXd& rows)
{
    if (rows.rows() < 2) throw Error(ErrorKind::TooFewRows, "scaler needs at least 2 rows");
    const auto n = static_cast<double>(rows.rows());
    ScalerParams p;
    p.mean.resize(static_cast<std::size_t>(rows.cols()));
    p.scale.resize(p.mean.size());
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        const double pivot = rows(0, c);
        double shift = 0.0;
        for (Eigen::Index r = 0; r < rows.rows(); ++r) shift += rows(r, c) - pivot;
        const double mean = pivot + shift / n;
        double ss = 0.0;
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            const double d = rows(r, c) - mean;
            ss += d * d;
        }
        p.mean[static_cast<std::size_t>(c)] = mean;
        const double sd = std::sqrt(ss / n);
        p.scale[static_cast<std::size_t>(c)] = sd < kScalerEpsilon ? 1.0 : sd;
    }
    return p;
}

std::vector<double> apply_scaler(const ScalerParams& params, std::span<const double> x)
{
    if (x.size() != params.size()) throw Error(ErrorKind::DimensionMismatch, "scaler expects " + std::to_string(params.size()) + " columns");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - params.mean[i]) / params.scale[i];
    return out;
}

Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::MatrixXd& rows)
{
    if (static_cast<std::size_t>(rows.cols()) != params.size()) {
        throw Error(ErrorKind::DimensionMismatch, "scaler expects " + std::to_string(params.size()) + " columns");
    }
    Eigen::MatrixXd out(rows.rows(), rows.cols());
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        const auto i = static_cast<std::size_t>(c);
        out.col(c) = (rows.col(c).array() - params.mean[i]) / params.scale[i];
    }
    return out;
}

HybridVector assemble_hybrid(std::span<const double> embedding, std::span<const double> tfidf,
                             std::span<const double> heuristics, const SegmentSizes& expected)
{
    if (embedding.size() != expected.embedding || tfidf.size() != expected.tfidf || heuristics.size() != expected.heuristics) {
        throw Error(ErrorKind::DimensionMismatch,
                    "segments " + std::to_string(embedding.size()) + "/" + std::to_string(tfidf.size()) + "/" +
                        std::to_string(heuristics.size()) + " do not match fitted sizes " + std::to_string(expected.embedding) +
                        "/" + std::to_string(expected.tfidf) + "/" + std::to_string(expected.heuristics));
    }
    HybridVector out;
    out.values.reserve(expected.total());
    out.values.insert(out.values.end(), embedding.begin(), embedding.end());
    out.values.insert(out.values.end(), tfidf.begin(), tfidf.end());
    out.values.insert(out.values.end(), heuristics.begin(), heuristics.end());
    out.offsets = {0, embedding.size(), embedding.size() + tfidf.size()};
    return out;
}

Featurizer::Featurizer(std::shared_ptr<const EmbeddingProvider> embedding, TfidfModel tfidf, HeuristicSpec heuristics)
    : embedding_(std::move(embedding)), tfidf_(std::move(tfidf)), heuristics_(std::move(heuristics))
{
    if (!embedding_) throw Error(ErrorKind::Config, "featurizer needs an embedding provider");
}

Featurizer Featurizer::fit(const std::vector<std::string>& corpus, std::shared_ptr<const EmbeddingProvider> embedding,
                           HeuristicSpec heuristics, const std::set<std::string>& stop_words, const FeaturizerConfig& config)
{
    if (embedding && embedding->dimension() != config.embedding_dim) {
        throw Error(ErrorKind::DimensionMismatch, "embedding provider dimension differs from configuration");
    }
    return Featurizer(std::move(embedding), fit_tfidf(corpus, config.tfidf_max_features, stop_words), std::move(heuristics));
}

SegmentSizes Featurizer::segment_sizes(TargetKey target) const
{
    return {embedding_->dimension(), tfidf_.size(), heuristics_.features_for(target).size()};
}

std::vector<double> Featurizer::shared_segment(std::string_view text) const
{
    auto out = embedding_->embed(text);
    auto tf = transform_tfidf(tfidf_, text);
    out.insert(out.end(), tf.begin(), tf.end());
    return out;
}

HybridVector Featurizer::featurize(std::string_view text, TargetKey target) const
{
    const auto shared = shared_segment(text);
    return featurize(shared, text, target);
}

HybridVector Featurizer::featurize(std::span<const double> shared, std::string_view text, TargetKey target) const
{
    const auto sizes = segment_sizes(target);
    if (shared.size() != sizes.embedding + sizes.tfidf) throw Error(ErrorKind::DimensionMismatch, "shared segment has the wrong length");
    const auto heur = heuristic_features(heuristics_, target, text);
    return assemble_hybrid(shared.subspan(0, sizes.embedding), shared.subspan(sizes.embedding), heur, sizes);
}

std::string Featurizer::shared_fingerprint() const
{
    auto h = fnv1a64(embedding_->fingerprint());
    h = fnv1a64(tfidf_.to_json().dump(), h);
    return hex64(h);
}

std::string Featurizer::fingerprint(TargetKey target) const
{
    auto h = fnv1a64(shared_fingerprint());
    h = fnv1a64(heuristics_.describe(target), h);
    return hex64(h);
}

nlohmann::json Featurizer::to_json() const
{
    return {{"embedding", {{"fingerprint", embedding_->fingerprint()}, {"dimension", embedding_->dimension()}}},
            {"tfidf", tfidf_.to_json()},
            {"heuristics", heuristics_.source},
            {"shared_fingerprint", shared_fingerprint()}};
}

Featurizer Featurizer::from_json(const nlohmann::json& j, std::shared_ptr<const EmbeddingProvider> embedding)
{
    if (!embedding) throw Error(ErrorKind::Config, "featurizer needs an embedding provider");
    const auto expected = j.at("embedding").at("fingerprint").get<std::string>();
    if (embedding->fingerprint() != expected) {
        throw Error(ErrorKind::Config, "embedding provider '" + embedding->fingerprint() + "' does not match the one used in training ('" + expected + "')");
    }
    Featurizer f(std::move(embedding), TfidfModel::from_json(j.at("tfidf")), HeuristicSpec::from_json(j.at("heuristics")));
    if (f.shared_fingerprint() != j.at("shared_fingerprint").get<std::string>()) {
        throw Error(ErrorKind::CorruptFile, "featurizer fingerprint mismatch");
    }
    return f;
}

} // namespace foodscore
