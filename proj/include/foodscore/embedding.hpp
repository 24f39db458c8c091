#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace foodscore {

inline constexpr std::size_t kDefaultEmbeddingDim = 384;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const noexcept = 0;
    virtual std::vector<double> embed(std::string_view text) const = 0;
    /// Identifies the provider and its contents; part of the featurizer fingerprint.
    virtual std::string fingerprint() const = 0;
};

/// Signed feature hashing of character 3- to 5-grams.
///
/// The text is lowercased, whitespace runs are collapsed to one space, and the
/// result is padded with a single space on both sides. Each n-gram is hashed
/// with 64-bit FNV-1a; bucket = hash mod dimension, sign = -1 when bit 63 of the
/// hash is set, +1 otherwise. The accumulated vector is L2-normalized.
class HashedEmbedding final : public EmbeddingProvider {
public:
    explicit HashedEmbedding(std::size_t dimension = kDefaultEmbeddingDim);

    std::size_t dimension() const noexcept override { return dimension_; }
    std::vector<double> embed(std::string_view text) const override;
    std::string fingerprint() const override;

private:
    std::size_t dimension_;
};

/// Precomputed sentence embeddings: UTF-8 TSV, text in column 1 followed by
/// `dimension` decimal columns. Lookup is by exact text.
class FileEmbedding final : public EmbeddingProvider {
public:
    static std::unique_ptr<FileEmbedding> load(const std::filesystem::path& path, std::size_t dimension = kDefaultEmbeddingDim);
    static std::unique_ptr<FileEmbedding> parse(std::string_view contents, std::size_t dimension = kDefaultEmbeddingDim);

    std::size_t dimension() const noexcept override { return dimension_; }
    /// Throws Error(UnknownText) for texts not in the file.
    std::vector<double> embed(std::string_view text) const override;
    bool contains(std::string_view text) const;
    std::string fingerprint() const override;
    std::size_t size() const noexcept { return vectors_.size(); }

private:
    FileEmbedding(std::size_t dimension, std::string content_hash) : dimension_(dimension), content_hash_(std::move(content_hash)) {}

    std::size_t dimension_;
    std::string content_hash_;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// File lookup with per-text fallback to hashing; counts fallbacks.
class FallbackEmbedding final : public EmbeddingProvider {
public:
    FallbackEmbedding(std::shared_ptr<const FileEmbedding> file, std::size_t dimension = kDefaultEmbeddingDim);

    std::size_t dimension() const noexcept override { return hashed_.dimension(); }
    std::vector<double> embed(std::string_view text) const override;
    std::string fingerprint() const override;
    std::size_t fallback_count() const noexcept { return fallbacks_.load(); }

private:
    std::shared_ptr<const FileEmbedding> file_;
    HashedEmbedding hashed_;
    mutable std::atomic<std::size_t> fallbacks_{0};
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

} // namespace foodscore
