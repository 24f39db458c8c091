#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace foodscore {

inline constexpr std::size_t kDefaultTfidfFeatures = 1024;

/// Unigram + bigram vocabulary with smoothed inverse document frequencies.
///
/// Terms come from `tokenize` with stop words removed; bigrams join adjacent
/// surviving tokens with a single space. The vocabulary keeps the
/// `max_features` terms with the highest document frequency (ties broken
/// lexicographically) and assigns columns in lexicographic order.
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1.
struct TfidfModel {
    std::vector<std::string> terms;  // column order
    std::vector<std::size_t> document_frequency;
    std::vector<double> idf;
    std::size_t document_count = 0;
    std::size_t max_features = kDefaultTfidfFeatures;
    std::set<std::string> stop_words;

    std::size_t size() const noexcept { return terms.size(); }
    std::ptrdiff_t column(std::string_view term) const;

    nlohmann::json to_json() const;
    static TfidfModel from_json(const nlohmann::json& j);

private:
    std::unordered_map<std::string, std::size_t> index_;
    void build_index();

    friend TfidfModel fit_tfidf(const std::vector<std::string>&, std::size_t, const std::set<std::string>&);
};

/// Unigrams then bigrams, in text order, with repetition.
std::vector<std::string> tfidf_terms(std::string_view text, const std::set<std::string>& stop_words);

/// Throws Error(EmptyCorpus) for an empty corpus.
TfidfModel fit_tfidf(const std::vector<std::string>& corpus, std::size_t max_features, const std::set<std::string>& stop_words);

/// Raw term count times idf, L2-normalized when any entry is non-zero.
std::vector<double> transform_tfidf(const TfidfModel& model, std::string_view text);

} // namespace foodscore
