#include "foodscore/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "foodscore/error.hpp"
#include "foodscore/text.hpp"

namespace foodscore {

std::vector<std::string> tfidf_terms(std::string_view text, const std::set<std::string>& stop_words)
{
    std::vector<std::string> tokens;
    for (auto& t : tokenize(text)) {
        if (!stop_words.contains(t)) tokens.push_back(std::move(t));
    }
    std::vector<std::string> terms = tokens;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) terms.push_back(tokens[i] + " " + tokens[i + 1]);
    return terms;
}

void TfidfModel::build_index()
{
    index_.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i], i);
}

std::ptrdiff_t TfidfModel::column(std::string_view term) const
{
    auto it = index_.find(std::string(term));
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

TfidfModel fit_tfidf(const std::vector<std::string>& corpus, std::size_t max_features, const std::set<std::string>& stop_words)
{
    if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot fit TF-IDF on an empty corpus");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : corpus) {
        auto terms = tfidf_terms(doc, stop_words);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        for (auto& t : terms) ++df[t];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > max_features) ranked.resize(max_features);
    std::sort(ranked.begin(), ranked.end());

    TfidfModel model;
    model.document_count = corpus.size();
    model.max_features = max_features;
    model.stop_words = stop_words;
    const double n = static_cast<double>(corpus.size());
    for (auto& [term, freq] : ranked) {
        model.terms.push_back(term);
        model.document_frequency.push_back(freq);
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(freq))) + 1.0);
    }
    model.build_index();
    return model;
}

std::vector<double> transform_tfidf(const TfidfModel& model, std::string_view text)
{
    std::vector<double> v(model.size(), 0.0);
    for (const auto& t : tfidf_terms(text, model.stop_words)) {
        if (auto col = model.column(t); col >= 0) v[static_cast<std::size_t>(col)] += 1.0;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] *= model.idf[i];
        sq += v[i] * v[i];
    }
    if (sq > 0.0) {
        const double norm = std::sqrt(sq);
        for (double& x : v) x /= norm;
    }
    return v;
}

nlohmann::json TfidfModel::to_json() const
{
    return {{"terms", terms},
            {"document_frequency", document_frequency},
            {"idf", idf},
            {"document_count", document_count},
            {"max_features", max_features},
            {"stop_words", std::vector<std::string>(stop_words.begin(), stop_words.end())}};
}

TfidfModel TfidfModel::from_json(const nlohmann::json& j)
{
    TfidfModel m;
    m.terms = j.at("terms").get<std::vector<std::string>>();
    m.document_frequency = j.at("document_frequency").get<std::vector<std::size_t>>();
    m.idf = j.at("idf").get<std::vector<double>>();
    m.document_count = j.at("document_count").get<std::size_t>();
    m.max_features = j.at("max_features").get<std::size_t>();
    for (const auto& w : j.at("stop_words")) m.stop_words.insert(w.get<std::string>());
    if (m.idf.size() != m.terms.size() || m.document_frequency.size() != m.terms.size()) {
        throw Error(ErrorKind::CorruptFile, "TF-IDF arrays have inconsistent lengths");
    }
    m.build_index();
    return m;
}

} // namespace foodscore
