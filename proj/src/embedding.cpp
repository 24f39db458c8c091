#include "foodscore/embedding.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "foodscore/error.hpp"
#include "foodscore/hashing.hpp"
#include "foodscore/text.hpp"

namespace foodscore {
namespace {

std::string normalize_for_hashing(std::string_view text)
{
    std::string out = " ";
    bool pending_space = false;
    for (char c : trim(text)) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
    out.push_back(' ');
    return out;
}

void l2_normalize(std::vector<double>& v)
{
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq <= 0.0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
}

} // namespace

HashedEmbedding::HashedEmbedding(std::size_t dimension) : dimension_(dimension)
{
    if (dimension == 0) throw Error(ErrorKind::Config, "embedding dimension must be > 0");
}

std::vector<double> HashedEmbedding::embed(std::string_view text) const
{
    const auto s = normalize_for_hashing(text);
    std::vector<double> v(dimension_, 0.0);
    for (std::size_t n = 3; n <= 5; ++n) {
        if (s.size() < n) break;
        for (std::size_t i = 0; i + n <= s.size(); ++i) {
            const auto h = fnv1a64(std::string_view(s).substr(i, n));
            v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
        }
    }
    l2_normalize(v);
    return v;
}

std::string HashedEmbedding::fingerprint() const { return "hashed-fnv1a-char3to5/" + std::to_string(dimension_); }

std::unique_ptr<FileEmbedding> FileEmbedding::load(const std::filesystem::path& path, std::size_t dimension)
{
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Config, "embedding file not found: " + path.string());
    return parse(read_file(path), dimension);
}

std::unique_ptr<FileEmbedding> FileEmbedding::parse(std::string_view contents, std::size_t dimension)
{
    std::unique_ptr<FileEmbedding> out(new FileEmbedding(dimension, sha256_hex(contents)));
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < contents.size()) {
        auto end = contents.find('\n', pos);
        if (end == std::string_view::npos) end = contents.size();
        auto line = contents.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;

        std::vector<std::string_view> cols;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        if (cols.size() != dimension + 1) {
            throw Error(ErrorKind::Parse, "bad dimension on embedding line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(dimension) + " values, found " + std::to_string(cols.size() - 1));
        }
        std::vector<double> v(dimension);
        for (std::size_t i = 0; i < dimension; ++i) {
            auto cell = trim(cols[i + 1]);
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[i]);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw Error(ErrorKind::Parse, "non-numeric value on embedding line " + std::to_string(line_no));
            }
        }
        out->vectors_.insert_or_assign(std::string(cols[0]), std::move(v));
    }
    return out;
}

std::vector<double> FileEmbedding::embed(std::string_view text) const
{
    auto it = vectors_.find(std::string(text));
    if (it == vectors_.end()) throw Error(ErrorKind::UnknownText, "no stored embedding for '" + std::string(text) + "'");
    return it->second;
}

bool FileEmbedding::contains(std::string_view text) const { return vectors_.contains(std::string(text)); }

std::string FileEmbedding::fingerprint() const { return "file-sha256:" + content_hash_ + "/" + std::to_string(dimension_); }

FallbackEmbedding::FallbackEmbedding(std::shared_ptr<const FileEmbedding> file, std::size_t dimension)
    : file_(std::move(file)), hashed_(dimension)
{
    if (file_ && file_->dimension() != dimension) throw Error(ErrorKind::DimensionMismatch, "embedding file dimension differs from configured dimension");
}

std::vector<double> FallbackEmbedding::embed(std::string_view text) const
{
    if (file_ && file_->contains(text)) return file_->embed(text);
    if (file_) fallbacks_.fetch_add(1);
    return hashed_.embed(text);
}

std::string FallbackEmbedding::fingerprint() const
{
    return file_ ? file_->fingerprint() + "+" + hashed_.fingerprint() : hashed_.fingerprint();
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "cosine of vectors with different lengths");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

} // namespace foodscore
