#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "foodscore/embedding.hpp"
#include "foodscore/error.hpp"

using namespace foodscore;

namespace {

double norm(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Reference hashing embedding written out from the format description.
std::vector<double> reference_embed(const std::string& padded, std::size_t dim)
{
    std::vector<double> v(dim, 0.0);
    for (std::size_t n = 3; n <= 5; ++n) {
        for (std::size_t i = 0; i + n <= padded.size(); ++i) {
            std::uint64_t h = 14695981039346656037ULL;
            for (std::size_t k = i; k < i + n; ++k) {
                h ^= static_cast<unsigned char>(padded[k]);
                h *= 1099511628211ULL;
            }
            v[h % dim] += (h & (1ULL << 63)) ? -1.0 : 1.0;
        }
    }
    const double nv = norm(v);
    for (double& x : v) x /= nv;
    return v;
}

std::string row(const std::string& text, std::size_t dim, double base)
{
    std::ostringstream ss;
    ss << text;
    for (std::size_t i = 0; i < dim; ++i) ss << '\t' << base + static_cast<double>(i);
    return ss.str();
}

} // namespace

TEST(Hashed, Deterministic)
{
    HashedEmbedding e;
    EXPECT_EQ(e.dimension(), 384u);
    EXPECT_EQ(e.embed("grilled chicken"), e.embed("grilled chicken"));
}

TEST(Hashed, UnitNorm)
{
    HashedEmbedding e;
    for (const char* s : {"a", "apple", "grilled chicken sandwich with lettuce and tomato", "7up"}) {
        EXPECT_NEAR(norm(e.embed(s)), 1.0, 1e-12) << s;
    }
}

TEST(Hashed, MatchesReference)
{
    HashedEmbedding e(64);
    const auto got = e.embed("  Grilled \t Chicken ");
    const auto want = reference_embed(" grilled chicken ", 64);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-15) << i;
}

TEST(Hashed, SharedNgramsRaiseSimilarity)
{
    HashedEmbedding e;
    const auto g = e.embed("grilled chicken");
    EXPECT_GT(cosine_similarity(g, e.embed("roast chicken")), cosine_similarity(g, e.embed("chocolate cake")));
}

TEST(File, Lookup)
{
    const auto f = FileEmbedding::parse(row("apple", 4, 0.5) + "\n" + row("pear", 4, 2.0) + "\n", 4);
    EXPECT_EQ(f->size(), 2u);
    EXPECT_EQ(f->embed("apple"), (std::vector<double>{0.5, 1.5, 2.5, 3.5}));
    try {
        f->embed("unlisted text");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownText);
    }
}

TEST(File, BadDimension)
{
    try {
        FileEmbedding::parse(row("apple", 383, 0.0) + "\n", 384);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("bad dimension"), std::string::npos);
    }
}

TEST(File, FingerprintTracksContent)
{
    const auto a = FileEmbedding::parse(row("apple", 2, 0.0), 2);
    const auto b = FileEmbedding::parse(row("apple", 2, 1.0), 2);
    EXPECT_NE(a->fingerprint(), b->fingerprint());
}

TEST(Fallback, CountsMisses)
{
    std::shared_ptr<const FileEmbedding> f = FileEmbedding::parse(row("apple", 8, 0.0), 8);
    FallbackEmbedding e(f, 8);
    EXPECT_EQ(e.embed("apple"), f->embed("apple"));
    EXPECT_EQ(e.embed("kiwi"), HashedEmbedding(8).embed("kiwi"));
    EXPECT_EQ(e.fallback_count(), 1u);
    EXPECT_THROW(FallbackEmbedding(f, 16), Error);
}
