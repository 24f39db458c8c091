#include "foodscore/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "foodscore/error.hpp"

namespace foodscore {
namespace {

bool is_alnum(unsigned char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_space(unsigned char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower(unsigned char c) noexcept
{
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

} // namespace

std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return lower(c); });
    return out;
}

std::vector<TokenSpan> tokenize_with_spans(std::string_view text)
{
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alnum(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_alnum(static_cast<unsigned char>(text[j]))) ++j;
        out.push_back({to_lower(text.substr(i, j - i)), i, j - i});
        i = j;
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    for (auto& span : tokenize_with_spans(text)) out.push_back(std::move(span.token));
    return out;
}

bool contains_phrase(const std::vector<std::string>& tokens, std::string_view phrase)
{
    const auto needle = tokenize(phrase);
    if (needle.empty() || needle.size() > tokens.size()) return false;
    return std::search(tokens.begin(), tokens.end(), needle.begin(), needle.end()) != tokens.end();
}

bool has_alpha_token(const std::vector<std::string>& tokens) noexcept
{
    return std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) {
        return std::any_of(t.begin(), t.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    });
}

std::size_t word_count(std::string_view text) noexcept
{
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        if (is_space(static_cast<unsigned char>(c))) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingArtifact, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::set<std::string> read_word_list(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto word = trim(line);
        if (!word.empty()) words.insert(to_lower(word));
    }
    return words;
}

} // namespace foodscore
