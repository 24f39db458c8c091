#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace foodscore {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);

/// Lowercased maximal runs of ASCII letters and digits. Every other byte separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Token with its byte range in the original text.
struct TokenSpan {
    std::string token;  // lowercased
    std::size_t begin;
    std::size_t length;
};

std::vector<TokenSpan> tokenize_with_spans(std::string_view text);

/// True if the phrase's tokens occur as a contiguous run in `tokens`.
bool contains_phrase(const std::vector<std::string>& tokens, std::string_view phrase);

bool has_alpha_token(const std::vector<std::string>& tokens) noexcept;

/// Number of whitespace-separated words in the trimmed text.
std::size_t word_count(std::string_view text) noexcept;

/// One entry per non-empty line; '#' starts a comment. Entries are lowercased and trimmed.
std::set<std::string> read_word_list(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

} // namespace foodscore
