#pragma once

#include <transcend/error.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace transcend::chess {

/// The 32-symbol character vocabulary, index order fixed.
inline constexpr std::string_view kVocabulary = " 0123456789abcdefghKQRBNOx+#=-/.";
static_assert(kVocabulary.size() == 32);

inline constexpr int kVocabularyVersion = 1;

namespace detail {

inline constexpr std::array<std::int8_t, 256> make_token_index()
{
    std::array<std::int8_t, 256> t{};
    for (auto& v : t)
        v = -1;
    for (std::size_t i = 0; i < kVocabulary.size(); ++i)
        t[static_cast<unsigned char>(kVocabulary[i])] = static_cast<std::int8_t>(i);
    return t;
}

inline constexpr auto kTokenIndex = make_token_index();

} // namespace detail

using TokenStream = std::vector<std::uint8_t>;

inline TokenStream tokenize32(std::string_view text)
{
    TokenStream out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto id = detail::kTokenIndex[static_cast<unsigned char>(text[i])];
        if (id < 0)
            throw Error(Errc::UnknownSymbol, "character " + std::to_string(static_cast<unsigned char>(text[i]))
                                                 + " at position " + std::to_string(i) + " is outside the vocabulary");
        out.push_back(static_cast<std::uint8_t>(id));
    }
    return out;
}

inline std::string detokenize(std::span<const std::uint8_t> ids)
{
    std::string out;
    out.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= kVocabulary.size())
            throw Error(Errc::UnknownSymbol, "token id " + std::to_string(ids[i]) + " at position " + std::to_string(i));
        out += kVocabulary[ids[i]];
    }
    return out;
}

/// One "index<TAB>symbol" line per entry.
inline std::string vocabulary_table()
{
    std::string out;
    for (std::size_t i = 0; i < kVocabulary.size(); ++i) {
        out += std::to_string(i);
        out += '\t';
        out += kVocabulary[i];
        out += '\n';
    }
    return out;
}

} // namespace transcend::chess
