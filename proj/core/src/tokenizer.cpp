#include "aigiqa/tokenizer.hpp"

#include "aigiqa/error.hpp"

#include <array>
#include <cctype>
#include <cstdint>

namespace aigiqa {

namespace {

constexpr std::array<std::string_view, 40> kReserved = {
    "terrible", "bad",   "poor",    "average",   "good",    "perfect", "horrible", "excellent",
    "fair",     "great", "awful",   "0",         "1",       "2",       "3",        "4",
    "5",        "6",     "7",       "8",         "9",       "10",      "a",        "an",
    "the",      "of",    "photo",   "image",     "picture", "quality", "is",       "this",
    "with",     "high",  "low",     "generated", "ai",      ".",       ",",        "!",
};

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

WordTokenizer::WordTokenizer(int vocab_size) : vocab_size_(vocab_size) {
    // pad + reserved + at least a handful of hashed slots + start/end
    if (vocab_size < static_cast<int>(kReserved.size()) + 16) {
        throw Error(ErrorCode::InvalidConfig, "tokenizer vocabulary too small: " + std::to_string(vocab_size));
    }
}

std::vector<std::string> WordTokenizer::split(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) != 0) {
            current.push_back(static_cast<char>(std::tolower(c)));
            continue;
        }
        if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
        if (std::isspace(c) == 0) {
            words.emplace_back(1, ch);
        }
    }
    if (!current.empty()) {
        words.push_back(std::move(current));
    }
    return words;
}

int WordTokenizer::word_id(const std::string & word) const {
    for (std::size_t i = 0; i < kReserved.size(); ++i) {
        if (kReserved[i] == word) {
            return static_cast<int>(i) + 1;
        }
    }
    const int first_hashed = static_cast<int>(kReserved.size()) + 1;
    const int hashed_slots = vocab_size_ - 2 - first_hashed;
    return first_hashed + static_cast<int>(fnv1a(word) % static_cast<std::uint64_t>(hashed_slots));
}

std::vector<int> WordTokenizer::encode(std::string_view text) const {
    std::vector<int> ids;
    for (const auto & w : split(text)) {
        ids.push_back(word_id(w));
    }
    return ids;
}

} // namespace aigiqa
