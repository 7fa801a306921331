#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aigiqa {

/// Deterministic word-level tokenizer used by the stub backbone.
///
/// Text is lowercased and split into alphanumeric runs, with every other
/// non-space character emitted as its own token. A fixed reserved vocabulary
/// (quality adjectives, digits, common prompt words) receives stable ids so
/// distinct category words never collide; all other words are hashed into the
/// remaining id range. Id 0 is padding, the last two ids are start/end.
class WordTokenizer {
public:
    explicit WordTokenizer(int vocab_size);

    std::vector<int> encode(std::string_view text) const;

    static std::vector<std::string> split(std::string_view text);

    int vocab_size() const { return vocab_size_; }
    int pad_id() const { return 0; }
    int start_id() const { return vocab_size_ - 2; }
    int end_id() const { return vocab_size_ - 1; }

private:
    int word_id(const std::string & word) const;

    int vocab_size_;
};

} // namespace aigiqa
