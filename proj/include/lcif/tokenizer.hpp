#pragma once

// Byte-level BPE tokenizer. Loads standard tiktoken-format vocabulary files
// (base64 token bytes + rank per line), splits text with GPT-4-style rules,
// then merges bytes by rank within each piece. A memo cache keyed by piece
// bytes makes repeated counting of shared pool elements cheap; the cache is
// guarded so one instance can serve concurrent callers.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lcif {

class Vocabulary {
public:
    static Vocabulary load(const std::filesystem::path& tiktoken_file);
    // Builds a vocabulary from explicit (bytes, rank) pairs; used by tests.
    static Vocabulary from_pairs(const std::vector<std::pair<std::string, int>>& pairs);

    int rank_of(std::string_view bytes) const;  // -1 when absent
    const std::string& bytes_of(int rank) const;
    std::size_t size() const { return decoder_.size(); }

private:
    std::unordered_map<std::string, int> encoder_;
    std::vector<std::string> decoder_;  // rank -> bytes
    void insert(std::string bytes, int rank);
};

class Tokenizer {
public:
    explicit Tokenizer(Vocabulary vocab);

    std::size_t count_tokens(std::string_view text) const;
    std::vector<int> encode(std::string_view text) const;
    std::string decode(const std::vector<int>& tokens) const;

    // Longest prefix of `text` on a token boundary whose recount is <= max_tokens.
    // D and I framing is the caller's concern; this only trims the given string.
    std::string truncate_right(std::string_view text, std::size_t max_tokens) const;

    // Splits text into BPE pre-token pieces (exposed for tests).
    static std::vector<std::string_view> split_pieces(std::string_view text);

    const Vocabulary& vocab() const { return vocab_; }

private:
    void encode_piece(std::string_view piece, std::vector<int>& out) const;
    std::vector<int> merge_piece(std::string_view piece) const;

    Vocabulary vocab_;
    mutable std::shared_mutex cache_mutex_;
    mutable std::unordered_map<std::string, std::vector<int>> piece_cache_;
};

// Shared tokenizer handle: modules that need counting hold one of these.
using TokenizerRef = std::shared_ptr<const Tokenizer>;

TokenizerRef load_tokenizer(const std::filesystem::path& vocab_file);

}  // namespace lcif
