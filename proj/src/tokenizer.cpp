#include "lcif/tokenizer.hpp"

#include <limits>
#include <mutex>

#include "lcif/errors.hpp"
#include "lcif/jsonl.hpp"

namespace lcif {
namespace {

int base64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

std::string base64_decode(std::string_view in) {
    std::string out;
    out.reserve(in.size() * 3 / 4);
    int acc = 0;
    int bits = 0;
    for (char c : in) {
        if (c == '=') break;
        int v = base64_value(c);
        if (v < 0) throw IoError("invalid base64 in vocabulary file");
        acc = (acc << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

enum class ByteClass : std::uint8_t { Letter, Digit, Space, Newline, Other };

ByteClass classify(unsigned char c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80) return ByteClass::Letter;
    if (c >= '0' && c <= '9') return ByteClass::Digit;
    if (c == '\r' || c == '\n') return ByteClass::Newline;
    if (c == ' ' || c == '\t' || c == '\v' || c == '\f') return ByteClass::Space;
    return ByteClass::Other;
}

bool is_ws(unsigned char c) {
    ByteClass k = classify(c);
    return k == ByteClass::Space || k == ByteClass::Newline;
}

// Matches the apostrophe contractions handled specially by GPT-4-style
// splitting: 's 'd 'm 't 'll 've 're, case-insensitive.
std::size_t contraction_len(std::string_view text, std::size_t i) {
    if (text[i] != '\'') return 0;
    auto lower = [&](std::size_t k) -> char {
        if (k >= text.size()) return '\0';
        char c = text[k];
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    };
    char a = lower(i + 1);
    char b = lower(i + 2);
    if (a == 's' || a == 'd' || a == 'm' || a == 't') return 2;
    if ((a == 'l' && b == 'l') || (a == 'v' && b == 'e') || (a == 'r' && b == 'e')) return 3;
    return 0;
}

}  // namespace

void Vocabulary::insert(std::string bytes, int rank) {
    if (rank < 0) throw IoError("negative rank in vocabulary");
    if (static_cast<std::size_t>(rank) >= decoder_.size()) decoder_.resize(static_cast<std::size_t>(rank) + 1);
    decoder_[static_cast<std::size_t>(rank)] = bytes;
    encoder_[std::move(bytes)] = rank;
}

Vocabulary Vocabulary::load(const std::filesystem::path& tiktoken_file) {
    std::string data = read_file(tiktoken_file);
    Vocabulary v;
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < data.size()) {
        std::size_t eol = data.find('\n', pos);
        if (eol == std::string::npos) eol = data.size();
        std::string_view line(data.data() + pos, eol - pos);
        pos = eol + 1;
        ++lineno;
        if (line.empty()) continue;
        std::size_t sp = line.find(' ');
        if (sp == std::string_view::npos)
            throw IoError("malformed vocabulary line " + std::to_string(lineno) + " in " +
                          tiktoken_file.string());
        std::string token = base64_decode(line.substr(0, sp));
        int rank = 0;
        for (char c : line.substr(sp + 1)) {
            if (c < '0' || c > '9') throw IoError("malformed rank in " + tiktoken_file.string());
            rank = rank * 10 + (c - '0');
        }
        v.insert(std::move(token), rank);
    }
    if (v.encoder_.empty()) throw IoError("empty vocabulary: " + tiktoken_file.string());
    return v;
}

Vocabulary Vocabulary::from_pairs(const std::vector<std::pair<std::string, int>>& pairs) {
    Vocabulary v;
    for (const auto& [bytes, rank] : pairs) v.insert(bytes, rank);
    return v;
}

int Vocabulary::rank_of(std::string_view bytes) const {
    auto it = encoder_.find(std::string(bytes));
    return it == encoder_.end() ? -1 : it->second;
}

const std::string& Vocabulary::bytes_of(int rank) const {
    if (rank < 0 || static_cast<std::size_t>(rank) >= decoder_.size())
        throw IoError("unknown token rank " + std::to_string(rank));
    return decoder_[static_cast<std::size_t>(rank)];
}

Tokenizer::Tokenizer(Vocabulary vocab) : vocab_(std::move(vocab)) {}

// Split order mirrors the GPT-4 pattern alternation: contractions, optional
// one-byte prefix + letter run, 1-3 digits, optional-space punctuation run with
// trailing newlines, whitespace runs ending at a newline, then remaining
// whitespace (leaving the final space attached to a following word).
std::vector<std::string_view> Tokenizer::split_pieces(std::string_view text) {
    std::vector<std::string_view> pieces;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto cls = [&](std::size_t k) { return classify(static_cast<unsigned char>(text[k])); };
    while (i < n) {
        std::size_t start = i;
        if (std::size_t cl = contraction_len(text, i); cl > 0) {
            i += cl;
            pieces.push_back(text.substr(start, i - start));
            continue;
        }
        ByteClass k = cls(i);
        // [^\r\n letter digit]? letter+
        if (k == ByteClass::Letter ||
            ((k == ByteClass::Space || k == ByteClass::Other) && i + 1 < n && cls(i + 1) == ByteClass::Letter)) {
            if (k != ByteClass::Letter) ++i;  // single prefix byte
            while (i < n && cls(i) == ByteClass::Letter) ++i;
            pieces.push_back(text.substr(start, i - start));
            continue;
        }
        if (k == ByteClass::Digit) {
            std::size_t take = 0;
            while (i < n && take < 3 && cls(i) == ByteClass::Digit) ++i, ++take;
            pieces.push_back(text.substr(start, i - start));
            continue;
        }
        // " ?" punct+ [\r\n]*
        if (k == ByteClass::Other || (k == ByteClass::Space && text[i] == ' ' && i + 1 < n && cls(i + 1) == ByteClass::Other)) {
            if (k == ByteClass::Space) ++i;
            while (i < n && cls(i) == ByteClass::Other) ++i;
            while (i < n && cls(i) == ByteClass::Newline) ++i;
            pieces.push_back(text.substr(start, i - start));
            continue;
        }
        // Whitespace run: up to and including its last newline if it has one;
        // otherwise all of it at end of text, or all but the final space byte
        // when a non-space follows.
        std::size_t j = i;
        std::size_t last_nl = std::string_view::npos;
        while (j < n && is_ws(static_cast<unsigned char>(text[j]))) {
            if (cls(j) == ByteClass::Newline) last_nl = j;
            ++j;
        }
        if (last_nl != std::string_view::npos) {
            i = last_nl + 1;
        } else if (j == n) {
            i = j;
        } else if (j - i > 1) {
            i = j - 1;
        } else {
            i = j;  // single whitespace byte before non-space with no better rule
        }
        pieces.push_back(text.substr(start, i - start));
    }
    return pieces;
}

std::vector<int> Tokenizer::merge_piece(std::string_view piece) const {
    // Standard rank-greedy merge over byte boundaries.
    struct Part {
        std::size_t start;
        int pair_rank;  // rank of merging this part with the next, or INT_MAX
    };
    const int NONE = std::numeric_limits<int>::max();
    std::vector<Part> parts;
    parts.reserve(piece.size() + 1);
    for (std::size_t b = 0; b <= piece.size(); ++b) parts.push_back({b, NONE});

    auto pair_rank = [&](std::size_t idx) -> int {
        if (idx + 2 >= parts.size()) return NONE;
        std::string_view sub = piece.substr(parts[idx].start, parts[idx + 2].start - parts[idx].start);
        int r = vocab_.rank_of(sub);
        return r < 0 ? NONE : r;
    };
    for (std::size_t idx = 0; idx + 1 < parts.size(); ++idx) parts[idx].pair_rank = pair_rank(idx);

    while (parts.size() > 2) {
        std::size_t best = 0;
        int best_rank = NONE;
        for (std::size_t idx = 0; idx + 1 < parts.size(); ++idx) {
            if (parts[idx].pair_rank < best_rank) {
                best_rank = parts[idx].pair_rank;
                best = idx;
            }
        }
        if (best_rank == NONE) break;
        parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(best) + 1);
        parts[best].pair_rank = pair_rank(best);
        if (best > 0) parts[best - 1].pair_rank = pair_rank(best - 1);
    }

    std::vector<int> out;
    out.reserve(parts.size() - 1);
    for (std::size_t idx = 0; idx + 1 < parts.size(); ++idx) {
        std::string_view sub = piece.substr(parts[idx].start, parts[idx + 1].start - parts[idx].start);
        int r = vocab_.rank_of(sub);
        if (r < 0)
            throw IoError("vocabulary cannot encode byte sequence; single-byte tokens missing");
        out.push_back(r);
    }
    return out;
}

void Tokenizer::encode_piece(std::string_view piece, std::vector<int>& out) const {
    if (piece.size() == 1) {
        int r = vocab_.rank_of(piece);
        if (r < 0) throw IoError("vocabulary cannot encode byte; single-byte tokens missing");
        out.push_back(r);
        return;
    }
    {
        std::shared_lock lock(cache_mutex_);
        auto it = piece_cache_.find(std::string(piece));
        if (it != piece_cache_.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
            return;
        }
    }
    if (int whole = vocab_.rank_of(piece); whole >= 0) {
        std::unique_lock lock(cache_mutex_);
        piece_cache_.emplace(std::string(piece), std::vector<int>{whole});
        out.push_back(whole);
        return;
    }
    std::vector<int> ids = merge_piece(piece);
    out.insert(out.end(), ids.begin(), ids.end());
    std::unique_lock lock(cache_mutex_);
    piece_cache_.emplace(std::string(piece), std::move(ids));
}

std::vector<int> Tokenizer::encode(std::string_view text) const {
    std::vector<int> out;
    out.reserve(text.size() / 3);
    for (std::string_view piece : split_pieces(text)) encode_piece(piece, out);
    return out;
}

std::size_t Tokenizer::count_tokens(std::string_view text) const {
    return encode(text).size();
}

std::string Tokenizer::decode(const std::vector<int>& tokens) const {
    std::string out;
    for (int t : tokens) out += vocab_.bytes_of(t);
    return out;
}

std::string Tokenizer::truncate_right(std::string_view text, std::size_t max_tokens) const {
    std::vector<int> ids = encode(text);
    if (ids.size() <= max_tokens) return std::string(text);
    ids.resize(max_tokens);
    for (;;) {
        std::string candidate = decode(ids);
        // Drop a trailing incomplete UTF-8 sequence if the cut split one.
        while (!candidate.empty()) {
            unsigned char last = static_cast<unsigned char>(candidate.back());
            if (last < 0x80) break;
            bool continuation = (last & 0xc0) == 0x80;
            candidate.pop_back();
            if (!continuation) break;  // removed the lead byte, sequence gone
        }
        if (count_tokens(candidate) <= max_tokens) return candidate;
        if (ids.empty()) return std::string();
        ids.pop_back();
    }
}

TokenizerRef load_tokenizer(const std::filesystem::path& vocab_file) {
    return std::make_shared<const Tokenizer>(Vocabulary::load(vocab_file));
}

}  // namespace lcif
