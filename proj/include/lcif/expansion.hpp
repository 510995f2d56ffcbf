#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lcif/jsonl.hpp"

namespace lcif::expansion {

// Scans "{identifier}" slots in an instruction template. Identifiers are
// [A-Za-z_][A-Za-z0-9_]*. Returns nullopt when braces are unbalanced or a slot
// name is malformed — rewrite candidates with such defects are dropped rather
// than rejected loudly.
std::optional<std::set<std::string>> try_placeholders(const std::string& text);

// Strict variant for authored templates: throws ConfigError on malformed text.
std::set<std::string> placeholders(const std::string& text);

// Produces paraphrase candidates for a seed instruction.
struct RewriteProvider {
    virtual ~RewriteProvider() = default;
    virtual std::vector<std::string> rewrites(const std::string& seed_text, std::size_t n) = 0;
};

// Replays canned candidate lists keyed by seed text. File shape:
//   { "<seed text>": ["candidate", ...], ... }
class FixtureRewriteProvider : public RewriteProvider {
public:
    explicit FixtureRewriteProvider(json table);
    static FixtureRewriteProvider from_file(const std::filesystem::path& path);
    std::vector<std::string> rewrites(const std::string& seed_text, std::size_t n) override;

private:
    json table_;
};

struct Embedder {
    virtual ~Embedder() = default;
    virtual std::size_t dim() const = 0;
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

// Deterministic bag-of-tokens embedding: each whitespace-separated token is
// hashed into one of `dim` buckets with a signed contribution, then the vector
// is L2-normalized. No model weights, same output on every platform.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(std::size_t dim = 64);
    std::size_t dim() const override { return dim_; }
    std::vector<double> embed(const std::string& text) const override;

private:
    std::size_t dim_;
};

// Replays canned vectors keyed by exact text; unknown text is an error.
class FixtureEmbedder : public Embedder {
public:
    explicit FixtureEmbedder(json table);
    static FixtureEmbedder from_file(const std::filesystem::path& path);
    std::size_t dim() const override { return dim_; }
    std::vector<double> embed(const std::string& text) const override;

private:
    std::map<std::string, std::vector<double>> table_;
    std::size_t dim_ = 0;
};

struct KMeansResult {
    std::vector<std::vector<double>> centroids;
    std::vector<std::size_t> assignment;  // point index -> centroid index
    double inertia = 0.0;
    std::size_t iterations = 0;
};

// Seeded k-means++ initialization followed by Lloyd iterations on Euclidean
// distance. Ties break toward the lowest centroid index; an emptied cluster
// keeps its previous centroid. Throws ConfigError when k is 0 or exceeds the
// number of points.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    std::uint64_t seed, std::size_t max_iters = 100);

struct RewriteBatch {
    std::vector<std::string> candidates;  // placeholder-preserving, deduplicated
    std::vector<std::string> dropped;     // rejected candidates, for logging
    std::size_t total = 0;                // everything the provider returned
};

// Asks the provider for n candidates and keeps only those that preserve the
// seed's placeholder set exactly (repeats of the seed or of earlier candidates
// are dropped too).
RewriteBatch gather_rewrites(const std::string& seed_text, RewriteProvider& provider,
                             std::size_t n);

// Clusters candidate embeddings into k groups and returns the member nearest
// each centroid; clusters left empty fall back to the unpicked candidate
// farthest from everything already chosen. k == |candidates| returns them all.
std::vector<std::string> select_representatives(const std::vector<std::string>& candidates,
                                                const Embedder& embedder, std::size_t k,
                                                std::uint64_t seed);

struct ExpansionResult {
    std::vector<std::string> selected;  // exactly k paraphrases
    std::size_t candidates_total = 0;
    std::size_t candidates_usable = 0;
    std::vector<std::string> dropped;  // failed the placeholder-set filter
};

// Rewrite -> filter -> embed -> cluster -> select. Candidates must preserve the
// seed's placeholder set exactly; survivors are deduplicated, clustered into k
// groups, and the member nearest each centroid is selected. Clusters left empty
// fall back to the unpicked candidate farthest from everything already chosen,
// so the result always holds k distinct expressions (or ConfigError when fewer
// than k usable candidates exist).
ExpansionResult expand_instruction(const std::string& seed_text, RewriteProvider& provider,
                                   const Embedder& embedder, std::size_t k, std::uint64_t seed,
                                   std::size_t oversample = 4);

// One variable dimension of a task's variable space.
struct VariableDimension {
    std::string name;
    std::string kind;  // position | numeric | phrase | sentence | option_pair |
                       // format_indicator | id_list
    std::vector<json> candidates;
};

struct VariableSpace {
    std::string task_id;
    std::vector<VariableDimension> dimensions;

    static VariableSpace load(const std::filesystem::path& path);
    std::size_t combinations() const;  // product of candidate counts
};

// Draws n distinct assignments (one candidate per dimension, keyed by dimension
// name). Non-position dimensions use their candidates as evenly as possible
// (usage counts differ by at most one). Position dimensions are stratified over
// the candidates' "section" field — the middle section receives the largest
// share (roughly half) and every section gets at least one draw once n >= 3.
// Throws ConfigError when n exceeds the number of possible combinations.
std::vector<json> sample_variables(const VariableSpace& space, std::size_t n, std::uint64_t seed);

}  // namespace lcif::expansion
