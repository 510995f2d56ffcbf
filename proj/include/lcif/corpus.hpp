#pragma once

// Corpus pools for the three scenario families:
//   - list pool: unique UUID / instruction-phrase elements with token counts
//   - document pool: six-field records with an exact text-duplication quota
//   - long-document builder: essays concatenated to a token target with a
//     fraction of sentences wrapped in key markers
//
// Pools serialize to line-delimited JSON with a manifest sidecar and reload
// byte-identically.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcif/jsonl.hpp"
#include "lcif/rng.hpp"
#include "lcif/tokenizer.hpp"

namespace lcif::corpus {

struct ListElement {
    std::string value;
    std::string kind;  // "uuid" | "text"
    std::size_t token_count = 0;
};

struct ListPool {
    std::vector<ListElement> elements;
    std::uint64_t seed = 0;
};

struct DocRecord {
    std::string text;
    std::string id;
    std::string id2;  // serialized under the field name "iD2"
    std::optional<std::string> title;
    std::string date;
    std::optional<std::string> source;
    std::size_t token_count = 0;  // of the rendered record line
    int dup_group = -1;           // generator-side ground truth; -1 = unique text
};

struct DocPool {
    std::vector<DocRecord> docs;
    double duplication_rate = 0.0;
    std::uint64_t seed = 0;
};

struct DocSentence {
    std::string text;
    std::size_t start = 0;  // char span of the bare sentence in the document
    std::size_t end = 0;
    int tag_index = -1;  // index into LongDoc::tags, -1 if untagged
};

struct TaggedSentence {
    std::string id;    // e.g. "K07"; unique, fixed width so lexicographic == numeric
    std::string type;  // Topic | Evidence | Concession
    std::string sentence;
    std::size_t start = 0;
    std::size_t end = 0;
};

struct LongDoc {
    std::string text;
    std::vector<DocSentence> sentences;
    std::vector<TaggedSentence> tags;
    std::size_t token_count = 0;
};

struct EssayPool {
    std::vector<std::string> texts;
    std::uint64_t seed = 0;
};

// ---- ingestion ----------------------------------------------------------

enum class IngestMode { Lines, Paragraphs };

std::vector<std::string> ingest_texts(const std::filesystem::path& file, IngestMode mode);

// ---- builders -----------------------------------------------------------

struct ListPoolParams {
    std::size_t n_uuid = 2600;
    std::size_t n_text = 2600;
    std::size_t min_tokens = 5;
    std::size_t max_tokens = 40;
};

// Elements are generated (or filtered from `texts` if non-empty), checked to
// the token range, deduplicated, and shuffled once; context packing later
// takes prefixes of this order.
ListPool build_list_pool(const ListPoolParams& params, std::uint64_t seed, const Tokenizer& tok,
                         const std::vector<std::string>& texts = {});

struct DocPoolParams {
    std::size_t n_docs = 400;
    double duplication_rate = 0.25;
    std::size_t min_tokens = 300;  // text field token range
    std::size_t max_tokens = 500;
    double title_omit_prob = 0.2;
    double source_omit_prob = 0.2;
};

// Exactly round(n_docs * duplication_rate) documents share their text with at
// least one other document (a rounded quota of 1 is raised to 2, since a
// single document cannot be a duplicate). Duplicate groups are pairs plus one
// triple when the quota is odd. All ids and iD2 values are unique.
DocPool build_doc_pool(const DocPoolParams& params, std::uint64_t seed, const Tokenizer& tok,
                       const std::vector<std::string>& texts = {});

// Serialized one-line JSON form of a document as it appears in contexts.
std::string render_doc(const DocRecord& doc);

struct LongDocParams {
    std::size_t target_tokens = 4096;
    double tag_fraction = 0.1;
    std::vector<std::string> tag_types = {"Topic", "Evidence", "Concession"};
};

using SentenceSplitter = std::function<std::vector<std::string>(std::string_view)>;
std::vector<std::string> default_sentence_splitter(std::string_view text);

// Concatenates essays sentence-by-sentence up to the token target, wraps the
// chosen fraction (at least one) in [[KEY|type|id]] ... [[/KEY]] markers with
// ids assigned in shuffled order, and records char spans for every sentence.
LongDoc build_long_doc(const LongDocParams& params, std::uint64_t seed, const Tokenizer& tok,
                       const std::vector<std::string>& essays,
                       const SentenceSplitter& splitter = default_sentence_splitter);

// Removes key markers, restoring the untagged concatenation.
std::string strip_tags(std::string_view tagged_text);

// Default essay material when the user brings no corpus.
EssayPool build_essay_pool(std::size_t n_essays, std::uint64_t seed);

// ---- persistence --------------------------------------------------------

void save_list_pool(const ListPool& pool, const std::filesystem::path& file);
ListPool load_list_pool(const std::filesystem::path& file);

void save_doc_pool(const DocPool& pool, const std::filesystem::path& file);
DocPool load_doc_pool(const std::filesystem::path& file);

void save_essay_pool(const EssayPool& pool, const std::filesystem::path& file);
EssayPool load_essay_pool(const std::filesystem::path& file);

}  // namespace lcif::corpus
