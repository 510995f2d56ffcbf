#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lcif/corpus.hpp"
#include "lcif/expansion.hpp"
#include "lcif/item.hpp"
#include "lcif/tokenizer.hpp"

namespace lcif::taskgen {

struct Interval {
    std::string label;
    std::size_t nominal_tokens = 0;
};

struct TaskPlanEntry {
    std::size_t expressions = 0;
    std::size_t variables = 0;
};

struct Plan {
    std::string name;
    std::size_t reserve_tokens = 700;
    std::vector<Interval> intervals;
    std::map<std::string, TaskPlanEntry> tasks;

    static Plan load(const std::filesystem::path& path);
    // Tasks in canonical order (List, MultiDoc, OneDoc task groups).
    std::vector<std::string> ordered_tasks() const;
    std::size_t expected_items() const;
};

struct TemplateSet {
    std::string task_id;
    std::vector<std::string> texts;  // indexed by expression_index

    static TemplateSet load(const std::filesystem::path& path);
};

// "1st", "2nd", "3rd", "11th", "21st", ...
std::string ordinal(std::size_t n);

// "a", "a and b", "a, b, and c"
std::string join_natural(const std::vector<std::string>& parts);

// Resolves a position spec {mode: nth|percent|from_end, value} against a
// context of n elements to a 1-based index.
std::size_t resolve_position(const json& spec, std::size_t n);

// Strict template rendering: the value keys must equal the template's
// placeholder set exactly, and no braces may survive in the output.
std::string render_instruction(const std::string& template_text,
                               const std::map<std::string, std::string>& values);

struct ListContext {
    std::string text;                   // "1. value" lines joined by newlines
    std::vector<std::string> elements;  // elements[i] sits at position i+1
    std::size_t token_count = 0;
};

struct DocContext {
    std::string text;  // one rendered JSON document per line
    std::vector<corpus::DocRecord> docs;
    std::size_t token_count = 0;
};

struct OneDocContext {
    corpus::LongDoc doc;
};

// Greedy packing to the interval budget (nominal - reserve): elements are
// appended in seeded shuffle order, elements that no longer fit are skipped in
// favour of later smaller ones, and the result is verified by exact recount.
// Final token count lies in [0.9 * budget, budget].
ListContext build_list_context(const corpus::ListPool& pool, std::size_t budget,
                               const Tokenizer& tok, std::uint64_t seed);

// Same packing over rendered document lines. When force_dup_group is set, one
// full duplicate-text group is placed first so duplicate-finding stays
// answerable.
DocContext build_doc_context(const corpus::DocPool& pool, std::size_t budget,
                             const Tokenizer& tok, std::uint64_t seed, bool force_dup_group);

OneDocContext build_onedoc_context(const corpus::EssayPool& pool, std::size_t budget,
                                   const Tokenizer& tok, std::uint64_t seed,
                                   double tag_fraction = 0.1);

// Everything generation needs, loaded once.
struct GeneratorData {
    Plan plan;
    std::map<std::string, TemplateSet> templates;               // by task
    std::map<std::string, expansion::VariableSpace> spaces;     // by task
    std::map<std::string, std::string> descriptions;            // by scenario
    corpus::ListPool list_pool;
    corpus::DocPool doc_pool;
    corpus::EssayPool essay_pool;
    TokenizerRef tokenizer;
    double tag_fraction = 0.1;

    // Loads plan/templates/spaces/descriptions from the standard data layout:
    // <data_dir>/templates/<task>.json, variables/<task>.json,
    // descriptions/<scenario>.txt.
    static GeneratorData load(const std::filesystem::path& data_dir,
                              const std::filesystem::path& plan_file, corpus::ListPool list_pool,
                              corpus::DocPool doc_pool, corpus::EssayPool essay_pool,
                              TokenizerRef tokenizer);

    // Fingerprint over plan, templates, spaces, descriptions, and pools; equal
    // inputs give equal hashes, so artifacts can be cross-checked.
    std::string config_hash(std::uint64_t seed) const;
};

struct GenerationStats {
    std::size_t total = 0;
    std::map<std::string, std::size_t> per_task;
    std::map<std::string, std::size_t> per_interval;
    std::string config_hash;
};

// Emits every item of the plan in deterministic order through the sink.
GenerationStats generate_dataset(const GeneratorData& data, std::uint64_t seed,
                                 const std::function<void(const BenchmarkItem&)>& sink);

// generate_dataset + items.jsonl + dataset_manifest.json in out_dir.
GenerationStats write_dataset(const GeneratorData& data, std::uint64_t seed,
                              const std::filesystem::path& out_dir);

}  // namespace lcif::taskgen
