#pragma once

// Record types shared across generation, harness, scoring, and reporting.
// Serialized forms are line-delimited JSON; field layout here is the file
// contract.

#include <optional>
#include <string>
#include <vector>

#include "lcif/jsonl.hpp"

namespace lcif {

// Answer key kinds:
//   single_element         {"value", "index"}
//   element_list           {"values"}                      + count_expected
//   element_set_in_window  {"allowed", "anchor_index", "window"}
//   label_list             {"labels", "candidates"}        + count_expected
//   dup_groups             {"groups", "attribute"}         + count_expected
//   key_sentences          {"sentences"}                   + count_expected
//   option_choice          {"value", "options"}
//   ordered_sentences      {"values", "ids"}               + count_expected
struct Gold {
    std::string kind;
    json payload;
    std::optional<std::size_t> count_expected;
};

struct BenchmarkItem {
    std::string item_id;
    std::string task_id;   // LSI LMI LOI LOE LBI LBE MB MF OR OQ OE
    std::string scenario;  // List | MultiDoc | OneDoc
    std::size_t nominal_tokens = 0;
    std::string interval_label;  // e.g. "4k"
    int expression_index = 0;
    int variable_index = 0;
    json variables;  // resolved placeholder -> rendered string
    std::string description;
    std::string context;
    std::string instruction;
    Gold gold;
    std::size_t prompt_token_count = 0;
    std::size_t context_token_count = 0;
    std::string config_hash;
};

json item_to_json(const BenchmarkItem& item);
BenchmarkItem item_from_json(const json& j);

struct ResponseRecord {
    std::string item_id;
    std::string model;
    std::string raw_text;
    bool truncated_context = false;
    std::size_t request_tokens = 0;
    int attempt = 1;
    std::optional<std::string> error;  // set => terminal failure, raw_text empty
    double latency_ms = 0.0;
    std::string config_hash;
};

json response_to_json(const ResponseRecord& r);
ResponseRecord response_from_json(const json& j);

struct PointScore {
    std::string point_id;
    double achieved = 0.0;  // in [0, weight]
    double weight = 0.0;
    std::vector<std::string> capabilities;
};

struct ScoreRecord {
    std::string item_id;
    std::string model;
    std::string task_id;
    std::vector<PointScore> points;
    double normalized = 0.0;  // sum(achieved) / sum(weight)
    std::string config_hash;
};

json score_to_json(const ScoreRecord& r);
ScoreRecord score_from_json(const json& j);

inline const std::vector<std::string>& all_task_ids() {
    static const std::vector<std::string> ids = {"LSI", "LMI", "LOI", "LOE", "LBI", "LBE",
                                                 "MB",  "MF",  "OR",  "OQ",  "OE"};
    return ids;
}

inline const std::vector<std::string>& all_capabilities() {
    static const std::vector<std::string> caps = {"Ori", "Num", "Spat", "Fmt", "Logic", "Recog"};
    return caps;
}

std::string scenario_for_task(const std::string& task_id);

}  // namespace lcif
