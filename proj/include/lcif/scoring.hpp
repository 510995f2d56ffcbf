#pragma once

// Weighted rubric engine. Each task carries a checklist of scoring points
// (weight, capability tags, evaluator binding); evaluators are total
// functions from (item, raw answer) to [0, weight]. Answers never throw a
// scoring error: malformed output simply earns fewer points.

#include <map>
#include <string>
#include <vector>

#include "lcif/item.hpp"

namespace lcif::scoring {

// ---- answer format ------------------------------------------------------

struct FormatSpec {
    std::string required_key;  // e.g. "answer"
    std::string value_shape;   // "string" | "string_list" | "string_list_list"
};

// Per-task output schemas, shipped as data alongside the rubric.
class FormatRegistry {
public:
    static FormatRegistry load(const std::filesystem::path& file);
    const FormatSpec& for_task(const std::string& task_id) const;

private:
    std::map<std::string, FormatSpec> specs_;
};

// Three-stage structured-format ladder. Stage maxima are 1 (symbol counts),
// 2 (clean parse; 1 for an embedded balanced-brace object), and 1 (required
// key and value shape); a weight other than 4 scales the maxima
// proportionally.
struct FormatStages {
    bool symbols = false;
    int parse = 0;  // 2 clean, 1 embedded, 0 none
    bool kv = false;
    double score(double weight) const {
        return (static_cast<double>(symbols) + static_cast<double>(parse) +
                static_cast<double>(kv)) *
               (weight / 4.0);
    }
};

FormatStages format_stages(const std::string& answer, const FormatSpec& spec);
double validate_structured_format(const std::string& answer, const FormatSpec& spec, double weight);

// First balanced-brace substring of `text`, or empty when none closes.
std::string first_balanced_braces(std::string_view text);

// Parsed answer payload with plain-text fallbacks, used by non-format points.
struct ExtractedAnswer {
    bool from_json = false;
    json value;  // value under the required key when from_json

    std::string as_string(const std::string& raw) const;
    std::vector<std::string> as_list(const std::string& raw) const;
    std::vector<std::vector<std::string>> as_groups(const std::string& raw) const;
    std::size_t count(const std::string& raw) const;
};

ExtractedAnswer extract_answer(const std::string& raw, const FormatSpec& spec);

// ---- elementary checks --------------------------------------------------

// Trim, collapse internal whitespace, strip one symmetric surrounding quote
// pair; case-preserving.
std::string normalize_text(std::string_view s);

// Published count check: full marks (3) iff exact, otherwise
// max(0, 1 - |pred-gold|/gold) * 2.
double score_quantity(std::size_t n_pred, std::size_t n_gold);
// Same structure at other weights: exact -> weight, partial capped at weight-1.
double score_quantity_weighted(std::size_t n_pred, std::size_t n_gold, double weight);

// Longest common subsequence of predicted (restricted to gold members) vs
// gold, as a fraction of |gold|.
double order_fraction(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold);

// ---- rubric -------------------------------------------------------------

struct RubricPoint {
    std::string id;
    std::string description;
    double weight = 0.0;
    std::vector<std::string> capabilities;
    std::string evaluator;  // format | origin | correctness | order | quantity
    json params;            // evaluator-specific; e.g. {"mode": "occurrence"}
};

struct TaskRubric {
    std::string task_id;
    std::vector<RubricPoint> points;
    double total_weight() const;
};

class Rubric {
public:
    static Rubric load(const std::filesystem::path& file);
    const TaskRubric& for_task(const std::string& task_id) const;
    const std::map<std::string, TaskRubric>& tasks() const { return tasks_; }

private:
    std::map<std::string, TaskRubric> tasks_;
};

// ---- scoring ------------------------------------------------------------

ScoreRecord score_response(const BenchmarkItem& item, const ResponseRecord& response,
                           const Rubric& rubric, const FormatRegistry& formats);

// Mean rubric attainment over a task's records: sum over points of the mean
// achieved value, divided by the task's total weight.
double ars_task(const std::vector<ScoreRecord>& records, const TaskRubric& rubric);

}  // namespace lcif::scoring
