#pragma once

// Aggregate metrics over scored responses: rubric attainment (overall and per
// capability) and stability of scores under controlled perturbations.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lcif/item.hpp"
#include "lcif/scoring.hpp"

namespace lcif::metrics {

// The slice of item metadata the aggregations need; score records only carry
// item ids, so reports join through this map.
struct ItemKey {
    std::string task_id;
    int expression_index = 0;
    int variable_index = 0;
    std::string interval_label;
};

using MetaMap = std::map<std::string, ItemKey>;

MetaMap meta_from_items(const std::vector<BenchmarkItem>& items);
// Streams the items file, keeping only the join keys.
MetaMap load_meta(const std::filesystem::path& items_file);

// Population standard deviation divided by the mean; 0 for empty input, a
// single value, or a zero mean. Invariant under scaling all inputs.
double coefficient_of_variation(const std::vector<double>& xs);

// ---- attainment ---------------------------------------------------------

struct ArsReport {
    std::map<std::string, double> per_task;  // mean rubric attainment in [0, 1]
    double overall = 0.0;  // tasks weighted by their rubric's total weight
};

ArsReport ars(const std::vector<ScoreRecord>& records, const scoring::Rubric& rubric);

// Capability attainment: achieved / weight summed over every scoring point
// tagged with the capability, across all records. Points tagged with several
// capabilities count toward each. Capabilities with no points are omitted.
std::map<std::string, double> ifp(const std::vector<ScoreRecord>& records);

// ---- stability ----------------------------------------------------------

// Score stability per perturbation perspective. For a task, records are
// grouped so that exactly one of {interval, expression, variable} varies
// inside a group; the value is the mean coefficient of variation of the
// groups' normalized scores. "avg" is the mean of the three perspectives,
// "pooled" the coefficient over all of the task's records at once.
struct IfsReport {
    // task -> {length, expression, variable, avg, pooled}
    std::map<std::string, std::map<std::string, double>> per_task;
    // unweighted mean over tasks, same keys
    std::map<std::string, double> overall;
};

IfsReport ifs(const std::vector<ScoreRecord>& records, const MetaMap& meta);

// ---- report -------------------------------------------------------------

struct ModelReport {
    std::string model;
    std::string config_hash;
    std::size_t n_records = 0;
    ArsReport ars;
    std::map<std::string, double> ifp;
    IfsReport ifs;
    // task -> interval -> attainment, for length-degradation curves
    std::map<std::string, std::map<std::string, double>> ars_by_interval;
};

ModelReport build_report(const std::string& model, const std::vector<ScoreRecord>& records,
                         const MetaMap& meta, const scoring::Rubric& rubric);

json report_to_json(const ModelReport& report);
std::string report_summary_text(const ModelReport& report);

}  // namespace lcif::metrics
