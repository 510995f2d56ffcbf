#include "lcif/metrics.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "lcif/errors.hpp"
#include "lcif/jsonl.hpp"

namespace lcif::metrics {

MetaMap meta_from_items(const std::vector<BenchmarkItem>& items) {
    MetaMap meta;
    for (const auto& it : items)
        meta[it.item_id] = {it.task_id, it.expression_index, it.variable_index,
                           it.interval_label};
    return meta;
}

MetaMap load_meta(const std::filesystem::path& items_file) {
    MetaMap meta;
    for_each_jsonl(items_file, [&](json&& j) {
        meta[j.at("item_id").get<std::string>()] = {
            j.at("task_id").get<std::string>(), j.at("expression_index").get<int>(),
            j.at("variable_index").get<int>(), j.at("interval_label").get<std::string>()};
    });
    return meta;
}

double coefficient_of_variation(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    // A constant sequence is exactly stable; don't let the rounded mean leak
    // a nonzero deviation.
    bool constant = true;
    for (double x : xs)
        if (x != xs.front()) {
            constant = false;
            break;
        }
    if (constant) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return std::sqrt(var) / mean;
}

ArsReport ars(const std::vector<ScoreRecord>& records, const scoring::Rubric& rubric) {
    std::map<std::string, std::vector<ScoreRecord>> by_task;
    for (const auto& r : records) by_task[r.task_id].push_back(r);

    ArsReport report;
    double weighted_sum = 0.0, weight_total = 0.0;
    for (const auto& [task, group] : by_task) {
        const auto& task_rubric = rubric.for_task(task);
        double value = scoring::ars_task(group, task_rubric);
        report.per_task[task] = value;
        weighted_sum += task_rubric.total_weight() * value;
        weight_total += task_rubric.total_weight();
    }
    report.overall = weight_total > 0.0 ? weighted_sum / weight_total : 0.0;
    return report;
}

std::map<std::string, double> ifp(const std::vector<ScoreRecord>& records) {
    std::map<std::string, double> achieved, weight;
    for (const auto& r : records)
        for (const auto& p : r.points)
            for (const auto& cap : p.capabilities) {
                achieved[cap] += p.achieved;
                weight[cap] += p.weight;
            }
    std::map<std::string, double> out;
    for (const auto& [cap, w] : weight)
        if (w > 0.0) out[cap] = achieved[cap] / w;
    return out;
}

namespace {

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

// Mean group coefficient of variation, where the group key pins every axis
// except the one under study.
double perspective_value(const std::vector<std::pair<ItemKey, double>>& rows,
                         const std::string& perspective) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& [key, score] : rows) {
        std::string group_key;
        if (perspective == "length")
            group_key = std::to_string(key.expression_index) + "|" +
                        std::to_string(key.variable_index);
        else if (perspective == "expression")
            group_key = key.interval_label + "|" + std::to_string(key.variable_index);
        else
            group_key = key.interval_label + "|" + std::to_string(key.expression_index);
        groups[group_key].push_back(score);
    }
    std::vector<double> cvs;
    for (const auto& [group_key, scores] : groups)
        cvs.push_back(coefficient_of_variation(scores));
    return mean_of(cvs);
}

}  // namespace

IfsReport ifs(const std::vector<ScoreRecord>& records, const MetaMap& meta) {
    std::map<std::string, std::vector<std::pair<ItemKey, double>>> by_task;
    for (const auto& r : records) {
        auto it = meta.find(r.item_id);
        if (it == meta.end())
            throw ConfigError("score record references unknown item: " + r.item_id);
        by_task[it->second.task_id].push_back({it->second, r.normalized});
    }

    IfsReport report;
    static const std::vector<std::string> perspectives = {"length", "expression", "variable"};
    for (const auto& [task, rows] : by_task) {
        auto& entry = report.per_task[task];
        std::vector<double> values;
        for (const auto& p : perspectives) {
            entry[p] = perspective_value(rows, p);
            values.push_back(entry[p]);
        }
        entry["avg"] = mean_of(values);
        std::vector<double> all_scores;
        for (const auto& [key, score] : rows) all_scores.push_back(score);
        entry["pooled"] = coefficient_of_variation(all_scores);
    }

    for (const auto& key : {"length", "expression", "variable", "avg", "pooled"}) {
        std::vector<double> values;
        for (const auto& [task, entry] : report.per_task) values.push_back(entry.at(key));
        report.overall[key] = mean_of(values);
    }
    return report;
}

ModelReport build_report(const std::string& model, const std::vector<ScoreRecord>& records,
                         const MetaMap& meta, const scoring::Rubric& rubric) {
    ModelReport report;
    report.model = model;
    report.n_records = records.size();
    if (!records.empty()) report.config_hash = records.front().config_hash;
    report.ars = ars(records, rubric);
    report.ifp = ifp(records);
    report.ifs = ifs(records, meta);

    std::map<std::string, std::map<std::string, std::vector<ScoreRecord>>> cells;
    for (const auto& r : records) {
        auto it = meta.find(r.item_id);
        if (it == meta.end())
            throw ConfigError("score record references unknown item: " + r.item_id);
        cells[r.task_id][it->second.interval_label].push_back(r);
    }
    for (const auto& [task, by_interval] : cells)
        for (const auto& [interval, group] : by_interval)
            report.ars_by_interval[task][interval] =
                scoring::ars_task(group, rubric.for_task(task));
    return report;
}

json report_to_json(const ModelReport& report) {
    json ifs_tasks = json::object();
    for (const auto& [task, entry] : report.ifs.per_task) ifs_tasks[task] = entry;
    return {{"model", report.model},
            {"config_hash", report.config_hash},
            {"n_records", report.n_records},
            {"ars", {{"per_task", report.ars.per_task}, {"overall", report.ars.overall}}},
            {"ifp", report.ifp},
            {"ifs", {{"per_task", ifs_tasks}, {"overall", report.ifs.overall}}},
            {"ars_by_interval", report.ars_by_interval}};
}

std::string report_summary_text(const ModelReport& report) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << "model: " << report.model << "\n";
    out << "config_hash: " << report.config_hash << "\n";
    out << "records: " << report.n_records << "\n\n";

    out << "attainment (overall " << report.ars.overall << ")\n";
    for (const auto& [task, value] : report.ars.per_task)
        out << "  " << task << ": " << value << "\n";

    out << "\ncapabilities\n";
    for (const auto& [cap, value] : report.ifp) out << "  " << cap << ": " << value << "\n";

    out << "\nstability (lower is steadier)\n";
    out << "  task      length  expression  variable  avg     pooled\n";
    for (const auto& [task, entry] : report.ifs.per_task) {
        out << "  " << task;
        for (std::size_t i = task.size(); i < 10; ++i) out << ' ';
        out << entry.at("length") << "  " << entry.at("expression") << "      "
            << entry.at("variable") << "    " << entry.at("avg") << "  " << entry.at("pooled")
            << "\n";
    }
    out << "  overall   " << report.ifs.overall.at("length") << "  "
        << report.ifs.overall.at("expression") << "      " << report.ifs.overall.at("variable")
        << "    " << report.ifs.overall.at("avg") << "  " << report.ifs.overall.at("pooled")
        << "\n";

    out << "\nattainment by interval\n";
    for (const auto& [task, by_interval] : report.ars_by_interval) {
        out << "  " << task << ":";
        for (const auto& [interval, value] : by_interval)
            out << "  " << interval << "=" << value;
        out << "\n";
    }
    return out.str();
}

}  // namespace lcif::metrics
