#include "lcif/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "lcif/errors.hpp"

namespace lcif::scoring {
namespace {

std::vector<std::string> normalize_all(const std::vector<std::string>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(normalize_text(s));
    return out;
}

std::unordered_set<std::string> normalize_set(const std::vector<std::string>& v) {
    std::unordered_set<std::string> out;
    for (const auto& s : v) out.insert(normalize_text(s));
    return out;
}

std::vector<std::string> json_string_list(const json& j) {
    std::vector<std::string> out;
    if (j.is_array())
        for (const auto& v : j) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    return out;
}

// Context parsers for origin checks; these read the canonical renderings the
// generator produces ("N. element" lines; one JSON object per document line).
std::vector<std::string> context_list_elements(const std::string& context) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= context.size()) {
        std::size_t eol = context.find('\n', pos);
        if (eol == std::string::npos) eol = context.size();
        std::string_view line(context.data() + pos, eol - pos);
        std::size_t d = 0;
        while (d < line.size() && line[d] >= '0' && line[d] <= '9') ++d;
        if (d > 0 && d + 1 < line.size() && line[d] == '.' && line[d + 1] == ' ')
            out.emplace_back(line.substr(d + 2));
        if (eol == context.size()) break;
        pos = eol + 1;
    }
    return out;
}

std::vector<json> context_docs(const std::string& context) {
    std::vector<json> out;
    std::size_t pos = 0;
    while (pos <= context.size()) {
        std::size_t eol = context.find('\n', pos);
        if (eol == std::string::npos) eol = context.size();
        std::string_view line(context.data() + pos, eol - pos);
        if (!line.empty() && line.front() == '{') {
            json j = json::parse(line, nullptr, false);
            if (j.is_object()) out.push_back(std::move(j));
        }
        if (eol == context.size()) break;
        pos = eol + 1;
    }
    return out;
}

double fraction_in_set(const std::vector<std::string>& pred,
                       const std::unordered_set<std::string>& ref) {
    if (pred.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& p : pred)
        if (ref.count(normalize_text(p))) ++hit;
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

double evaluate_origin(const BenchmarkItem& item, const ExtractedAnswer& ex,
                       const std::string& raw, const RubricPoint& point) {
    const std::string mode = point.params.value("mode", "list");
    double frac = 0.0;
    if (mode == "list") {
        frac = fraction_in_set(ex.as_list(raw), normalize_set(context_list_elements(item.context)));
    } else if (mode == "candidates") {
        auto cands = json_string_list(item.gold.payload.value("candidates", json::array()));
        frac = fraction_in_set(ex.as_list(raw), normalize_set(cands));
    } else if (mode == "doc_attrs") {
        std::string attr = item.gold.payload.value("attribute", "id");
        std::string key = attr == "iD2" ? "iD2" : attr;
        std::unordered_set<std::string> vals;
        for (const auto& d : context_docs(item.context))
            if (d.contains(key) && d[key].is_string())
                vals.insert(normalize_text(d[key].get<std::string>()));
        std::vector<std::string> pred;
        for (const auto& g : ex.as_groups(raw))
            for (const auto& v : g) pred.push_back(v);
        frac = fraction_in_set(pred, vals);
    } else if (mode == "document") {
        std::string doc = normalize_text(item.context);
        auto pred = ex.as_list(raw);
        if (pred.empty()) return 0.0;
        std::size_t hit = 0;
        for (const auto& p : pred) {
            std::string n = normalize_text(p);
            if (!n.empty() && doc.find(n) != std::string::npos) ++hit;
        }
        frac = static_cast<double>(hit) / static_cast<double>(pred.size());
    }
    return frac * point.weight;
}

double evaluate_correctness(const BenchmarkItem& item, const ExtractedAnswer& ex,
                            const std::string& raw, const RubricPoint& point) {
    const Gold& gold = item.gold;
    const json& pl = gold.payload;
    if (gold.kind == "single_element") {
        return normalize_text(ex.as_string(raw)) == normalize_text(pl.value("value", ""))
                   ? point.weight
                   : 0.0;
    }
    if (gold.kind == "option_choice") {
        return normalize_text(ex.as_string(raw)) == normalize_text(pl.value("value", ""))
                   ? point.weight
                   : 0.0;
    }
    if (gold.kind == "element_set_in_window") {
        auto allowed = normalize_set(json_string_list(pl.value("allowed", json::array())));
        return allowed.count(normalize_text(ex.as_string(raw))) ? point.weight : 0.0;
    }
    if (gold.kind == "element_list" || gold.kind == "label_list") {
        auto goldv = normalize_all(
            json_string_list(pl.value(gold.kind == "label_list" ? "labels" : "values", json::array())));
        auto pred = normalize_all(ex.as_list(raw));
        if (goldv.empty()) return 0.0;
        std::size_t hit = 0;
        for (std::size_t i = 0; i < goldv.size() && i < pred.size(); ++i)
            if (pred[i] == goldv[i]) ++hit;
        return static_cast<double>(hit) / static_cast<double>(goldv.size()) * point.weight;
    }
    if (gold.kind == "dup_groups") {
        std::unordered_set<std::string> goldset;
        for (const auto& g : pl.value("groups", json::array()))
            for (const auto& v : g) goldset.insert(normalize_text(v.get<std::string>()));
        if (goldset.empty()) return 0.0;
        std::unordered_set<std::string> pred;
        for (const auto& g : ex.as_groups(raw))
            for (const auto& v : g) pred.insert(normalize_text(v));
        std::size_t hit = 0;
        for (const auto& p : pred)
            if (goldset.count(p)) ++hit;
        return static_cast<double>(hit) / static_cast<double>(goldset.size()) * point.weight;
    }
    if (gold.kind == "key_sentences") {
        auto goldset = normalize_set(json_string_list(pl.value("sentences", json::array())));
        auto pred = normalize_all(ex.as_list(raw));
        if (pred.empty()) return 0.0;
        const std::string mode = point.params.value("mode", "occurrence");
        if (mode == "unique") {
            std::unordered_set<std::string> uniq(pred.begin(), pred.end());
            std::size_t hit = 0;
            for (const auto& p : uniq)
                if (goldset.count(p)) ++hit;
            return static_cast<double>(hit) / static_cast<double>(uniq.size()) * point.weight;
        }
        std::size_t hit = 0;
        for (const auto& p : pred)
            if (goldset.count(p)) ++hit;
        return static_cast<double>(hit) / static_cast<double>(pred.size()) * point.weight;
    }
    if (gold.kind == "ordered_sentences") {
        // Membership against the requested sentences (order scored separately).
        auto goldset = normalize_set(json_string_list(pl.value("values", json::array())));
        auto pred = normalize_all(ex.as_list(raw));
        if (pred.empty()) return 0.0;
        std::size_t hit = 0;
        for (const auto& p : pred)
            if (goldset.count(p)) ++hit;
        return static_cast<double>(hit) / static_cast<double>(pred.size()) * point.weight;
    }
    return 0.0;
}

double evaluate_quantity(const BenchmarkItem& item, const ExtractedAnswer& ex,
                         const std::string& raw, const RubricPoint& point) {
    if (!item.gold.count_expected || *item.gold.count_expected == 0) return 0.0;
    std::size_t n_pred;
    if (point.params.value("count", "list") == "flat") {
        n_pred = 0;
        for (const auto& g : ex.as_groups(raw)) n_pred += g.size();
    } else {
        n_pred = ex.count(raw);
    }
    return score_quantity_weighted(n_pred, *item.gold.count_expected, point.weight);
}

double evaluate_order(const BenchmarkItem& item, const ExtractedAnswer& ex,
                      const std::string& raw, const RubricPoint& point) {
    auto goldv = normalize_all(json_string_list(item.gold.payload.value("values", json::array())));
    auto pred = normalize_all(ex.as_list(raw));
    return order_fraction(pred, goldv) * point.weight;
}

}  // namespace

std::string normalize_text(std::string_view s) {
    // Trim.
    std::size_t b = s.find_first_not_of(" \t\r\n\v\f");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n\v\f");
    s = s.substr(b, e - b + 1);
    // Strip one symmetric surrounding quote pair.
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        s = s.substr(1, s.size() - 2);
    // Trim again and collapse internal whitespace runs.
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // leading whitespace dropped
    for (char c : s) {
        bool ws = c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
        if (ws) {
            if (!in_ws) out += ' ';
            in_ws = true;
        } else {
            out += c;
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

double score_quantity(std::size_t n_pred, std::size_t n_gold) {
    return score_quantity_weighted(n_pred, n_gold, 3.0);
}

double score_quantity_weighted(std::size_t n_pred, std::size_t n_gold, double weight) {
    if (n_gold == 0) return 0.0;
    if (n_pred == n_gold) return weight;
    double diff = n_pred > n_gold ? static_cast<double>(n_pred - n_gold)
                                  : static_cast<double>(n_gold - n_pred);
    double frac = 1.0 - diff / static_cast<double>(n_gold);
    if (frac < 0.0) frac = 0.0;
    return frac * (weight - 1.0);
}

double order_fraction(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold) {
    if (gold.empty()) return 0.0;
    // Keep only predicted entries that appear in gold, then LCS against gold.
    std::unordered_set<std::string> goldset(gold.begin(), gold.end());
    std::vector<std::string> pred;
    for (const auto& p : predicted)
        if (goldset.count(p)) pred.push_back(p);
    const std::size_t n = pred.size(), m = gold.size();
    if (n == 0) return 0.0;
    std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (pred[i - 1] == gold[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(prev[m]) / static_cast<double>(m);
}

double TaskRubric::total_weight() const {
    double w = 0.0;
    for (const auto& p : points) w += p.weight;
    return w;
}

Rubric Rubric::load(const std::filesystem::path& file) {
    static const std::unordered_set<std::string> known_evaluators = {
        "format", "origin", "correctness", "order", "quantity"};
    Rubric rubric;
    json j = read_json_file(file);
    for (auto it = j.begin(); it != j.end(); ++it) {
        TaskRubric task;
        task.task_id = it.key();
        for (const auto& pj : it.value().at("points")) {
            RubricPoint p;
            p.id = pj.at("id").get<std::string>();
            p.description = pj.value("description", "");
            p.weight = pj.at("weight").get<double>();
            p.capabilities = pj.at("capabilities").get<std::vector<std::string>>();
            p.evaluator = pj.at("evaluator").get<std::string>();
            p.params = pj.value("params", json::object());
            if (p.weight <= 0.0)
                throw ConfigError("rubric " + task.task_id + "/" + p.id + ": weight must be > 0");
            if (!known_evaluators.count(p.evaluator))
                throw ConfigError("rubric " + task.task_id + "/" + p.id + ": unknown evaluator " +
                                  p.evaluator);
            for (const auto& c : p.capabilities) {
                bool ok = false;
                for (const auto& known : all_capabilities())
                    if (known == c) ok = true;
                if (!ok)
                    throw ConfigError("rubric " + task.task_id + "/" + p.id +
                                      ": unknown capability " + c);
            }
            if (p.capabilities.empty())
                throw ConfigError("rubric " + task.task_id + "/" + p.id + ": no capabilities");
            task.points.push_back(std::move(p));
        }
        if (task.points.empty()) throw ConfigError("rubric " + task.task_id + ": no points");
        rubric.tasks_[task.task_id] = std::move(task);
    }
    if (rubric.tasks_.empty()) throw ConfigError("rubric file defines no tasks: " + file.string());
    return rubric;
}

const TaskRubric& Rubric::for_task(const std::string& task_id) const {
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) throw ConfigError("rubric has no task " + task_id);
    return it->second;
}

ScoreRecord score_response(const BenchmarkItem& item, const ResponseRecord& response,
                           const Rubric& rubric, const FormatRegistry& formats) {
    const TaskRubric& task = rubric.for_task(item.task_id);
    const FormatSpec& spec = formats.for_task(item.task_id);
    const std::string& raw = response.raw_text;
    ExtractedAnswer ex = extract_answer(raw, spec);

    ScoreRecord rec;
    rec.item_id = item.item_id;
    rec.model = response.model;
    rec.task_id = item.task_id;
    rec.config_hash = item.config_hash;

    double total = 0.0;
    for (const auto& point : task.points) {
        double achieved = 0.0;
        if (point.evaluator == "format") {
            achieved = validate_structured_format(raw, spec, point.weight);
        } else if (point.evaluator == "origin") {
            achieved = evaluate_origin(item, ex, raw, point);
        } else if (point.evaluator == "correctness") {
            achieved = evaluate_correctness(item, ex, raw, point);
        } else if (point.evaluator == "quantity") {
            achieved = evaluate_quantity(item, ex, raw, point);
        } else if (point.evaluator == "order") {
            achieved = evaluate_order(item, ex, raw, point);
        }
        // Clamp defensively; evaluators already stay within range.
        achieved = std::min(std::max(achieved, 0.0), point.weight);
        rec.points.push_back({point.id, achieved, point.weight, point.capabilities});
        total += achieved;
    }
    rec.normalized = total / task.total_weight();
    return rec;
}

double ars_task(const std::vector<ScoreRecord>& records, const TaskRubric& rubric) {
    if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum_of_means = 0.0;
    for (std::size_t p = 0; p < rubric.points.size(); ++p) {
        double acc = 0.0;
        for (const auto& r : records) {
            if (p >= r.points.size() || r.points[p].point_id != rubric.points[p].id)
                throw ConfigError("score record does not match rubric layout for task " +
                                  rubric.task_id);
            acc += r.points[p].achieved;
        }
        sum_of_means += acc / static_cast<double>(records.size());
    }
    return sum_of_means / rubric.total_weight();
}

}  // namespace lcif::scoring
