#include "lcif/item.hpp"

#include "lcif/errors.hpp"

namespace lcif {

json item_to_json(const BenchmarkItem& item) {
    json j{{"item_id", item.item_id},
           {"task_id", item.task_id},
           {"scenario", item.scenario},
           {"nominal_tokens", item.nominal_tokens},
           {"interval_label", item.interval_label},
           {"expression_index", item.expression_index},
           {"variable_index", item.variable_index},
           {"variables", item.variables},
           {"description", item.description},
           {"context", item.context},
           {"instruction", item.instruction},
           {"gold", json{{"kind", item.gold.kind}, {"payload", item.gold.payload}}},
           {"prompt_token_count", item.prompt_token_count},
           {"context_token_count", item.context_token_count},
           {"config_hash", item.config_hash}};
    if (item.gold.count_expected) j["gold"]["count_expected"] = *item.gold.count_expected;
    return j;
}

BenchmarkItem item_from_json(const json& j) {
    BenchmarkItem item;
    item.item_id = j.at("item_id").get<std::string>();
    item.task_id = j.at("task_id").get<std::string>();
    item.scenario = j.at("scenario").get<std::string>();
    item.nominal_tokens = j.at("nominal_tokens").get<std::size_t>();
    item.interval_label = j.at("interval_label").get<std::string>();
    item.expression_index = j.at("expression_index").get<int>();
    item.variable_index = j.at("variable_index").get<int>();
    item.variables = j.at("variables");
    item.description = j.at("description").get<std::string>();
    item.context = j.at("context").get<std::string>();
    item.instruction = j.at("instruction").get<std::string>();
    item.gold.kind = j.at("gold").at("kind").get<std::string>();
    item.gold.payload = j.at("gold").at("payload");
    if (j.at("gold").contains("count_expected"))
        item.gold.count_expected = j["gold"]["count_expected"].get<std::size_t>();
    item.prompt_token_count = j.at("prompt_token_count").get<std::size_t>();
    item.context_token_count = j.at("context_token_count").get<std::size_t>();
    item.config_hash = j.value("config_hash", "");
    return item;
}

json response_to_json(const ResponseRecord& r) {
    json j{{"item_id", r.item_id},
           {"model", r.model},
           {"raw_text", r.raw_text},
           {"truncated_context", r.truncated_context},
           {"request_tokens", r.request_tokens},
           {"attempt", r.attempt},
           {"latency_ms", r.latency_ms},
           {"config_hash", r.config_hash}};
    if (r.error) j["error"] = *r.error;
    return j;
}

ResponseRecord response_from_json(const json& j) {
    ResponseRecord r;
    r.item_id = j.at("item_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.raw_text = j.at("raw_text").get<std::string>();
    r.truncated_context = j.value("truncated_context", false);
    r.request_tokens = j.value("request_tokens", std::size_t{0});
    r.attempt = j.value("attempt", 1);
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    r.latency_ms = j.value("latency_ms", 0.0);
    r.config_hash = j.value("config_hash", "");
    return r;
}

json score_to_json(const ScoreRecord& r) {
    json points = json::array();
    for (const auto& p : r.points)
        points.push_back({{"point_id", p.point_id},
                          {"achieved", p.achieved},
                          {"weight", p.weight},
                          {"capabilities", p.capabilities}});
    return json{{"item_id", r.item_id},     {"model", r.model},
                {"task_id", r.task_id},     {"points", points},
                {"normalized", r.normalized}, {"config_hash", r.config_hash}};
}

ScoreRecord score_from_json(const json& j) {
    ScoreRecord r;
    r.item_id = j.at("item_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.task_id = j.at("task_id").get<std::string>();
    for (const auto& p : j.at("points")) {
        PointScore ps;
        ps.point_id = p.at("point_id").get<std::string>();
        ps.achieved = p.at("achieved").get<double>();
        ps.weight = p.at("weight").get<double>();
        ps.capabilities = p.at("capabilities").get<std::vector<std::string>>();
        r.points.push_back(std::move(ps));
    }
    r.normalized = j.at("normalized").get<double>();
    r.config_hash = j.value("config_hash", "");
    return r;
}

std::string scenario_for_task(const std::string& task_id) {
    if (task_id == "LSI" || task_id == "LMI" || task_id == "LOI" || task_id == "LOE" ||
        task_id == "LBI" || task_id == "LBE")
        return "List";
    if (task_id == "MB" || task_id == "MF") return "MultiDoc";
    if (task_id == "OR" || task_id == "OQ" || task_id == "OE") return "OneDoc";
    throw ConfigError("unknown task id: " + task_id);
}

}  // namespace lcif
