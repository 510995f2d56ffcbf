#include "lcif/config.hpp"

#include <cstdlib>
#include <set>

#include "lcif/errors.hpp"

namespace lcif {

std::string interpolate_env(const std::string& value) {
    std::string out;
    std::size_t i = 0;
    while (i < value.size()) {
        if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
            std::size_t close = value.find('}', i + 2);
            if (close == std::string::npos)
                throw ConfigError("unterminated ${...} reference in: " + value);
            std::string name = value.substr(i + 2, close - i - 2);
            const char* env = std::getenv(name.c_str());
            if (env == nullptr)
                throw ConfigError("environment variable not set: " + name);
            out += env;
            i = close + 1;
        } else {
            out += value[i];
            ++i;
        }
    }
    return out;
}

std::filesystem::path Config::resolved_vocab() const {
    return vocab_file.empty() ? data_dir / "vocab" / "default.tiktoken" : vocab_file;
}

std::filesystem::path Config::resolved_plan() const {
    return plan_file.empty() ? data_dir / "plans" / "default.json" : plan_file;
}

Config Config::load(const std::filesystem::path& file) {
    json j = read_json_file(file);
    if (!j.is_object()) throw ConfigError("config must be a JSON object: " + file.string());

    static const std::set<std::string> known = {"data_dir", "vocab",    "plan", "pools",
                                                "endpoint", "run",      "tag_fraction"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key: " + key);

    Config c;
    if (j.contains("data_dir"))
        c.data_dir = interpolate_env(j.at("data_dir").get<std::string>());
    if (j.contains("vocab")) c.vocab_file = interpolate_env(j.at("vocab").get<std::string>());
    if (j.contains("plan")) c.plan_file = interpolate_env(j.at("plan").get<std::string>());
    if (j.contains("tag_fraction")) {
        c.tag_fraction = j.at("tag_fraction").get<double>();
        if (c.tag_fraction <= 0.0 || c.tag_fraction >= 1.0)
            throw ConfigError("tag_fraction must lie strictly between 0 and 1");
    }

    if (j.contains("pools")) {
        const json& p = j.at("pools");
        static const std::set<std::string> pool_keys = {"uuids", "texts", "docs", "essays"};
        for (const auto& [key, value] : p.items())
            if (!pool_keys.count(key)) throw ConfigError("unknown pools key: " + key);
        c.pool_uuids = p.value("uuids", c.pool_uuids);
        c.pool_texts = p.value("texts", c.pool_texts);
        c.pool_docs = p.value("docs", c.pool_docs);
        c.pool_essays = p.value("essays", c.pool_essays);
    }

    if (j.contains("endpoint")) {
        const json& e = j.at("endpoint");
        static const std::set<std::string> ep_keys = {"url", "path", "api_key_env",
                                                      "timeout_s"};
        for (const auto& [key, value] : e.items())
            if (!ep_keys.count(key)) throw ConfigError("unknown endpoint key: " + key);
        if (e.contains("url")) c.endpoint_url = interpolate_env(e.at("url").get<std::string>());
        c.endpoint_path = e.value("path", c.endpoint_path);
        c.api_key_env = e.value("api_key_env", c.api_key_env);
        c.endpoint_timeout_s = e.value("timeout_s", c.endpoint_timeout_s);
    }

    if (j.contains("run")) {
        const json& r = j.at("run");
        static const std::set<std::string> run_keys = {"workers", "max_attempts", "backoff_ms",
                                                       "temperature"};
        for (const auto& [key, value] : r.items())
            if (!run_keys.count(key)) throw ConfigError("unknown run key: " + key);
        c.workers = r.value("workers", c.workers);
        c.max_attempts = r.value("max_attempts", c.max_attempts);
        c.backoff_ms = r.value("backoff_ms", c.backoff_ms);
        c.temperature = r.value("temperature", c.temperature);
        if (c.workers == 0) throw ConfigError("run.workers must be positive");
        if (c.max_attempts < 1) throw ConfigError("run.max_attempts must be at least 1");
    }
    return c;
}

}  // namespace lcif
