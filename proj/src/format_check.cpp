#include <algorithm>

#include "lcif/errors.hpp"
#include "lcif/scoring.hpp"

namespace lcif::scoring {
namespace {

bool shape_matches(const json& value, const std::string& shape) {
    if (shape == "string") return value.is_string();
    if (shape == "string_list") {
        if (!value.is_array()) return false;
        return std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_string(); });
    }
    if (shape == "string_list_list") {
        if (!value.is_array()) return false;
        return std::all_of(value.begin(), value.end(), [](const json& v) {
            return v.is_array() &&
                   std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); });
        });
    }
    return false;
}

std::string_view trim_view(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n\v\f");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n\v\f");
    return s.substr(b, e - b + 1);
}

json parse_object(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return json();  // null = failure
    return j;
}

// Lines that look like enumerated items: "- x", "* x", "3. x", "3) x".
std::size_t bullet_count(std::string_view raw) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        if (eol == std::string_view::npos) eol = raw.size();
        std::string_view line = trim_view(raw.substr(pos, eol - pos));
        if (!line.empty()) {
            if (line[0] == '-' || line[0] == '*' || line[0] == '+') {
                ++count;
            } else {
                std::size_t d = 0;
                while (d < line.size() && line[d] >= '0' && line[d] <= '9') ++d;
                if (d > 0 && d < line.size() && (line[d] == '.' || line[d] == ')')) ++count;
            }
        }
        if (eol == raw.size()) break;
        pos = eol + 1;
    }
    return count;
}

std::vector<std::string> quoted_strings(std::string_view raw) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] == '"') {
            std::size_t close = raw.find('"', i + 1);
            if (close == std::string_view::npos) break;
            out.emplace_back(raw.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace

std::string first_balanced_braces(std::string_view text) {
    std::size_t start = text.find('{');
    if (start == std::string_view::npos) return {};
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) return std::string(text.substr(start, i - start + 1));
        }
    }
    return {};
}

FormatStages format_stages(const std::string& answer, const FormatSpec& spec) {
    FormatStages st;

    std::size_t braces = 0, quotes = 0, colons = 0;
    for (char c : answer) {
        if (c == '{' || c == '}') ++braces;
        else if (c == '"') ++quotes;
        else if (c == ':') ++colons;
    }
    st.symbols = braces >= 2 && quotes >= 4 && colons >= 1;

    json obj = parse_object(trim_view(answer));
    if (obj.is_object()) {
        st.parse = 2;
    } else {
        std::string embedded = first_balanced_braces(answer);
        if (!embedded.empty()) {
            obj = parse_object(embedded);
            if (obj.is_object()) st.parse = 1;
        }
    }

    if (obj.is_object() && obj.contains(spec.required_key))
        st.kv = shape_matches(obj[spec.required_key], spec.value_shape);
    return st;
}

double validate_structured_format(const std::string& answer, const FormatSpec& spec, double weight) {
    return format_stages(answer, spec).score(weight);
}

ExtractedAnswer extract_answer(const std::string& raw, const FormatSpec& spec) {
    ExtractedAnswer out;
    json obj = parse_object(trim_view(raw));
    if (!obj.is_object()) {
        std::string embedded = first_balanced_braces(raw);
        if (!embedded.empty()) obj = parse_object(embedded);
    }
    if (obj.is_object() && obj.contains(spec.required_key)) {
        out.from_json = true;
        out.value = obj[spec.required_key];
    }
    return out;
}

std::string ExtractedAnswer::as_string(const std::string& raw) const {
    if (from_json) {
        if (value.is_string()) return value.get<std::string>();
        return value.dump();
    }
    return std::string(trim_view(raw));
}

std::vector<std::string> ExtractedAnswer::as_list(const std::string& raw) const {
    std::vector<std::string> out;
    if (from_json && value.is_array()) {
        for (const auto& v : value)
            out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        return out;
    }
    if (from_json && value.is_string()) return {value.get<std::string>()};
    // Plain-text fallbacks: bullet/numbered lines, then quoted strings, then
    // the trimmed text as a single entry.
    std::size_t bullets = bullet_count(raw);
    if (bullets > 0) {
        std::size_t pos = 0;
        while (pos <= raw.size()) {
            std::size_t eol = raw.find('\n', pos);
            if (eol == std::string::npos) eol = raw.size();
            std::string_view line = trim_view(std::string_view(raw).substr(pos, eol - pos));
            if (!line.empty()) {
                std::size_t body = 0;
                if (line[0] == '-' || line[0] == '*' || line[0] == '+') {
                    body = 1;
                } else {
                    while (body < line.size() && line[body] >= '0' && line[body] <= '9') ++body;
                    if (body < line.size() && (line[body] == '.' || line[body] == ')')) ++body;
                    else body = 0;
                }
                if (body > 0) out.emplace_back(trim_view(line.substr(body)));
            }
            if (eol == raw.size()) break;
            pos = eol + 1;
        }
        return out;
    }
    auto quoted = quoted_strings(raw);
    if (!quoted.empty()) return quoted;
    std::string_view t = trim_view(raw);
    if (!t.empty()) out.emplace_back(t);
    return out;
}

std::vector<std::vector<std::string>> ExtractedAnswer::as_groups(const std::string& raw) const {
    std::vector<std::vector<std::string>> out;
    if (from_json && value.is_array()) {
        for (const auto& g : value) {
            std::vector<std::string> group;
            if (g.is_array()) {
                for (const auto& v : g)
                    group.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            } else if (g.is_string()) {
                group.push_back(g.get<std::string>());
            }
            out.push_back(std::move(group));
        }
        return out;
    }
    // Fallback: each non-empty line is a comma-separated group.
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        if (eol == std::string::npos) eol = raw.size();
        std::string_view line = trim_view(std::string_view(raw).substr(pos, eol - pos));
        if (!line.empty()) {
            std::vector<std::string> group;
            std::size_t p = 0;
            while (p <= line.size()) {
                std::size_t comma = line.find(',', p);
                if (comma == std::string_view::npos) comma = line.size();
                std::string_view cell = trim_view(line.substr(p, comma - p));
                if (!cell.empty()) group.emplace_back(cell);
                if (comma == line.size()) break;
                p = comma + 1;
            }
            if (!group.empty()) out.push_back(std::move(group));
        }
        if (eol == raw.size()) break;
        pos = eol + 1;
    }
    return out;
}

std::size_t ExtractedAnswer::count(const std::string& raw) const {
    if (from_json) {
        if (value.is_array()) return value.size();
        if (value.is_number_unsigned() || value.is_number_integer()) {
            auto v = value.get<long long>();
            return v > 0 ? static_cast<std::size_t>(v) : 0;
        }
        if (value.is_string()) return value.get<std::string>().empty() ? 0 : 1;
        return 0;
    }
    if (std::size_t bullets = bullet_count(raw); bullets > 0) return bullets;
    if (auto quoted = quoted_strings(raw); !quoted.empty()) return quoted.size();
    return 0;  // unextractable
}

FormatRegistry FormatRegistry::load(const std::filesystem::path& file) {
    FormatRegistry reg;
    json j = read_json_file(file);
    for (auto it = j.begin(); it != j.end(); ++it) {
        FormatSpec spec;
        spec.required_key = it.value().at("required_key").get<std::string>();
        spec.value_shape = it.value().at("value_shape").get<std::string>();
        if (spec.value_shape != "string" && spec.value_shape != "string_list" &&
            spec.value_shape != "string_list_list")
            throw ConfigError("format spec for " + it.key() + ": unknown value_shape " +
                              spec.value_shape);
        reg.specs_[it.key()] = std::move(spec);
    }
    return reg;
}

const FormatSpec& FormatRegistry::for_task(const std::string& task_id) const {
    auto it = specs_.find(task_id);
    if (it == specs_.end()) throw ConfigError("no format spec for task " + task_id);
    return it->second;
}

}  // namespace lcif::scoring
