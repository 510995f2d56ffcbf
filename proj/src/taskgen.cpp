#include "lcif/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "lcif/errors.hpp"
#include "lcif/hashing.hpp"
#include "lcif/jsonl.hpp"

namespace lcif::taskgen {

namespace {

constexpr double kMinFill = 0.90;
constexpr std::size_t kMinListElements = 50;  // keeps every authored position spec in bounds

std::string read_text_file(const std::filesystem::path& path) {
    std::string s = read_file(path);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

Plan Plan::load(const std::filesystem::path& path) {
    json j = read_json_file(path);
    Plan p;
    p.name = j.value("name", "");
    p.reserve_tokens = j.value("reserve_tokens", std::size_t{700});
    if (p.name.empty()) throw ConfigError("plan missing name: " + path.string());
    if (!j.contains("intervals") || !j["intervals"].is_array() || j["intervals"].empty())
        throw ConfigError("plan needs a non-empty intervals array");
    std::set<std::string> labels;
    for (const auto& iv : j["intervals"]) {
        Interval interval;
        interval.label = iv.value("label", "");
        interval.nominal_tokens = iv.value("nominal_tokens", std::size_t{0});
        if (interval.label.empty() || !labels.insert(interval.label).second)
            throw ConfigError("plan interval labels must be unique and non-empty");
        if (interval.nominal_tokens <= p.reserve_tokens)
            throw ConfigError("interval '" + interval.label +
                              "' must exceed the reserve of " +
                              std::to_string(p.reserve_tokens) + " tokens");
        p.intervals.push_back(std::move(interval));
    }
    if (!j.contains("tasks") || !j["tasks"].is_object() || j["tasks"].empty())
        throw ConfigError("plan needs a non-empty tasks object");
    for (const auto& [task, cfg] : j["tasks"].items()) {
        scenario_for_task(task);  // validates the id
        TaskPlanEntry entry;
        entry.expressions = cfg.value("expressions", std::size_t{0});
        entry.variables = cfg.value("variables", std::size_t{0});
        if (entry.expressions == 0 || entry.variables == 0)
            throw ConfigError("plan task '" + task +
                              "' needs positive expressions and variables");
        p.tasks[task] = entry;
    }
    return p;
}

std::vector<std::string> Plan::ordered_tasks() const {
    std::vector<std::string> out;
    for (const auto& t : all_task_ids())
        if (tasks.count(t)) out.push_back(t);
    return out;
}

std::size_t Plan::expected_items() const {
    std::size_t total = 0;
    for (const auto& [task, entry] : tasks)
        total += entry.expressions * entry.variables * intervals.size();
    return total;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
    json j = read_json_file(path);
    TemplateSet set;
    set.task_id = j.value("task", "");
    if (set.task_id.empty()) throw ConfigError("template file missing task: " + path.string());
    if (!j.contains("templates") || !j["templates"].is_array() || j["templates"].empty())
        throw ConfigError("template file needs a non-empty templates array");
    set.texts.resize(j["templates"].size());
    std::vector<bool> seen(set.texts.size(), false);
    std::optional<std::set<std::string>> shared_slots;
    for (const auto& t : j["templates"]) {
        std::size_t idx = t.value("expression_index", std::size_t{9999});
        if (idx >= set.texts.size() || seen[idx])
            throw ConfigError("expression_index values must cover 0..n-1 exactly once in " +
                              path.string());
        std::string text = t.value("text", "");
        auto slots = expansion::placeholders(text);
        std::set<std::string> declared;
        for (const auto& pl : t.value("placeholders", json::array()))
            declared.insert(pl.get<std::string>());
        if (slots != declared)
            throw ConfigError("declared placeholders disagree with the template text in " +
                              path.string());
        if (!shared_slots) shared_slots = slots;
        if (slots != *shared_slots)
            throw ConfigError("all templates of task " + set.task_id +
                              " must share one placeholder set");
        seen[idx] = true;
        set.texts[idx] = std::move(text);
    }
    return set;
}

std::string ordinal(std::size_t n) {
    const std::size_t mod100 = n % 100;
    const char* suffix = "th";
    if (mod100 < 11 || mod100 > 13) {
        switch (n % 10) {
            case 1: suffix = "st"; break;
            case 2: suffix = "nd"; break;
            case 3: suffix = "rd"; break;
            default: break;
        }
    }
    return std::to_string(n) + suffix;
}

std::string join_natural(const std::vector<std::string>& parts) {
    if (parts.empty()) return "";
    if (parts.size() == 1) return parts[0];
    if (parts.size() == 2) return parts[0] + " and " + parts[1];
    std::string out;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) out += parts[i] + ", ";
    out += "and " + parts.back();
    return out;
}

std::size_t resolve_position(const json& spec, std::size_t n) {
    if (n == 0) throw ConfigError("cannot resolve a position against an empty context");
    const std::string mode = spec.value("mode", "");
    const long long v = spec.value("value", 0LL);
    if (mode == "nth") {
        if (v < 1 || static_cast<std::size_t>(v) > n)
            throw ConfigError("position " + std::to_string(v) + " outside context of size " +
                              std::to_string(n));
        return static_cast<std::size_t>(v);
    }
    if (mode == "percent") {
        double idx = std::llround(static_cast<double>(v) / 100.0 * static_cast<double>(n));
        return static_cast<std::size_t>(std::clamp<double>(idx, 1.0, static_cast<double>(n)));
    }
    if (mode == "from_end") {
        if (v < 1 || static_cast<std::size_t>(v) > n)
            throw ConfigError("from-end position " + std::to_string(v) +
                              " outside context of size " + std::to_string(n));
        return n - static_cast<std::size_t>(v) + 1;
    }
    throw ConfigError("unknown position mode: " + mode);
}

std::string render_instruction(const std::string& template_text,
                               const std::map<std::string, std::string>& values) {
    auto slots = expansion::placeholders(template_text);
    std::set<std::string> provided;
    for (const auto& [key, value] : values) {
        provided.insert(key);
        if (value.find('{') != std::string::npos || value.find('}') != std::string::npos)
            throw ConfigError("rendered value for '" + key + "' must not contain braces");
    }
    if (slots != provided) {
        std::string missing, extra;
        for (const auto& s : slots)
            if (!provided.count(s)) missing += (missing.empty() ? "" : ", ") + s;
        for (const auto& s : provided)
            if (!slots.count(s)) extra += (extra.empty() ? "" : ", ") + s;
        throw ConfigError("placeholder mismatch rendering instruction (missing: [" + missing +
                          "], extra: [" + extra + "])");
    }
    std::string out;
    out.reserve(template_text.size());
    std::size_t i = 0;
    while (i < template_text.size()) {
        char c = template_text[i];
        if (c != '{') {
            out += c;
            ++i;
            continue;
        }
        std::size_t close = template_text.find('}', i + 1);
        std::string name = template_text.substr(i + 1, close - i - 1);
        out += values.at(name);
        i = close + 1;
    }
    return out;
}

namespace {

// Shared greedy packer: lines are appended in `order` until the additive
// estimate is spent, verified by exact recount, then trimmed or topped up so
// the true count lands in [kMinFill * budget, budget].
struct PackedLines {
    std::vector<std::size_t> taken;  // pool indices in final order
    std::string text;
    std::size_t token_count = 0;
};

PackedLines pack_lines(std::size_t budget, const Tokenizer& tok,
                       const std::vector<std::size_t>& order,
                       const std::function<std::string(std::size_t, std::size_t)>& make_line,
                       const std::function<std::size_t(std::size_t, std::size_t)>& estimate,
                       const std::vector<std::size_t>& must_take, const std::string& pool_name) {
    std::unordered_set<std::size_t> forced(must_take.begin(), must_take.end());
    std::size_t est = 0;
    for (std::size_t idx : must_take) est += estimate(idx, 1);
    if (est > budget)
        throw ConfigError(pool_name + ": forced entries alone exceed the token budget");

    PackedLines packed;
    std::vector<std::size_t> skipped;
    for (std::size_t idx : order) {
        std::size_t cost = estimate(idx, packed.taken.size() + 1);
        if (forced.count(idx)) {
            packed.taken.push_back(idx);
            continue;  // already funded
        }
        if (est + cost <= budget) {
            est += cost;
            packed.taken.push_back(idx);
        } else {
            skipped.push_back(idx);
        }
    }
    if (packed.taken.empty()) throw ConfigError(pool_name + ": nothing fits the token budget");

    auto render_all = [&]() {
        std::string text;
        for (std::size_t i = 0; i < packed.taken.size(); ++i) {
            if (i > 0) text += '\n';
            text += make_line(packed.taken[i], i + 1);
        }
        return text;
    };
    packed.text = render_all();
    packed.token_count = tok.count_tokens(packed.text);

    while (packed.token_count > budget && packed.taken.size() > 1) {
        // Drop the last non-forced entry; estimates overcount, so this is rare.
        std::size_t drop = packed.taken.size();
        for (std::size_t i = packed.taken.size(); i-- > 0;) {
            if (!forced.count(packed.taken[i])) {
                drop = i;
                break;
            }
        }
        if (drop == packed.taken.size())
            throw ConfigError(pool_name + ": forced entries exceed the token budget");
        packed.taken.erase(packed.taken.begin() + static_cast<std::ptrdiff_t>(drop));
        packed.text = render_all();
        packed.token_count = tok.count_tokens(packed.text);
    }

    std::size_t failures = 0;
    for (std::size_t idx : skipped) {
        if (failures > 50) break;
        std::string line = make_line(idx, packed.taken.size() + 1);
        std::string candidate = packed.text + '\n' + line;
        std::size_t count = tok.count_tokens(candidate);
        if (count <= budget) {
            packed.taken.push_back(idx);
            packed.text = std::move(candidate);
            packed.token_count = count;
            failures = 0;
        } else {
            ++failures;
        }
    }

    if (packed.token_count <
        static_cast<std::size_t>(std::ceil(kMinFill * static_cast<double>(budget))))
        throw ConfigError(pool_name + ": pool exhausted before reaching " +
                          std::to_string(static_cast<std::size_t>(kMinFill * 100)) +
                          "% of the token budget");
    return packed;
}

}  // namespace

ListContext build_list_context(const corpus::ListPool& pool, std::size_t budget,
                               const Tokenizer& tok, std::uint64_t seed) {
    if (pool.elements.empty()) throw ConfigError("list pool is empty");
    std::vector<std::size_t> order(pool.elements.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    auto make_line = [&](std::size_t idx, std::size_t position) {
        return std::to_string(position) + ". " + pool.elements[idx].value;
    };
    auto estimate = [&](std::size_t idx, std::size_t position) {
        return tok.count_tokens(std::to_string(position) + ". ") +
               pool.elements[idx].token_count + 1;  // +1 for the joining newline
    };
    PackedLines packed = pack_lines(budget, tok, order, make_line, estimate, {}, "list pool");

    ListContext ctx;
    ctx.text = std::move(packed.text);
    ctx.token_count = packed.token_count;
    for (std::size_t idx : packed.taken) ctx.elements.push_back(pool.elements[idx].value);
    if (ctx.elements.size() < kMinListElements)
        throw ConfigError("list context has only " + std::to_string(ctx.elements.size()) +
                          " elements; position specs need at least " +
                          std::to_string(kMinListElements));
    return ctx;
}

DocContext build_doc_context(const corpus::DocPool& pool, std::size_t budget,
                             const Tokenizer& tok, std::uint64_t seed, bool force_dup_group) {
    if (pool.docs.empty()) throw ConfigError("document pool is empty");
    std::vector<std::size_t> order(pool.docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::size_t> must_take;
    if (force_dup_group) {
        int group = -1;
        for (std::size_t idx : order) {
            if (pool.docs[idx].dup_group >= 0) {
                group = pool.docs[idx].dup_group;
                break;
            }
        }
        if (group < 0)
            throw ConfigError("document pool holds no duplicate-text group to force-include");
        for (std::size_t i = 0; i < pool.docs.size(); ++i)
            if (pool.docs[i].dup_group == group) must_take.push_back(i);
    }

    auto make_line = [&](std::size_t idx, std::size_t) {
        return corpus::render_doc(pool.docs[idx]);
    };
    auto estimate = [&](std::size_t idx, std::size_t) {
        return pool.docs[idx].token_count + 1;
    };
    PackedLines packed =
        pack_lines(budget, tok, order, make_line, estimate, must_take, "document pool");

    DocContext ctx;
    ctx.text = std::move(packed.text);
    ctx.token_count = packed.token_count;
    for (std::size_t idx : packed.taken) ctx.docs.push_back(pool.docs[idx]);
    return ctx;
}

OneDocContext build_onedoc_context(const corpus::EssayPool& pool, std::size_t budget,
                                   const Tokenizer& tok, std::uint64_t seed,
                                   double tag_fraction) {
    corpus::LongDocParams params;
    params.target_tokens = budget;
    params.tag_fraction = tag_fraction;
    OneDocContext ctx{corpus::build_long_doc(params, seed, tok, pool.texts)};
    return ctx;
}

GeneratorData GeneratorData::load(const std::filesystem::path& data_dir,
                                  const std::filesystem::path& plan_file,
                                  corpus::ListPool list_pool, corpus::DocPool doc_pool,
                                  corpus::EssayPool essay_pool, TokenizerRef tokenizer) {
    GeneratorData data;
    data.plan = Plan::load(plan_file);
    data.list_pool = std::move(list_pool);
    data.doc_pool = std::move(doc_pool);
    data.essay_pool = std::move(essay_pool);
    data.tokenizer = std::move(tokenizer);
    for (const auto& task : data.plan.ordered_tasks()) {
        auto tset = TemplateSet::load(data_dir / "templates" / (task + ".json"));
        auto space = expansion::VariableSpace::load(data_dir / "variables" / (task + ".json"));
        if (tset.task_id != task || space.task_id != task)
            throw ConfigError("task id mismatch in data files for " + task);
        const auto& entry = data.plan.tasks.at(task);
        if (entry.expressions > tset.texts.size())
            throw ConfigError("plan asks for " + std::to_string(entry.expressions) +
                              " expressions of " + task + " but only " +
                              std::to_string(tset.texts.size()) + " templates exist");
        std::set<std::string> slot_names = expansion::placeholders(tset.texts.front());
        std::set<std::string> dim_names;
        for (const auto& d : space.dimensions) dim_names.insert(d.name);
        if (slot_names != dim_names)
            throw ConfigError("variable dimensions disagree with template placeholders for " +
                              task);
        data.templates.emplace(task, std::move(tset));
        data.spaces.emplace(task, std::move(space));
    }
    for (const char* scenario : {"List", "MultiDoc", "OneDoc"})
        data.descriptions[scenario] =
            read_text_file(data_dir / "descriptions" / (std::string(scenario) + ".txt"));
    return data;
}

std::string GeneratorData::config_hash(std::uint64_t seed) const {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&h](std::string_view s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= 0xffu;
        h *= 1099511628211ull;
    };
    feed(plan.name);
    feed(std::to_string(plan.reserve_tokens));
    for (const auto& iv : plan.intervals) {
        feed(iv.label);
        feed(std::to_string(iv.nominal_tokens));
    }
    for (const auto& [task, entry] : plan.tasks) {
        feed(task);
        feed(std::to_string(entry.expressions));
        feed(std::to_string(entry.variables));
    }
    for (const auto& [task, tset] : templates)
        for (const auto& t : tset.texts) feed(t);
    for (const auto& [task, space] : spaces)
        for (const auto& d : space.dimensions) {
            feed(d.name);
            feed(d.kind);
            for (const auto& c : d.candidates) feed(c.dump());
        }
    for (const auto& [scenario, text] : descriptions) {
        feed(scenario);
        feed(text);
    }
    for (const auto& e : list_pool.elements) feed(e.value);
    for (const auto& d : doc_pool.docs) feed(corpus::render_doc(d));
    for (const auto& t : essay_pool.texts) feed(t);
    feed(std::to_string(tag_fraction));
    feed(std::to_string(seed));
    return hex64(h);
}

namespace {

struct ItemCore {
    std::map<std::string, std::string> render;
    Gold gold;
    json meta = json::object();
};

std::string fmt_text(const json& vars) { return vars.at("fmt").at("text").get<std::string>(); }

ItemCore resolve_list_task(const std::string& task, const json& vars, const ListContext& ctx) {
    const std::size_t n = ctx.elements.size();
    ItemCore core;
    core.render["fmt"] = fmt_text(vars);

    if (task == "LSI") {
        std::size_t idx = resolve_position(vars.at("pos"), n);
        core.render["pos"] = ordinal(idx);
        core.gold = {"single_element", json{{"value", ctx.elements[idx - 1]}, {"index", idx}}, {}};
        core.meta["index"] = idx;
        return core;
    }
    if (task == "LMI") {
        std::vector<std::size_t> indices;
        for (const auto& spec : vars.at("positions").at("specs")) {
            std::size_t idx = resolve_position(spec, n);
            // Percent-derived indices can collide with absolute ones; nudge
            // forward (wrapping) until free.
            while (std::find(indices.begin(), indices.end(), idx) != indices.end())
                idx = idx % n + 1;
            indices.push_back(idx);
        }
        std::vector<std::string> ords, values;
        for (std::size_t idx : indices) {
            ords.push_back("the " + ordinal(idx));
            values.push_back(ctx.elements[idx - 1]);
        }
        core.render["positions"] = join_natural(ords);
        core.gold = {"element_list", json{{"values", values}}, indices.size()};
        core.meta["indices"] = indices;
        return core;
    }

    const bool by_element = (task == "LOE" || task == "LBE");
    std::size_t anchor = resolve_position(vars.at(by_element ? "anchor" : "anchor_pos"), n);
    if (by_element)
        core.render["anchor"] = ctx.elements[anchor - 1];
    else
        core.render["anchor_pos"] = ordinal(anchor);
    core.meta["anchor_index"] = anchor;

    if (task == "LOI" || task == "LOE") {
        long long off = vars.at("offset").at("value").get<long long>();
        long long target = static_cast<long long>(anchor) + off;
        if (target < 1 || target > static_cast<long long>(n))
            throw ConfigError("offset target " + std::to_string(target) +
                              " falls outside the list; adjust the variable space");
        core.render["offset"] = vars.at("offset").at("text").get<std::string>();
        core.gold = {"single_element",
                     json{{"value", ctx.elements[static_cast<std::size_t>(target) - 1]},
                          {"index", target}},
                     {}};
        return core;
    }
    if (task == "LBI" || task == "LBE") {
        std::size_t w = vars.at("window").at("value").get<std::size_t>();
        std::size_t lo = anchor > w ? anchor - w : 1;
        std::size_t hi = std::min(n, anchor + w);
        std::vector<std::string> allowed(ctx.elements.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                                         ctx.elements.begin() + static_cast<std::ptrdiff_t>(hi));
        core.render["window"] = vars.at("window").at("text").get<std::string>();
        core.gold = {"element_set_in_window",
                     json{{"allowed", allowed}, {"anchor_index", anchor}, {"window", w}}, {}};
        return core;
    }
    throw ConfigError("not a List task: " + task);
}

ItemCore resolve_doc_task(const std::string& task, const json& vars, const DocContext& ctx) {
    ItemCore core;
    core.render["fmt"] = fmt_text(vars);

    if (task == "MB") {
        const json& rule = vars.at("rule");
        const std::string field = rule.at("field").get<std::string>();
        const std::string op = rule.at("op").get<std::string>();
        const std::string threshold = rule.value("value", "");
        std::vector<std::string> labels;
        for (const auto& l : rule.at("labels")) labels.push_back(l.get<std::string>());
        std::vector<std::string> assigned;
        for (const auto& doc : ctx.docs) {
            bool cond = false;
            if (op == "present") {
                if (field == "title")
                    cond = doc.title.has_value();
                else if (field == "source")
                    cond = doc.source.has_value();
                else
                    throw ConfigError("presence rule on unsupported field: " + field);
            } else if (op == "lt" || op == "ge") {
                if (field != "date")
                    throw ConfigError("comparison rule on unsupported field: " + field);
                cond = op == "lt" ? doc.date < threshold : doc.date >= threshold;
            } else {
                throw ConfigError("unknown label rule op: " + op);
            }
            assigned.push_back(cond ? labels[0] : labels[1]);
        }
        core.render["rule"] = rule.at("text").get<std::string>();
        core.gold = {"label_list", json{{"labels", assigned}, {"candidates", labels}},
                     assigned.size()};
        return core;
    }
    if (task == "MF") {
        const std::string attribute = vars.at("attr").at("attribute").get<std::string>();
        std::unordered_map<std::string, std::vector<std::size_t>> by_text;
        std::vector<std::string> text_order;
        for (std::size_t i = 0; i < ctx.docs.size(); ++i) {
            auto [it, inserted] = by_text.try_emplace(ctx.docs[i].text);
            if (inserted) text_order.push_back(ctx.docs[i].text);
            it->second.push_back(i);
        }
        json groups = json::array();
        std::size_t dup_docs = 0;
        for (const auto& text : text_order) {
            const auto& members = by_text[text];
            if (members.size() < 2) continue;
            json group = json::array();
            for (std::size_t i : members)
                group.push_back(attribute == "iD2" ? ctx.docs[i].id2 : ctx.docs[i].id);
            groups.push_back(std::move(group));
            dup_docs += members.size();
        }
        if (groups.empty())
            throw ConfigError("document context contains no duplicate group; "
                              "duplicate-finding would be unanswerable");
        core.render["attr"] = vars.at("attr").at("text").get<std::string>();
        core.gold = {"dup_groups", json{{"groups", groups}, {"attribute", attribute}}, dup_docs};
        return core;
    }
    throw ConfigError("not a MultiDoc task: " + task);
}

ItemCore resolve_onedoc_task(const std::string& task, const json& vars, const OneDocContext& ctx,
                             Rng& rng) {
    const auto& doc = ctx.doc;
    ItemCore core;
    core.render["fmt"] = fmt_text(vars);

    if (task == "OR") {
        std::size_t want = vars.at("n").at("value").get<std::size_t>();
        if (want > doc.tags.size())
            throw ConfigError("document carries fewer key sentences than requested");
        json sentences = json::array();
        for (const auto& t : doc.tags) sentences.push_back(t.sentence);
        core.render["n"] = vars.at("n").at("text").get<std::string>();
        core.gold = {"key_sentences", json{{"sentences", sentences}}, want};
        return core;
    }
    if (task == "OQ") {
        const json& ev = vars.at("evidence");
        const bool want_key = ev.at("pick").get<std::string>() == "key";
        std::size_t ord = ev.at("ordinal").get<std::size_t>();
        std::vector<std::string> pool;
        if (want_key) {
            for (const auto& t : doc.tags) pool.push_back(t.sentence);
        } else {
            for (const auto& s : doc.sentences)
                if (s.tag_index < 0) pool.push_back(s.text);
        }
        if (pool.empty()) throw ConfigError("no candidate evidence sentence in document");
        rng.shuffle(pool);
        const std::string& sentence = pool[ord % pool.size()];
        const json& opts = vars.at("options");
        const std::string yes = opts.at("yes").get<std::string>();
        const std::string no = opts.at("no").get<std::string>();
        core.render["evidence"] = sentence;
        core.render["options"] = opts.at("text").get<std::string>();
        core.gold = {"option_choice",
                     json{{"value", want_key ? yes : no}, {"options", json::array({yes, no})}},
                     {}};
        core.meta["is_key"] = want_key;
        return core;
    }
    if (task == "OE") {
        const json& sel = vars.at("ids");
        std::size_t k = sel.at("count").get<std::size_t>();
        const std::string mode = sel.value("mode", "spread");
        const std::size_t m = doc.tags.size();
        if (k == 0 || k > m)
            throw ConfigError("document carries fewer tagged sentences than requested ids");
        std::vector<std::size_t> chosen;
        if (mode == "spread") {
            for (std::size_t j = 0; j < k; ++j)
                chosen.push_back(k == 1 ? 0 : j * (m - 1) / (k - 1));
        } else {
            std::vector<std::size_t> all(m);
            for (std::size_t i = 0; i < m; ++i) all[i] = i;
            rng.shuffle(all);
            chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
        }
        // Present the ids in shuffled order so sorting is the model's job.
        std::vector<std::size_t> presentation = chosen;
        rng.shuffle(presentation);
        std::vector<std::string> shown;
        for (std::size_t i : presentation) shown.push_back(doc.tags[i].id);
        std::sort(chosen.begin(), chosen.end(),
                  [&](std::size_t a, std::size_t b) { return doc.tags[a].id < doc.tags[b].id; });
        json values = json::array(), ids = json::array();
        for (std::size_t i : chosen) {
            values.push_back(doc.tags[i].sentence);
            ids.push_back(doc.tags[i].id);
        }
        core.render["ids"] = join_natural(shown);
        core.gold = {"ordered_sentences", json{{"values", values}, {"ids", ids}}, k};
        return core;
    }
    throw ConfigError("not a OneDoc task: " + task);
}

}  // namespace

GenerationStats generate_dataset(const GeneratorData& data, std::uint64_t seed,
                                 const std::function<void(const BenchmarkItem&)>& sink) {
    const Tokenizer& tok = *data.tokenizer;
    GenerationStats stats;
    stats.config_hash = data.config_hash(seed);

    for (const auto& task : data.plan.ordered_tasks()) {
        const auto& entry = data.plan.tasks.at(task);
        const auto& tset = data.templates.at(task);
        const auto& space = data.spaces.at(task);
        const std::string scenario = scenario_for_task(task);
        const std::string& description = data.descriptions.at(scenario);
        auto assignments =
            expansion::sample_variables(space, entry.variables, derive_seed(seed, "vars:" + task));

        for (const auto& interval : data.plan.intervals) {
            const std::size_t budget = interval.nominal_tokens - data.plan.reserve_tokens;
            const std::uint64_t ctx_seed =
                derive_seed(seed, "ctx:" + task + ":" + interval.label);

            ListContext list_ctx;
            DocContext doc_ctx;
            OneDocContext onedoc_ctx;
            std::string context_text;
            std::size_t context_tokens = 0;
            if (scenario == "List") {
                list_ctx = build_list_context(data.list_pool, budget, tok, ctx_seed);
                context_text = list_ctx.text;
                context_tokens = list_ctx.token_count;
            } else if (scenario == "MultiDoc") {
                doc_ctx = build_doc_context(data.doc_pool, budget, tok, ctx_seed, task == "MF");
                context_text = doc_ctx.text;
                context_tokens = doc_ctx.token_count;
            } else {
                onedoc_ctx =
                    build_onedoc_context(data.essay_pool, budget, tok, ctx_seed,
                                         data.tag_fraction);
                context_text = onedoc_ctx.doc.text;
                context_tokens = onedoc_ctx.doc.token_count;
            }

            std::vector<ItemCore> cores;
            for (std::size_t v = 0; v < entry.variables; ++v) {
                Rng rng(derive_seed(seed, "resolve:" + task + ":" + interval.label + ":" +
                                              std::to_string(v)));
                if (scenario == "List")
                    cores.push_back(resolve_list_task(task, assignments[v], list_ctx));
                else if (scenario == "MultiDoc")
                    cores.push_back(resolve_doc_task(task, assignments[v], doc_ctx));
                else
                    cores.push_back(resolve_onedoc_task(task, assignments[v], onedoc_ctx, rng));
            }

            for (std::size_t e = 0; e < entry.expressions; ++e) {
                for (std::size_t v = 0; v < entry.variables; ++v) {
                    BenchmarkItem item;
                    item.task_id = task;
                    item.scenario = scenario;
                    item.nominal_tokens = interval.nominal_tokens;
                    item.interval_label = interval.label;
                    item.expression_index = static_cast<int>(e);
                    item.variable_index = static_cast<int>(v);
                    item.description = description;
                    item.context = context_text;
                    item.instruction = render_instruction(tset.texts[e], cores[v].render);
                    item.gold = cores[v].gold;
                    item.context_token_count = context_tokens;
                    item.config_hash = stats.config_hash;

                    json rendered = json::object();
                    for (const auto& [key, value] : cores[v].render) rendered[key] = value;
                    item.variables = json{{"assignment", assignments[v]},
                                          {"rendered", rendered},
                                          {"meta", cores[v].meta}};

                    std::string prompt =
                        description + "\n\n" + context_text + "\n\n" + item.instruction;
                    item.prompt_token_count = tok.count_tokens(prompt);
                    if (item.prompt_token_count > interval.nominal_tokens)
                        throw ConfigError("prompt exceeds the nominal budget for " + task + "/" +
                                          interval.label + "; raise reserve_tokens");

                    std::uint64_t ih = fnv1a64(task);
                    ih = ih * 1099511628211ull ^ fnv1a64(interval.label);
                    ih = ih * 1099511628211ull ^ fnv1a64(item.instruction);
                    ih = ih * 1099511628211ull ^ fnv1a64(item.context);
                    ih = ih * 1099511628211ull ^ fnv1a64(item.gold.payload.dump());
                    item.item_id = task + "-" + interval.label + "-e" + std::to_string(e) + "-v" +
                                   std::to_string(v) + "-" + hex64(ih).substr(0, 8);

                    sink(item);
                    ++stats.total;
                    ++stats.per_task[task];
                    ++stats.per_interval[interval.label];
                }
            }
        }
    }
    return stats;
}

GenerationStats write_dataset(const GeneratorData& data, std::uint64_t seed,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    JsonlWriter writer(out_dir / "items.jsonl");
    GenerationStats stats = generate_dataset(
        data, seed, [&](const BenchmarkItem& item) { writer.append(item_to_json(item)); });
    json manifest = {{"type", "dataset"},
                     {"plan", data.plan.name},
                     {"seed", seed},
                     {"config_hash", stats.config_hash},
                     {"total", stats.total},
                     {"per_task", stats.per_task},
                     {"per_interval", stats.per_interval}};
    writer.finish(manifest);
    write_json_file(out_dir / "dataset_manifest.json", manifest);
    return stats;
}

}  // namespace lcif::taskgen
