#include "lcif/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "httplib.h"
#include "lcif/errors.hpp"
#include "lcif/hashing.hpp"
#include "lcif/jsonl.hpp"

namespace lcif::harness {

std::size_t max_tokens_for(const std::string& task_id) {
    if (task_id == "LSI" || task_id == "LOI" || task_id == "LOE" || task_id == "LBI" ||
        task_id == "LBE")
        return 100;
    if (task_id == "MB" || task_id == "MF") return 4096;
    if (task_id == "LMI" || task_id == "OR" || task_id == "OQ" || task_id == "OE") return 512;
    throw ConfigError("unknown task id: " + task_id);
}

namespace {

std::string compose_prompt(const std::string& description, const std::string& context,
                           const std::string& instruction) {
    return description + "\n\n" + context + "\n\n" + instruction;
}

}  // namespace

ChatRequest build_request(const BenchmarkItem& item, const RunOptions& opts,
                          const Tokenizer& tok) {
    std::string instruction = item.instruction;
    if (opts.base_model) instruction += "\n\nOutput: ";

    ChatRequest req;
    req.prompt = compose_prompt(item.description, item.context, instruction);
    req.prompt_tokens = tok.count_tokens(req.prompt);

    if (opts.context_limit > 0 && req.prompt_tokens > opts.context_limit) {
        // Binary search for the longest context prefix that fits; description
        // and instruction are never cut.
        std::size_t lo = 0, hi = item.context.size();
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo + 1) / 2;
            std::string candidate =
                compose_prompt(item.description, item.context.substr(0, mid), instruction);
            if (tok.count_tokens(candidate) <= opts.context_limit)
                lo = mid;
            else
                hi = mid - 1;
        }
        req.prompt = compose_prompt(item.description, item.context.substr(0, lo), instruction);
        req.prompt_tokens = tok.count_tokens(req.prompt);
        req.truncated = true;
        if (req.prompt_tokens > opts.context_limit)
            throw ConfigError("prompt frame alone exceeds the context limit of " +
                              std::to_string(opts.context_limit) + " tokens");
    }

    req.body = {{"model", opts.model},
                {"temperature", opts.temperature},
                {"max_tokens", max_tokens_for(item.task_id)},
                {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})}};
    return req;
}

// ---- scripted candidates ------------------------------------------------

namespace {

json gold_payload(const BenchmarkItem& item) {
    const auto& p = item.gold.payload;
    const std::string& task = item.task_id;
    if (task == "LSI" || task == "LOI" || task == "LOE")
        return {{"answer", p.at("value")}};
    if (task == "LBI" || task == "LBE") {
        // Answer with the anchor's own element: always inside the window.
        std::size_t anchor = p.at("anchor_index").get<std::size_t>();
        std::size_t w = p.at("window").get<std::size_t>();
        std::size_t lo = anchor > w ? anchor - w : 1;
        return {{"answer", p.at("allowed").at(anchor - lo)}};
    }
    if (task == "LMI") return {{"answers", p.at("values")}};
    if (task == "MB") return {{"labels", p.at("labels")}};
    if (task == "MF") return {{"duplicates", p.at("groups")}};
    if (task == "OR") {
        std::size_t want = item.gold.count_expected.value_or(p.at("sentences").size());
        json sentences = json::array();
        for (std::size_t i = 0; i < want; ++i) sentences.push_back(p.at("sentences").at(i));
        return {{"sentences", sentences}};
    }
    if (task == "OQ") return {{"answer", p.at("value")}};
    if (task == "OE") return {{"sentences", p.at("values")}};
    throw ConfigError("unknown task id: " + task);
}

std::vector<std::string> context_list_elements(const std::string& context) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= context.size()) {
        std::size_t end = context.find('\n', start);
        if (end == std::string::npos) end = context.size();
        std::string line = context.substr(start, end - start);
        std::size_t dot = line.find(". ");
        if (dot != std::string::npos) out.push_back(line.substr(dot + 2));
        if (end == context.size()) break;
        start = end + 1;
    }
    return out;
}

}  // namespace

std::string gold_response(const BenchmarkItem& item) { return gold_payload(item).dump(); }

std::string mangled_response(const BenchmarkItem& item, const std::string& defect) {
    const std::string& task = item.task_id;
    if (defect == "wrong_format")
        return "The result you asked for is " + gold_payload(item).dump() +
               " and that should settle it.";
    if (defect == "wrong_count") {
        if (task != "LMI" && task != "OR") return gold_response(item);
        json payload = gold_payload(item);
        json& arr = payload.begin().value();
        arr.push_back(arr.back());
        return payload.dump();
    }
    if (defect == "shuffled_order") {
        if (task != "OE") return gold_response(item);
        json payload = gold_payload(item);
        json& arr = payload.at("sentences");
        std::reverse(arr.begin(), arr.end());
        return payload.dump();
    }
    if (defect == "off_window") {
        if (task != "LBI" && task != "LBE") return gold_response(item);
        std::set<std::string> allowed;
        for (const auto& a : item.gold.payload.at("allowed"))
            allowed.insert(a.get<std::string>());
        for (const auto& element : context_list_elements(item.context))
            if (!allowed.count(element)) return json{{"answer", element}}.dump();
        return gold_response(item);
    }
    if (defect == "inverted_option") {
        if (task != "OQ") return gold_response(item);
        const auto& p = item.gold.payload;
        const std::string value = p.at("value").get<std::string>();
        const auto& options = p.at("options");
        const std::string other = options.at(0).get<std::string>() == value
                                      ? options.at(1).get<std::string>()
                                      : options.at(0).get<std::string>();
        return json{{"answer", other}}.dump();
    }
    throw ConfigError("unknown response defect: " + defect);
}

Responder make_responder(const std::string& name) {
    if (name == "gold") return [](const BenchmarkItem& item) { return gold_response(item); };
    if (name == "empty") return [](const BenchmarkItem&) { return std::string(); };
    if (name == "noise")
        return [](const BenchmarkItem& item) {
            static const char* lines[] = {
                "I could not locate a definitive answer in the provided material.",
                "Possibly item 42, though the text is ambiguous about it.",
                "Sure! Let me think about this step by step first.",
                "answer = unknown",
            };
            return std::string(lines[fnv1a64(item.item_id) % 4]);
        };
    for (const char* defect :
         {"wrong_format", "wrong_count", "shuffled_order", "off_window", "inverted_option"})
        if (name == defect)
            return [d = std::string(name)](const BenchmarkItem& item) {
                return mangled_response(item, d);
            };
    throw ConfigError("unknown responder: " + name);
}

// ---- backends -----------------------------------------------------------

CompletionOutcome HttpBackend::complete(const BenchmarkItem&, const ChatRequest& request) {
    httplib::Client client(endpoint_.base_url);
    client.set_connection_timeout(static_cast<time_t>(endpoint_.timeout_s), 0);
    client.set_read_timeout(static_cast<time_t>(endpoint_.timeout_s), 0);

    httplib::Headers headers;
    if (!endpoint_.api_key_env.empty()) {
        const char* key = std::getenv(endpoint_.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            return {"", "api key environment variable not set: " + endpoint_.api_key_env};
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto res = client.Post(endpoint_.path, headers, request.body.dump(), "application/json");
    if (!res) return {"", "connection failed: " + httplib::to_string(res.error())};
    if (res->status != 200)
        return {"", "http status " + std::to_string(res->status) + ": " +
                        res->body.substr(0, 200)};
    try {
        json j = json::parse(res->body);
        return {j.at("choices").at(0).at("message").at("content").get<std::string>(), {}};
    } catch (const json::exception& e) {
        return {"", std::string("malformed completion body: ") + e.what()};
    }
}

// ---- executor -----------------------------------------------------------

RunStats run_items(const std::vector<BenchmarkItem>& items, Backend& backend,
                   const RunOptions& opts, const Tokenizer& tok,
                   const std::filesystem::path& out_file) {
    RunStats stats;
    std::unordered_set<std::string> done;
    if (opts.resume && std::filesystem::exists(out_file))
        for_each_jsonl(out_file, [&](json&& r) { done.insert(r.value("item_id", "")); });

    std::vector<const BenchmarkItem*> todo;
    for (const auto& item : items) {
        if (done.count(item.item_id))
            ++stats.skipped;
        else
            todo.push_back(&item);
    }

    std::vector<ResponseRecord> results(todo.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < todo.size(); i = next.fetch_add(1)) {
            const BenchmarkItem& item = *todo[i];
            ChatRequest request = build_request(item, opts, tok);
            ResponseRecord record;
            record.item_id = item.item_id;
            record.model = opts.model;
            record.truncated_context = request.truncated;
            record.request_tokens = request.prompt_tokens;
            record.config_hash = item.config_hash;
            for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
                auto t0 = std::chrono::steady_clock::now();
                CompletionOutcome outcome = backend.complete(item, request);
                auto t1 = std::chrono::steady_clock::now();
                record.attempt = attempt;
                record.latency_ms =
                    std::chrono::duration<double, std::milli>(t1 - t0).count();
                if (!outcome.error) {
                    record.raw_text = std::move(outcome.text);
                    record.error.reset();
                    break;
                }
                record.error = std::move(outcome.error);
                record.raw_text.clear();
                if (attempt < opts.max_attempts)
                    std::this_thread::sleep_for(std::chrono::milliseconds(
                        opts.backoff_ms << (attempt - 1)));
            }
            results[i] = std::move(record);
        }
    };

    std::size_t n_threads = std::max<std::size_t>(1, std::min(opts.workers, todo.size()));
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    if (out_file.has_parent_path()) std::filesystem::create_directories(out_file.parent_path());
    std::ofstream out(out_file, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open for append: " + out_file.string());
    for (const auto& record : results) {
        out << canonical_line(response_to_json(record)) << '\n';
        out.flush();
        if (record.error) {
            ++stats.failed;
            if (stats.first_error.empty()) stats.first_error = *record.error;
        } else {
            ++stats.completed;
        }
    }
    out.close();

    std::string bytes = read_file(out_file);
    std::size_t lines = 0;
    for (char c : bytes)
        if (c == '\n') ++lines;
    json manifest = {{"type", "responses"},
                     {"model", opts.model},
                     {"record_count", lines},
                     {"content_hash", content_hash(bytes)}};
    write_json_file(manifest_path_for(out_file), manifest);
    return stats;
}

}  // namespace lcif::harness
