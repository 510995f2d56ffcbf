#pragma once

// Candidate runner: request shaping, scripted mock candidates, an HTTP
// chat-completions backend, and a resumable multi-worker executor.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcif/item.hpp"
#include "lcif/tokenizer.hpp"

namespace lcif::harness {

// Completion budget by task: short extractions get 100 tokens, long batch
// labelling 4096, everything else 512.
std::size_t max_tokens_for(const std::string& task_id);

struct RunOptions {
    std::string model = "mock";
    std::size_t workers = 4;
    int max_attempts = 5;
    std::size_t backoff_ms = 250;   // doubled after each failed attempt
    bool resume = true;
    bool base_model = false;        // completion-style model: append an output cue
    double temperature = 0.0;
    std::size_t context_limit = 0;  // max prompt tokens; 0 disables truncation
};

struct ChatRequest {
    json body;           // chat-completions wire payload
    std::string prompt;  // final user text after truncation / cue
    bool truncated = false;
    std::size_t prompt_tokens = 0;
};

// Reassembles the prompt (description, context, instruction). When a token
// limit applies, only the context is cut; description and instruction always
// survive intact.
ChatRequest build_request(const BenchmarkItem& item, const RunOptions& opts, const Tokenizer& tok);

// ---- scripted candidates ------------------------------------------------

using Responder = std::function<std::string(const BenchmarkItem&)>;

// Perfect answer in the task's required output format.
std::string gold_response(const BenchmarkItem& item);

// Near-miss candidates, each breaking exactly one thing:
//   wrong_format     the right JSON object wrapped in prose (all tasks)
//   wrong_count      one duplicated trailing answer (LMI, OR)
//   shuffled_order   reversed answer order (OE)
//   off_window       an in-list element outside the allowed window (LBI, LBE)
//   inverted_option  the opposite option (OQ)
// Tasks a defect does not apply to receive the gold answer.
std::string mangled_response(const BenchmarkItem& item, const std::string& defect);

// gold | empty | noise | one of the defect names above.
Responder make_responder(const std::string& name);

// ---- backends -----------------------------------------------------------

struct CompletionOutcome {
    std::string text;
    std::optional<std::string> error;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionOutcome complete(const BenchmarkItem& item, const ChatRequest& request) = 0;
};

class MockBackend : public Backend {
public:
    explicit MockBackend(Responder responder) : responder_(std::move(responder)) {}
    CompletionOutcome complete(const BenchmarkItem& item, const ChatRequest&) override {
        return {responder_(item), std::nullopt};
    }

private:
    Responder responder_;
};

struct HttpEndpoint {
    std::string base_url;  // e.g. http://127.0.0.1:8080
    std::string path = "/v1/chat/completions";
    std::string api_key_env;  // NAME of the env var; the value is read per call
    std::size_t timeout_s = 120;
};

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    CompletionOutcome complete(const BenchmarkItem& item, const ChatRequest& request) override;

private:
    HttpEndpoint endpoint_;
};

// ---- executor -----------------------------------------------------------

struct RunStats {
    std::size_t completed = 0;
    std::size_t failed = 0;   // items whose retries were exhausted
    std::size_t skipped = 0;  // already present in out_file (resume)
    std::string first_error;  // sample failure message, empty when failed == 0
};

// Runs every item through the backend with retry and exponential backoff,
// appending one response record per item to out_file in item order and
// refreshing the sidecar manifest. With resume on, items that already have a
// record are skipped, so an interrupted run can be continued.
RunStats run_items(const std::vector<BenchmarkItem>& items, Backend& backend,
                   const RunOptions& opts, const Tokenizer& tok,
                   const std::filesystem::path& out_file);

}  // namespace lcif::harness
