#include "lcif/commands.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "CLI11.hpp"
#include "lcif/corpus.hpp"
#include "lcif/errors.hpp"
#include "lcif/harness.hpp"
#include "lcif/hashing.hpp"
#include "lcif/metrics.hpp"
#include "lcif/rng.hpp"
#include "lcif/scoring.hpp"
#include "lcif/taskgen.hpp"

namespace lcif::cli {

namespace {

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                c == '-')
                   ? c
                   : '-';
    return out.empty() ? std::string("model") : out;
}

std::string file_hash(const std::filesystem::path& p) { return content_hash(read_file(p)); }

}  // namespace

int cmd_build_corpus(const Config& config, const BuildCorpusArgs& args, bool verbose) {
    auto tok = load_tokenizer(config.resolved_vocab());

    corpus::ListPoolParams lp;
    lp.n_uuid = config.pool_uuids;
    lp.n_text = config.pool_texts;
    corpus::ListPool list_pool =
        corpus::build_list_pool(lp, derive_seed(args.seed, "list-pool"), *tok);

    corpus::DocPoolParams dp;
    dp.n_docs = config.pool_docs;
    corpus::DocPool doc_pool =
        corpus::build_doc_pool(dp, derive_seed(args.seed, "doc-pool"), *tok);

    corpus::EssayPool essay_pool =
        corpus::build_essay_pool(config.pool_essays, derive_seed(args.seed, "essay-pool"));

    std::filesystem::create_directories(args.out);
    corpus::save_list_pool(list_pool, args.out / "list_pool.json");
    corpus::save_doc_pool(doc_pool, args.out / "doc_pool.json");
    corpus::save_essay_pool(essay_pool, args.out / "essay_pool.json");

    json manifest = {{"type", "corpus"},
                     {"seed", args.seed},
                     {"list_elements", list_pool.elements.size()},
                     {"docs", doc_pool.docs.size()},
                     {"essays", essay_pool.texts.size()},
                     {"hashes",
                      {{"list_pool", file_hash(args.out / "list_pool.json")},
                       {"doc_pool", file_hash(args.out / "doc_pool.json")},
                       {"essay_pool", file_hash(args.out / "essay_pool.json")}}}};
    write_json_file(args.out / "corpus_manifest.json", manifest);

    std::cout << "corpus: " << list_pool.elements.size() << " list elements, "
              << doc_pool.docs.size() << " documents, " << essay_pool.texts.size()
              << " essays -> " << args.out.string() << "\n";
    if (verbose) std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_generate(const Config& config, const GenerateArgs& args, bool verbose) {
    auto tok = load_tokenizer(config.resolved_vocab());
    auto plan_file = args.plan.empty() ? config.resolved_plan() : args.plan;

    taskgen::GeneratorData data = taskgen::GeneratorData::load(
        config.data_dir, plan_file, corpus::load_list_pool(args.corpus / "list_pool.json"),
        corpus::load_doc_pool(args.corpus / "doc_pool.json"),
        corpus::load_essay_pool(args.corpus / "essay_pool.json"), tok);
    data.tag_fraction = config.tag_fraction;

    taskgen::GenerationStats stats = taskgen::write_dataset(data, args.seed, args.out);
    std::cout << "dataset: " << stats.total << " items (plan " << data.plan.name << ", seed "
              << args.seed << ", config " << stats.config_hash << ") -> "
              << args.out.string() << "\n";
    for (const auto& [task, count] : stats.per_task)
        std::cout << "  " << task << ": " << count << "\n";
    if (verbose)
        for (const auto& [interval, count] : stats.per_interval)
            std::cout << "  @" << interval << ": " << count << "\n";
    return 0;
}

int cmd_run(const Config& config, const RunArgs& args, bool verbose) {
    if (args.items.empty()) throw ConfigError("run needs --items");
    auto tok = load_tokenizer(config.resolved_vocab());

    std::vector<BenchmarkItem> items;
    for_each_jsonl(args.items, [&](json&& j) { items.push_back(item_from_json(j)); });
    if (items.empty()) throw ConfigError("no items in " + args.items.string());

    std::unique_ptr<harness::Backend> backend;
    if (!args.mock.empty()) {
        backend = std::make_unique<harness::MockBackend>(harness::make_responder(args.mock));
    } else if (!config.endpoint_url.empty()) {
        harness::HttpEndpoint endpoint;
        endpoint.base_url = config.endpoint_url;
        endpoint.path = config.endpoint_path;
        endpoint.api_key_env = config.api_key_env;
        endpoint.timeout_s = config.endpoint_timeout_s;
        backend = std::make_unique<harness::HttpBackend>(std::move(endpoint));
    } else {
        throw ConfigError("no candidate configured: pass --mock or set endpoint.url");
    }

    harness::RunOptions opts;
    opts.model = args.model;
    opts.workers = config.workers;
    opts.max_attempts = config.max_attempts;
    opts.backoff_ms = config.backoff_ms;
    opts.resume = !args.no_resume;
    opts.base_model = args.base_model;
    opts.temperature = config.temperature;
    opts.context_limit = args.context_limit;

    auto out_file = args.out / ("responses-" + sanitize_name(args.model) + ".jsonl");
    harness::RunStats stats = harness::run_items(items, *backend, opts, *tok, out_file);

    std::cout << "run: " << stats.completed << " completed, " << stats.failed << " failed, "
              << stats.skipped << " skipped -> " << out_file.string() << "\n";
    if (verbose && !stats.first_error.empty())
        std::cout << "  sample failure: " << stats.first_error << "\n";
    if (stats.failed > 0 && stats.completed == 0 && stats.skipped == 0)
        throw EndpointError("every request failed; sample: " + stats.first_error);
    if (stats.failed > 0)
        std::cerr << "warning: " << stats.failed << " items failed after retries\n";
    return 0;
}

int cmd_score(const Config& config, const ScoreArgs& args, bool /*verbose*/) {
    if (args.items.empty() || args.responses.empty())
        throw ConfigError("score needs --items and --responses");
    scoring::Rubric rubric = scoring::Rubric::load(config.data_dir / "rubric.json");
    scoring::FormatRegistry formats =
        scoring::FormatRegistry::load(config.data_dir / "formats.json");

    // Last record per item wins, so re-runs supersede earlier attempts.
    std::unordered_map<std::string, ResponseRecord> responses;
    std::vector<std::string> response_order;
    for_each_jsonl(args.responses, [&](json&& j) {
        ResponseRecord r = response_from_json(j);
        if (!responses.count(r.item_id)) response_order.push_back(r.item_id);
        responses[r.item_id] = std::move(r);
    });
    if (responses.empty()) throw ConfigError("no responses in " + args.responses.string());

    std::map<std::string, std::vector<ScoreRecord>> by_model;
    std::size_t matched = 0, mismatched_hash = 0, errored = 0;
    for_each_jsonl(args.items, [&](json&& j) {
        BenchmarkItem item = item_from_json(j);
        auto found = responses.find(item.item_id);
        if (found == responses.end()) return;
        const ResponseRecord& resp = found->second;
        if (resp.config_hash != item.config_hash) {
            ++mismatched_hash;
            if (!args.force) return;  // counted and reported below
        }
        if (resp.error) ++errored;
        ++matched;
        by_model[resp.model].push_back(scoring::score_response(item, resp, rubric, formats));
    });

    if (mismatched_hash > 0 && !args.force)
        throw ConfigError(std::to_string(mismatched_hash) +
                          " responses were produced against a different dataset "
                          "(config hash mismatch); use --force to score anyway");
    if (matched < responses.size() && !args.force)
        throw ConfigError(std::to_string(responses.size() - matched) +
                          " responses reference items missing from " + args.items.string() +
                          "; use --force to ignore them");

    std::filesystem::create_directories(args.out);
    for (auto& [model, records] : by_model) {
        auto out_file = args.out / ("scores-" + sanitize_name(model) + ".jsonl");
        JsonlWriter writer(out_file);
        double total = 0.0;
        for (const auto& r : records) {
            writer.append(score_to_json(r));
            total += r.normalized;
        }
        writer.finish({{"type", "scores"}, {"model", model}});
        std::cout << "scores: " << records.size() << " records for " << model
                  << " (mean attainment "
                  << (records.empty() ? 0.0 : total / static_cast<double>(records.size()))
                  << ") -> " << out_file.string() << "\n";
    }
    if (errored > 0)
        std::cerr << "warning: " << errored
                  << " failed responses were scored as empty output\n";
    return 0;
}

int cmd_report(const Config& config, const ReportArgs& args, bool verbose) {
    if (args.items.empty() || args.scores.empty())
        throw ConfigError("report needs --items and --scores");
    scoring::Rubric rubric = scoring::Rubric::load(config.data_dir / "rubric.json");
    metrics::MetaMap meta = metrics::load_meta(args.items);

    std::map<std::string, std::vector<ScoreRecord>> by_model;
    std::set<std::string> hashes;
    for_each_jsonl(args.scores, [&](json&& j) {
        ScoreRecord r = score_from_json(j);
        hashes.insert(r.config_hash);
        by_model[r.model].push_back(std::move(r));
    });
    if (by_model.empty()) throw ConfigError("no score records in " + args.scores.string());
    if (hashes.size() > 1 && !args.force)
        throw ConfigError("score records mix " + std::to_string(hashes.size()) +
                          " different config hashes; use --force to report anyway");

    std::filesystem::create_directories(args.out);
    for (const auto& [model, records] : by_model) {
        metrics::ModelReport report = metrics::build_report(model, records, meta, rubric);
        std::string safe = sanitize_name(model);
        write_json_file(args.out / ("report-" + safe + ".json"),
                        metrics::report_to_json(report));
        std::string summary = metrics::report_summary_text(report);
        write_file(args.out / ("summary-" + safe + ".txt"), summary);
        std::cout << summary << "\n";
        if (verbose)
            std::cout << "written: " << (args.out / ("report-" + safe + ".json")).string()
                      << "\n";
    }
    return 0;
}

namespace {

struct InlineProvider : expansion::RewriteProvider {
    std::vector<std::string> candidates;
    std::vector<std::string> rewrites(const std::string&, std::size_t) override {
        return candidates;
    }
};

}  // namespace

int cmd_expand(const Config& /*config*/, const ExpandArgs& args, bool verbose) {
    if (args.input.empty()) throw ConfigError("expand needs --input");
    json spec = read_json_file(args.input);
    if (!spec.contains("seed_text") || !spec.contains("candidates"))
        throw ConfigError("expand input needs seed_text and candidates");

    InlineProvider provider;
    for (const auto& c : spec.at("candidates")) provider.candidates.push_back(c.get<std::string>());
    expansion::HashEmbedder embedder(64);
    expansion::ExpansionResult result = expansion::expand_instruction(
        spec.at("seed_text").get<std::string>(), provider, embedder, args.k, args.seed);

    json out = {{"seed_text", spec.at("seed_text")},
                {"selected", result.selected},
                {"candidates_total", result.candidates_total},
                {"candidates_usable", result.candidates_usable},
                {"dropped", result.dropped}};
    if (args.out.has_parent_path()) std::filesystem::create_directories(args.out.parent_path());
    write_json_file(args.out, out);

    std::cout << "expansion: kept " << result.selected.size() << " of "
              << result.candidates_total << " candidates (" << result.dropped.size()
              << " dropped) -> " << args.out.string() << "\n";
    if (verbose)
        for (const auto& s : result.selected) std::cout << "  " << s << "\n";
    return 0;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Benchmark toolkit for long-context instruction following: corpus and "
                 "dataset synthesis, candidate runs, rubric scoring, and reports."};
    app.require_subcommand(1);

    std::string config_file;
    std::uint64_t seed = 1;
    bool verbose = false;
    app.add_option("--config", config_file, "JSON config file");
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_flag("--verbose", verbose, "chatty output");

    BuildCorpusArgs bc;
    std::optional<std::size_t> opt_uuids, opt_texts, opt_docs, opt_essays;
    auto* sub_bc = app.add_subcommand("build-corpus", "synthesize reusable text pools");
    sub_bc->add_option("--out", bc.out, "pool directory")->capture_default_str();
    sub_bc->add_option("--uuids", opt_uuids, "identifier-style list elements");
    sub_bc->add_option("--texts", opt_texts, "phrase-style list elements");
    sub_bc->add_option("--docs", opt_docs, "document records");
    sub_bc->add_option("--essays", opt_essays, "essay texts");

    GenerateArgs gen;
    auto* sub_gen = app.add_subcommand("generate", "build a benchmark dataset from pools");
    sub_gen->add_option("--corpus", gen.corpus, "pool directory")->capture_default_str();
    sub_gen->add_option("--plan", gen.plan, "plan file (default from config)");
    sub_gen->add_option("--out", gen.out, "dataset directory")->capture_default_str();

    RunArgs run;
    auto* sub_run = app.add_subcommand("run", "collect candidate responses for a dataset");
    sub_run->add_option("--items", run.items, "items.jsonl")->required();
    sub_run->add_option("--out", run.out, "responses directory")->capture_default_str();
    sub_run->add_option("--model", run.model, "model name to record")->capture_default_str();
    sub_run->add_option("--mock", run.mock,
                        "scripted candidate: gold, empty, noise, wrong_format, wrong_count, "
                        "shuffled_order, off_window, inverted_option");
    sub_run->add_flag("--no-resume", run.no_resume, "ignore existing records");
    sub_run->add_flag("--base-model", run.base_model, "append a completion cue");
    sub_run->add_option("--context-limit", run.context_limit,
                        "truncate contexts to this many prompt tokens");

    ScoreArgs score;
    auto* sub_score = app.add_subcommand("score", "grade responses against the answer key");
    sub_score->add_option("--items", score.items, "items.jsonl")->required();
    sub_score->add_option("--responses", score.responses, "responses.jsonl")->required();
    sub_score->add_option("--out", score.out, "scores directory")->capture_default_str();
    sub_score->add_flag("--force", score.force, "tolerate mismatched artifacts");

    ReportArgs report;
    auto* sub_report = app.add_subcommand("report", "aggregate scores into metric tables");
    sub_report->add_option("--items", report.items, "items.jsonl")->required();
    sub_report->add_option("--scores", report.scores, "scores.jsonl")->required();
    sub_report->add_option("--out", report.out, "report directory")->capture_default_str();
    sub_report->add_flag("--force", report.force, "tolerate mismatched artifacts");

    ExpandArgs expand;
    auto* sub_expand =
        app.add_subcommand("expand", "pick diverse paraphrases from rewrite candidates");
    sub_expand->add_option("--input", expand.input, "JSON with seed_text and candidates")
        ->required();
    sub_expand->add_option("--out", expand.out, "output file")->capture_default_str();
    sub_expand->add_option("-k,--k", expand.k, "paraphrases to keep")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Config config;
        if (!config_file.empty()) config = Config::load(config_file);
        if (opt_uuids) config.pool_uuids = *opt_uuids;
        if (opt_texts) config.pool_texts = *opt_texts;
        if (opt_docs) config.pool_docs = *opt_docs;
        if (opt_essays) config.pool_essays = *opt_essays;
        bc.seed = seed;
        gen.seed = seed;
        expand.seed = seed;

        if (sub_bc->parsed()) return cmd_build_corpus(config, bc, verbose);
        if (sub_gen->parsed()) return cmd_generate(config, gen, verbose);
        if (sub_run->parsed()) return cmd_run(config, run, verbose);
        if (sub_score->parsed()) return cmd_score(config, score, verbose);
        if (sub_report->parsed()) return cmd_report(config, report, verbose);
        if (sub_expand->parsed()) return cmd_expand(config, expand, verbose);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const EndpointError& e) {
        std::cerr << "endpoint error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("lcif");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace lcif::cli
