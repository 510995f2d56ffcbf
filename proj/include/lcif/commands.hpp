#pragma once

// Command-line surface. Each subcommand is a plain function over parsed
// options so tests can drive it directly; run_cli wires argument parsing and
// maps the error taxonomy to exit codes (config 2, io 3, endpoint 4).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lcif/config.hpp"

namespace lcif::cli {

struct BuildCorpusArgs {
    std::filesystem::path out = "corpus";
    std::uint64_t seed = 1;
};

struct GenerateArgs {
    std::filesystem::path corpus = "corpus";
    std::filesystem::path plan;  // empty: config default
    std::filesystem::path out = "dataset";
    std::uint64_t seed = 1;
};

struct RunArgs {
    std::filesystem::path items;
    std::filesystem::path out = "runs";
    std::string model = "candidate";
    std::string mock;  // gold | empty | noise | defect name; empty = HTTP endpoint
    bool no_resume = false;
    bool base_model = false;
    std::size_t context_limit = 0;
};

struct ScoreArgs {
    std::filesystem::path items;
    std::filesystem::path responses;
    std::filesystem::path out = "scores";
    bool force = false;  // accept mismatched config hashes
};

struct ReportArgs {
    std::filesystem::path items;
    std::filesystem::path scores;
    std::filesystem::path out = "report";
    bool force = false;
};

struct ExpandArgs {
    std::filesystem::path input;  // {"seed_text": ..., "candidates": [...]}
    std::filesystem::path out = "expansion.json";
    std::size_t k = 5;
    std::uint64_t seed = 1;
};

int cmd_build_corpus(const Config& config, const BuildCorpusArgs& args, bool verbose);
int cmd_generate(const Config& config, const GenerateArgs& args, bool verbose);
int cmd_run(const Config& config, const RunArgs& args, bool verbose);
int cmd_score(const Config& config, const ScoreArgs& args, bool verbose);
int cmd_report(const Config& config, const ReportArgs& args, bool verbose);
int cmd_expand(const Config& config, const ExpandArgs& args, bool verbose);

// Full entry point: parses argv, loads --config if given, dispatches, and
// turns thrown errors into exit codes.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // convenience for tests

}  // namespace lcif::cli
