#pragma once

// Tool configuration: data locations, pool sizes, endpoint, and run knobs.
// Loaded from a JSON file; every value has a usable default, and string
// values may reference environment variables as ${NAME}. Secrets stay in the
// environment: the API key is configured by variable name only.

#include <cstdint>
#include <filesystem>
#include <string>

#include "lcif/jsonl.hpp"

namespace lcif {

struct Config {
    std::filesystem::path data_dir = "data";
    std::filesystem::path vocab_file;  // defaults to <data_dir>/vocab/default.tiktoken
    std::filesystem::path plan_file;   // defaults to <data_dir>/plans/default.json

    // corpus pool sizes; defaults comfortably cover 128k-token contexts
    std::size_t pool_uuids = 3000;
    std::size_t pool_texts = 3000;
    std::size_t pool_docs = 400;
    std::size_t pool_essays = 260;
    double tag_fraction = 0.1;

    // endpoint (unset url => scripted candidates only)
    std::string endpoint_url;
    std::string endpoint_path = "/v1/chat/completions";
    std::string api_key_env = "LCIF_API_KEY";
    std::size_t endpoint_timeout_s = 120;

    // run defaults
    std::size_t workers = 4;
    int max_attempts = 5;
    std::size_t backoff_ms = 250;
    double temperature = 0.0;

    std::filesystem::path resolved_vocab() const;
    std::filesystem::path resolved_plan() const;

    // Missing file with an explicitly given path is an error; unknown keys
    // are rejected to catch typos.
    static Config load(const std::filesystem::path& file);
};

// Replaces every ${NAME} with the environment value; unset names are errors.
std::string interpolate_env(const std::string& value);

}  // namespace lcif
