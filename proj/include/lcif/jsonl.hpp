#pragma once

// Line-delimited JSON record files with a manifest sidecar ("<file>.manifest.json").
// Records are written in a canonical compact form so identical content produces
// identical bytes.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcif/errors.hpp"
#include "lcif/hashing.hpp"

namespace lcif {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Compact serialization with sorted keys; the single canonical record form.
inline std::string canonical_line(const json& record) { return record.dump(); }

class JsonlWriter {
public:
    explicit JsonlWriter(std::filesystem::path path);
    void append(const json& record);
    std::size_t count() const { return count_; }
    const std::filesystem::path& path() const { return path_; }
    // Writes the sidecar: caller-provided fields plus record_count and a
    // content hash of the data file.
    void finish(json manifest_fields);

private:
    std::filesystem::path path_;
    std::string buffer_;
    std::size_t count_ = 0;
};

std::vector<json> read_jsonl(const std::filesystem::path& path);
void for_each_jsonl(const std::filesystem::path& path, const std::function<void(json&&)>& fn);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& value);

inline std::filesystem::path manifest_path_for(const std::filesystem::path& data_file) {
    std::filesystem::path p = data_file;
    p += ".manifest.json";
    return p;
}

}  // namespace lcif
