#include "lcif/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace lcif {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

JsonlWriter::JsonlWriter(std::filesystem::path path) : path_(std::move(path)) {}

void JsonlWriter::append(const json& record) {
    buffer_ += canonical_line(record);
    buffer_ += '\n';
    ++count_;
}

void JsonlWriter::finish(json manifest_fields) {
    write_file(path_, buffer_);
    manifest_fields["record_count"] = count_;
    manifest_fields["content_hash"] = content_hash(buffer_);
    write_json_file(manifest_path_for(path_), manifest_fields);
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::vector<json> records;
    for_each_jsonl(path, [&](json&& j) { records.push_back(std::move(j)); });
    return records;
}

void for_each_jsonl(const std::filesystem::path& path, const std::function<void(json&&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw IoError("malformed record at " + path.string() + ":" + std::to_string(lineno));
        fn(std::move(j));
    }
}

json read_json_file(const std::filesystem::path& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw IoError("malformed JSON file: " + path.string());
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& value) {
    write_file(path, value.dump(2) + "\n");
}

}  // namespace lcif
