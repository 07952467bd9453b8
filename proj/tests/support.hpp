#pragma once

// Shared helpers for the test binaries: repo-relative paths and
// generate-once golden files. A golden file is written on the first run
// (when absent) and byte-compared on every later run, so regenerating
// after an intentional format change means deleting the file.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace testsupport {

inline std::filesystem::path repo_root() {
#ifdef TEST_DATA_DIR
    return std::filesystem::path(TEST_DATA_DIR);
#else
    return std::filesystem::current_path();
#endif
}

inline std::filesystem::path repo_path(const std::string& rel) { return repo_root() / rel; }

inline std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

struct GoldenResult {
    bool created = false;  // true when this run wrote the file
    bool matches = true;
    std::string expected;  // file content when it already existed
};

inline GoldenResult golden_compare_or_create(const std::string& rel, const std::string& actual) {
    GoldenResult result;
    auto path = repo_path(rel);
    auto existing = read_file(path);
    if (!existing) {
        write_file(path, actual);
        result.created = true;
        return result;
    }
    result.expected = *existing;
    result.matches = (*existing == actual);
    return result;
}

}  // namespace testsupport
