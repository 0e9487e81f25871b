#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "dbrd/corpus.hpp"

namespace dbrd::testing {

inline BugReport report(std::string id, Timestamp at, std::string summary, std::string description = "",
                        std::optional<std::string> duplicate_of = std::nullopt) {
    BugReport r;
    r.id = std::move(id);
    r.created_at = at;
    r.summary = std::move(summary);
    r.description = std::move(description);
    r.duplicate_of = std::move(duplicate_of);
    return r;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("dbrd-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

}  // namespace dbrd::testing
