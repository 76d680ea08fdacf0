#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace textaug::testing {

inline std::filesystem::path fixture(const std::string& relative) {
  return std::filesystem::path(TEXTAUG_FIXTURE_DIR) / relative;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("textaug-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
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

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

/// Compares `value` with the frozen golden entry `key`. With
/// TEXTAUG_UPDATE_GOLDEN=1 in the environment the entry is (re)written.
inline ::testing::AssertionResult matches_golden(const std::string& key, const nlohmann::json& value) {
  const auto path = fixture("golden/mock.json");
  nlohmann::json doc = nlohmann::json::object();
  if (std::filesystem::exists(path)) doc = nlohmann::json::parse(slurp(path));
  const char* update = std::getenv("TEXTAUG_UPDATE_GOLDEN");
  if (update && std::string(update) == "1") {
    doc[key] = value;
    spit(path, doc.dump(2) + "\n");
    return ::testing::AssertionSuccess();
  }
  if (!doc.contains(key)) return ::testing::AssertionFailure() << "no golden entry '" << key << "'";
  if (doc[key] != value)
    return ::testing::AssertionFailure() << "golden '" << key << "' differs:\n  expected " << doc[key].dump()
                                         << "\n  actual   " << value.dump();
  return ::testing::AssertionSuccess();
}

}  // namespace textaug::testing
