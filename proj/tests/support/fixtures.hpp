#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sheetcheck/textio.hpp"
#include "sheetcheck/workbook.hpp"

namespace fixtures {

inline std::filesystem::path samples_dir() { return SHEETCHECK_SAMPLES_DIR; }

inline std::filesystem::path sample(std::string_view name) { return samples_dir() / std::string(name); }

inline sheetcheck::Workbook load_sample(std::string_view name) {
  return sheetcheck::load_workbook(sample(name)).workbook;
}

inline sheetcheck::Workbook workbook(std::string_view text) { return sheetcheck::parse_workbook(text, "<test>"); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / std::string(name); }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
