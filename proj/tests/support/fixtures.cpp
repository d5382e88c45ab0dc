#include "fixtures.hpp"

#include <stdlib.h>

#include <stdexcept>
#include <system_error>

namespace fixtures {

TempDir::TempDir(std::string_view tag) {
  std::string pattern = (std::filesystem::temp_directory_path() / ("sheetcheck-" + std::string(tag) + "-XXXXXX")).string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed for " + pattern);
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace fixtures
