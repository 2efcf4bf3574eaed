#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sscc::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Replaces directory `target` with the fully written directory `staged`.
void replace_directory(const std::filesystem::path& staged, const std::filesystem::path& target);

/// A fresh sibling directory name next to `target` for staging a whole-directory write.
std::filesystem::path staging_path(const std::filesystem::path& target);

}  // namespace sscc::io
