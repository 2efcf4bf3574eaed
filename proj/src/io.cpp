#include "sscc/io.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace sscc::io {

namespace fs = std::filesystem;

namespace {

std::string unique_suffix() {
  static std::atomic<unsigned> counter{0};
  return std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp-" + unique_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot write " + path.string() + ": " + ec.message());
  }
}

fs::path staging_path(const fs::path& target) {
  fs::path clean = target;
  if (!clean.has_filename()) clean = clean.parent_path();
  return clean.string() + ".staging-" + unique_suffix();
}

void replace_directory(const fs::path& staged, const fs::path& target) {
  std::error_code ec;
  fs::path clean = target;
  if (!clean.has_filename()) clean = clean.parent_path();
  fs::path backup;
  if (fs::exists(clean)) {
    backup = clean.string() + ".old-" + unique_suffix();
    fs::rename(clean, backup, ec);
    if (ec) throw IoError("cannot replace " + clean.string() + ": " + ec.message());
  }
  fs::rename(staged, clean, ec);
  if (ec) {
    if (!backup.empty()) fs::rename(backup, clean);
    throw IoError("cannot replace " + clean.string() + ": " + ec.message());
  }
  if (!backup.empty()) fs::remove_all(backup, ec);
}

}  // namespace sscc::io
