#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace rshape {

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// File contents did not match the expected format. line is 1-based.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rshape
