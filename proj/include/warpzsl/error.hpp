#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace warpzsl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or a violated precondition. Carries the offending source
/// (file name or "<memory>") and a 1-based line number when one applies.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::string rule, std::string source = {},
                           std::size_t line = 0)
      : Error(format(rule, source, line)),
        rule_(std::move(rule)),
        source_(std::move(source)),
        line_(line) {}

  const std::string& rule() const noexcept { return rule_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& rule, const std::string& source,
                            std::size_t line) {
    if (source.empty()) return rule;
    if (line == 0) return source + ": " + rule;
    return source + ":" + std::to_string(line) + ": " + rule;
  }

  std::string rule_;
  std::string source_;
  std::size_t line_;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace warpzsl
