#ifndef TRACENET_TYPES_H_
#define TRACENET_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tracenet {

using PersonId = std::int32_t;
using PoiId = std::int32_t;

inline constexpr int kHoursPerDay = 24;

// Process exit codes shared by every command-line entry point.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kPrerequisite = 3,
  kRuntime = 4,
};

// Base of every error the library throws. `tag()` is a short stable token
// used in machine-parsable CLI error lines.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, std::string tag, const std::string& message)
      : std::runtime_error(message), code_(code), tag_(std::move(tag)) {}

  ExitCode code() const { return code_; }
  const std::string& tag() const { return tag_; }

 private:
  ExitCode code_;
  std::string tag_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ExitCode::kConfig, "config", message) {}
};

class PrerequisiteError : public Error {
 public:
  explicit PrerequisiteError(const std::string& message)
      : Error(ExitCode::kPrerequisite, "prerequisite", message) {}
};

class ParseError : public Error {
 public:
  ParseError(std::string_view source, long line, const std::string& message)
      : Error(ExitCode::kRuntime, "parse",
              std::string(source) + ":" + std::to_string(line) + ": " +
                  message),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ExitCode::kRuntime, "validation", message) {}
};

// Internal state disagrees with itself (e.g. a transmission whose infector
// was never a contact).
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message)
      : Error(ExitCode::kRuntime, "integrity", message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error(ExitCode::kRuntime, "domain", message) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& message)
      : Error(ExitCode::kRuntime, "training", message) {}
};

}  // namespace tracenet

#endif  // TRACENET_TYPES_H_
