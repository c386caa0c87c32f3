#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace videnergy {

/// Machine-readable error categories. Every failure that crosses the library
/// boundary carries exactly one of these.
enum class ErrorCode {
  parse,             ///< malformed document or quantity text
  unit_mismatch,     ///< a quantity has the wrong physical dimension
  unresolved_ref,    ///< profile / scenario name not found
  invalid_value,     ///< value violates a domain invariant (negative, NaN, ...)
  unresolved_file,   ///< scenario path cannot be opened
  schema,            ///< document structure does not match the schema
};

std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string path, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// Dotted location inside the scenario document ("" when not applicable).
  const std::string& path() const noexcept { return path_; }
  /// Message without the code and path prefix.
  const std::string& message() const noexcept { return message_; }

  /// Same error relocated under `prefix` (a relative path is appended).
  Error at(const std::string& prefix) const;

 private:
  ErrorCode code_;
  std::string path_;
  std::string message_;
};

}  // namespace videnergy
