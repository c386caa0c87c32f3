#include "videnergy/error.hpp"

namespace videnergy {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "E_PARSE";
    case ErrorCode::unit_mismatch: return "E_UNIT_MISMATCH";
    case ErrorCode::unresolved_ref: return "E_UNRESOLVED_REF";
    case ErrorCode::invalid_value: return "E_INVALID_VALUE";
    case ErrorCode::unresolved_file: return "E_UNRESOLVED_FILE";
    case ErrorCode::schema: return "E_SCHEMA";
  }
  return "E_UNKNOWN";
}

namespace {
std::string compose(ErrorCode code, const std::string& path, const std::string& message) {
  std::string out{code_name(code)};
  if (!path.empty()) out += " at " + path;
  out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, std::string path, const std::string& message)
    : std::runtime_error(compose(code, path, message)), code_(code), path_(std::move(path)), message_(message) {}

Error Error::at(const std::string& prefix) const {
  if (path_.empty()) return Error(code_, prefix, message_);
  if (prefix.empty() || path_.rfind(prefix, 0) == 0) return *this;
  return Error(code_, prefix + "." + path_, message_);
}

}  // namespace videnergy
