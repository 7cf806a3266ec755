#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace blm {

enum class ErrorCategory { Parse, Schema, Io, Usage, Analysis };

struct SourceSpan {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;
};

// Single exception type for hard failures. Violations and validation
// issues are ordinary data, never exceptions.
class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, std::string code, std::string detail,
        std::optional<SourceSpan> span = std::nullopt)
      : std::runtime_error(code + ": " + detail),
        category_(category),
        code_(std::move(code)),
        detail_(std::move(detail)),
        span_(std::move(span)) {}

  ErrorCategory category() const { return category_; }
  const std::string& code() const { return code_; }
  const std::string& detail() const { return detail_; }
  const std::optional<SourceSpan>& span() const { return span_; }

private:
  ErrorCategory category_;
  std::string code_;
  std::string detail_;
  std::optional<SourceSpan> span_;
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Schema: return "schema";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Analysis: return "analysis";
  }
  return "unknown";
}

}  // namespace blm
