#include "subpop/error.hpp"

namespace subpop {

const char* category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kData: return "data";
    case ErrorCategory::kNumeric: return "numeric";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kIndex: return "index";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kParse: return 3;
    case ErrorCategory::kData: return 4;
    case ErrorCategory::kNumeric: return 5;
    case ErrorCategory::kConfig: return 6;
    case ErrorCategory::kIo: return 7;
    case ErrorCategory::kIndex: return 8;
  }
  return 1;
}

}  // namespace subpop
