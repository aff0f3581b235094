#pragma once

#include <stdexcept>
#include <string>

namespace axnn {

// Every failure the library raises derives from Error. The category decides
// the CLI exit code (see tools/commands.cpp).
enum class ErrorCategory {
  Usage,    // bad arguments, bad configuration values
  Numeric,  // divergence, degenerate model
  Data,     // shape/schema/parse problems with inputs or model files
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define AXNN_DEFINE_ERROR(Name, Category)                                  \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(Category, what) {}      \
  }

AXNN_DEFINE_ERROR(InvalidArgumentError, ErrorCategory::Usage);
AXNN_DEFINE_ERROR(InvalidArchitectureError, ErrorCategory::Usage);
AXNN_DEFINE_ERROR(UnsupportedMetricError, ErrorCategory::Usage);
AXNN_DEFINE_ERROR(DivergenceError, ErrorCategory::Numeric);
AXNN_DEFINE_ERROR(DegenerateModelError, ErrorCategory::Numeric);
AXNN_DEFINE_ERROR(ShapeError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(SchemaError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(ParseError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(EmptyDataError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(DegenerateFeatureError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(VersionError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(MalformedDocumentError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(InvariantViolationError, ErrorCategory::Data);
AXNN_DEFINE_ERROR(IoError, ErrorCategory::Io);

#undef AXNN_DEFINE_ERROR

}  // namespace axnn
