#pragma once

#include <stdexcept>
#include <string>

namespace drc {

/// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kConfig,      // bad parameters or configuration
  kData,        // malformed or inconsistent input data
  kEstimation,  // the estimator could not produce a result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) {
  return Error(ErrorKind::kConfig, what);
}
inline Error data_error(const std::string& what) {
  return Error(ErrorKind::kData, what);
}
inline Error estimation_error(const std::string& what) {
  return Error(ErrorKind::kEstimation, what);
}

}  // namespace drc
