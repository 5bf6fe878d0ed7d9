#pragma once

#include <stdexcept>
#include <string>

namespace ncvcox {

// Categories map one-to-one onto CLI exit codes and C API status codes.
enum class ErrorKind { config = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void config_error(const std::string& msg) { throw Error(ErrorKind::config, msg); }
[[noreturn]] inline void data_error(const std::string& msg) { throw Error(ErrorKind::data, msg); }
[[noreturn]] inline void numerical_error(const std::string& msg) { throw Error(ErrorKind::numerical, msg); }

}  // namespace ncvcox
