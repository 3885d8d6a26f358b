#pragma once

#include <stdexcept>
#include <string>

namespace nlsdyn {

// Base class for all library failures. The category maps onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { config, certification, numerical, usage };
  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Kind::config, what) {}
};

class CertificationError : public Error {
 public:
  explicit CertificationError(const std::string& what) : Error(Kind::certification, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(Kind::numerical, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(Kind::usage, what) {}
};

}  // namespace nlsdyn
