#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace injlock {

// Base of every error the library raises. The C API maps each subclass onto a
// distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Non-finite state encountered while stepping the rate equations.
class DivergedIntegration : public Error {
 public:
  explicit DivergedIntegration(std::size_t step)
      : Error("integration diverged at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// A rate was requested but no pulse was transmitted.
class UndefinedRate : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  enum class Kind { MissingFile, Syntax, Validation };

  ConfigError(Kind kind, std::string key, const std::string& message)
      : Error(message), kind_(kind), key_(std::move(key)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& key() const noexcept { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

}  // namespace injlock
