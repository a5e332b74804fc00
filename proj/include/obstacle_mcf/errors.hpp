#pragma once

#include <stdexcept>
#include <string>

namespace obstacle_mcf {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used in the CLI's JSON error report.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& reason)
      : Error("ConfigError", key + ": " + reason), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// The interface came within the far-field margin of the box boundary.
class MarginError : public Error {
 public:
  explicit MarginError(const std::string& message) : Error("MarginError", message) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("ShapeError", message) {}
};

/// Requested time step exceeds the explicit-scheme stability bound.
class StabilityError : public Error {
 public:
  explicit StabilityError(const std::string& message) : Error("StabilityError", message) {}
};

class BlowUpError : public Error {
 public:
  explicit BlowUpError(const std::string& message) : Error("BlowUpError", message) {}
};

/// The backward heat kernel was evaluated too close to its singular time.
class KernelTooCloseError : public Error {
 public:
  explicit KernelTooCloseError(const std::string& message)
      : Error("KernelTooCloseError", message) {}
};

class EmptyContourError : public Error {
 public:
  explicit EmptyContourError(const std::string& message)
      : Error("EmptyContourError", message) {}
};

/// The exact shrinking sphere has already vanished at the requested time.
class ExtinctError : public Error {
 public:
  explicit ExtinctError(const std::string& message) : Error("ExtinctError", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

}  // namespace obstacle_mcf
