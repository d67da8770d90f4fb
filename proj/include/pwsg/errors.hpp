#pragma once

#include <stdexcept>
#include <string>

namespace pwsg {

/// Base class for all simulator errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Initial transverse position lies outside the incident packet support.
struct OutsidePacketError : Error {
  using Error::Error;
};

/// Guidance velocity requested at a point where the wave vanishes.
struct ZeroAmplitudeError : Error {
  using Error::Error;
};

/// A two-particle amplitude matrix is entangled where a product state is required.
struct NotProductError : Error {
  using Error::Error;
};

/// Malformed experiment chain or scenario (structural problem, not syntax).
struct ConfigError : Error {
  using Error::Error;
};

/// Config text could not be parsed; carries the offending position.
struct ParseError : Error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& msg, int line_, int column_)
      : Error("parse error at line " + std::to_string(line_) + ", column " +
              std::to_string(column_) + ": " + msg),
        line(line_),
        column(column_) {}
};

/// Config parsed but a value is out of contract; names the offending key.
struct ValidationError : Error {
  std::string key;
  explicit ValidationError(const std::string& key_, const std::string& msg)
      : Error("invalid value for '" + key_ + "': " + msg), key(key_) {}
};

}  // namespace pwsg
