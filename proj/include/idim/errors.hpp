#pragma once

#include <stdexcept>
#include <string>

namespace idim {

/// Invalid argument values (k out of range, negative x, bad flag combination).
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Input data violates a contract (non-finite entries, duplicate points, ragged rows).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Geometry too degenerate for a statistic (zero denominators, too few usable vectors).
class DegenerateGeometryError : public DataError {
public:
  explicit DegenerateGeometryError(const std::string& msg) : DataError(msg) {}
};

/// A numeric evaluation cannot deliver meaningful digits (catastrophic cancellation).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File exists and parses but was written by an incompatible format version.
class FormatVersionError : public IoError {
public:
  explicit FormatVersionError(const std::string& msg) : IoError(msg) {}
};

/// File is truncated or structurally invalid.
class CorruptFileError : public IoError {
public:
  explicit CorruptFileError(const std::string& msg) : IoError(msg) {}
};

}  // namespace idim
