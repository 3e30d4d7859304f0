#ifndef SPECTRALOSS_ERRORS_HPP
#define SPECTRALOSS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spectraloss {

/// Invalid argument values (bad dimensions, out-of-range parameters).
class parameter_error : public std::invalid_argument {
 public:
  explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Mismatched grids, truncations, or field shapes.
class shape_error : public std::runtime_error {
 public:
  explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed file contents (bad magic, truncation, non-finite payload).
class format_error : public std::runtime_error {
 public:
  explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem-level failures (missing file, unwritable destination).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A score whose defining denominator vanishes.
class undefined_score_error : public std::runtime_error {
 public:
  explicit undefined_score_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spectraloss

#endif
