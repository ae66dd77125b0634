#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcv {

/// A precondition on an argument was violated (pixel off-lattice, bad order, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input bytes. `offset()` is the byte position where decoding stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A request exceeds a fixed representational or enumeration limit.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A segmentation configuration is inconsistent; raised before any work is done.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mcv
