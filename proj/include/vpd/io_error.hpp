#pragma once

#include <stdexcept>

namespace vpd {

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vpd
