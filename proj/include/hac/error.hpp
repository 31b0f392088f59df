#pragma once

#include <stdexcept>
#include <string>

namespace hac {

/// A caller broke a documented precondition: bad parameter, time regression,
/// a query below the configured minimum frequency, and so on.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input or unreadable file.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hac
