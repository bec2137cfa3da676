#pragma once

#include <stdexcept>
#include <string>

namespace oog {

/// Exit-code categories shared by the CLI and the service error payloads.
enum class ErrorCode : int {
  ok = 0,
  config = 2,        // malformed descriptors, files, arguments
  contract = 3,      // engine or strategy contract violations, caps
  verification = 4,  // a replayed certificate or audit did not hold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorCode::contract, what) {}
};

/// A configured size bound was hit. Never silently approximated.
class CapExceeded : public ContractViolation {
 public:
  explicit CapExceeded(const std::string& what) : ContractViolation("cap exceeded: " + what) {}
};

class VerificationFailure : public Error {
 public:
  explicit VerificationFailure(const std::string& what) : Error(ErrorCode::verification, what) {}
};

/// Size bounds for every operation that can grow exponentially.
struct Limits {
  std::size_t support_cap = 20;    // exhaustive 2^|support| enumeration
  std::size_t cantor_j_cap = 12;   // |J_n| for the Cantor-cube strategy
  std::size_t family_cap = 4096;   // sets per move family
  std::size_t filter_cap = 20000;  // members per filter element
  std::size_t max_branches = 64;   // leaves of a Kuratowski-Ulam refinement tree
  std::size_t sequence_cap = 2000000;  // subfamily sequences per closure level
};

}  // namespace oog
