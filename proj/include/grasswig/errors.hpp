#pragma once

#include <stdexcept>
#include <string>

namespace grasswig {

// Caller broke a documented precondition (mismatched algebras, duplicate
// integration variables, bad indices).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// A gate or map is not a signed-monomial permutation, so the classical
// engines cannot take it.
class ClassificationError : public std::runtime_error {
 public:
  explicit ClassificationError(const std::string& what) : std::runtime_error(what) {}
};

// Input state outside what an engine handles (non-stabilizer, entangled class).
class StateError : public std::runtime_error {
 public:
  explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

}  // namespace grasswig
