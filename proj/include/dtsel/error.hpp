#pragma once

#include <stdexcept>
#include <string>

namespace dtsel {

enum class ErrorKind {
  parse,       // malformed input text
  incomplete,  // missing value in a case
  validation,  // well-formed input violating a precondition
  prior,       // non-positive Dirichlet hyperparameter
  algebra,     // model/loss sum over incompatible operands
  ordering,    // parent does not precede child
  dimension,   // loss/posterior shape mismatch
  capacity,    // lattice or tree too large
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dtsel
