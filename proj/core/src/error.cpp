#include "near_misses/error.hpp"

namespace near_misses {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return 1;
    case ErrorKind::kNumericalBudget:
      return 2;
    case ErrorKind::kContract:
      return 3;
  }
  return 1;
}

}  // namespace near_misses
