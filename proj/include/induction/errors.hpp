#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace induction {

// Invalid argument outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// James formula returned a non-positive lean body mass.
class DegenerateDemographicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Schnider regression produced a non-positive rate constant.
class ParameterOutOfRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive integrator step size fell below the underflow limit.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergenceError : public std::runtime_error {
 public:
  NoConvergenceError(const std::string& what, double best_residual, std::size_t seeds_tried)
      : std::runtime_error(what), best_residual_(best_residual), seeds_tried_(seeds_tried) {}

  double best_residual() const noexcept { return best_residual_; }
  std::size_t seeds_tried() const noexcept { return seeds_tried_; }

 private:
  double best_residual_;
  std::size_t seeds_tried_;
};

// No bang-bang pattern reaches the target within the search horizon.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace induction
