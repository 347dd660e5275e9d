// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "sirl/lp_model.hpp"

namespace sirl {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit, TimeLimit, Error };

struct SolveOutcome {
  SolveStatus status{SolveStatus::Error};
  std::optional<double> objective;                  // present iff Optimal
  std::optional<std::map<std::string, double>> assignment;
  long nodes_explored{0};
  std::string message;  // diagnostic for Error
};

struct SolverConfig {
  double feasibility_tol{1e-9};
  double integrality_tol{1e-6};
  long node_limit{100000};
  std::chrono::milliseconds time_limit{std::chrono::seconds(10)};
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error("NumericalError: " + what) {}
};

class NonlinearUnsupportedError : public std::runtime_error {
 public:
  NonlinearUnsupportedError()
      : std::runtime_error(
            "NonlinearUnsupportedError: model has a quadratic section") {}
};

/// LP optimum ignoring integrality. Throws NumericalError when pivoting
/// degenerates beyond tolerance.
SolveOutcome solve_relaxation(const InstanceModel& model);
SolveOutcome solve_relaxation(const InstanceModel& model,
                              const SolverConfig& cfg);

/// Exact MILP optimum within tolerances via best-bound branch-and-bound.
/// Pure-continuous models short-circuit to the relaxation. Throws
/// NonlinearUnsupportedError when the model has a quadratic section.
SolveOutcome solve(const InstanceModel& model, const SolverConfig& cfg = {});

/// Independent feasibility check: every constraint and bound within tol.
bool check_feasible(const InstanceModel& model,
                    const std::map<std::string, double>& assignment,
                    double tol);

double evaluate_objective(const InstanceModel& model,
                          const std::map<std::string, double>& assignment);

const char* to_string(SolveStatus status);

}  // namespace sirl
