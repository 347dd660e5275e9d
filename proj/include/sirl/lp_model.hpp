// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sirl {

enum class Direction { Maximize, Minimize };
enum class VarKind { Continuous, GeneralInteger, Binary };
enum class Sense { LessEqual, GreaterEqual, Equal };

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct LinearTerm {
  double coeff{0.0};
  std::string var;
  bool operator==(const LinearTerm&) const = default;
};

struct Constraint {
  std::string name;  // empty when unnamed
  std::vector<LinearTerm> terms;
  Sense sense{Sense::LessEqual};
  double rhs{0.0};
  bool operator==(const Constraint&) const = default;
};

struct VarBounds {
  double lower{0.0};
  double upper{kInfinity};
  bool operator==(const VarBounds&) const = default;
};

// One term of a bracketed quadratic section. var1 == var2 encodes a square.
struct QuadTerm {
  double coeff{0.0};
  std::string var1;
  std::string var2;
  bool operator==(const QuadTerm&) const = default;
};

struct InstanceModel {
  Direction direction{Direction::Minimize};
  std::vector<LinearTerm> objective;
  double objective_constant{0.0};
  std::vector<Constraint> constraints;
  std::vector<std::string> variable_order;  // first-appearance order
  std::unordered_map<std::string, VarBounds> bounds;
  std::unordered_map<std::string, VarKind> var_kind;
  bool nonlinear_flag{false};
  std::vector<QuadTerm> quad_terms;

  bool operator==(const InstanceModel&) const = default;
};

struct SolveOutcome;  // solver.hpp

struct InstanceFeatures {
  std::optional<double> objective_value;  // O_r, present iff Optimal
  Direction direction{Direction::Minimize};
  int n_binary{0};
  int n_general_integer{0};
  bool operator==(const InstanceFeatures&) const = default;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DuplicateVariableTypeError : public std::runtime_error {
 public:
  DuplicateVariableTypeError(const std::string& var, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses LP-format text (see docs/lp_format.md for the grammar).
/// Variables absent from Bounds get [0, +inf); variables absent from the
/// type sections are continuous. A bracketed quadratic section sets
/// nonlinear_flag and its terms are recorded without being solvable.
InstanceModel parse_lp(const std::string& text);

/// Emits deterministic canonical LP text: fixed section order, variables in
/// first-appearance order, shortest round-trip decimals.
std::string write_lp(const InstanceModel& model);

/// Checks the InstanceModel invariants; throws std::invalid_argument.
void validate(const InstanceModel& model);

InstanceFeatures extract_features(const InstanceModel& model,
                                  const SolveOutcome& outcome);

int count_kind(const InstanceModel& model, VarKind kind);

}  // namespace sirl
