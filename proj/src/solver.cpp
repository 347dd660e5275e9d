// SPDX-License-Identifier: Apache-2.0

#include "sirl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace sirl {

namespace {

constexpr double kPivotTol = 1e-9;

// Column-transformed LP in equality standard form, built from an
// InstanceModel plus per-node bound overrides. Internal problems always
// minimize; free variables are split, shifted variables record their offset.
struct StandardLP {
  // transform per original variable: x = base + scale * y[col]
  // (split variables additionally subtract y[neg_col])
  struct VarMap {
    int col{-1};
    int neg_col{-1};  // >= 0 only for free splits
    double base{0.0};
    double scale{1.0};
  };

  int num_vars{0};  // y-columns before slacks
  std::vector<VarMap> vmap;
  std::vector<std::vector<double>> rows;  // dense coefficients over y-columns
  std::vector<double> rhs;
  std::vector<Sense> senses;
  bool trivially_infeasible{false};
};

StandardLP build_standard(const InstanceModel& model,
                          const std::map<std::string, VarBounds>& overrides) {
  StandardLP lp;
  const size_t n = model.variable_order.size();
  lp.vmap.resize(n);
  std::map<std::string, int> var_index;
  for (size_t i = 0; i < n; ++i) var_index[model.variable_order[i]] = (int)i;

  std::vector<VarBounds> eff(n);
  for (size_t i = 0; i < n; ++i) {
    const std::string& name = model.variable_order[i];
    VarBounds b = model.bounds.at(name);
    auto it = overrides.find(name);
    if (it != overrides.end()) {
      b.lower = std::max(b.lower, it->second.lower);
      b.upper = std::min(b.upper, it->second.upper);
    }
    if (b.lower > b.upper) {
      lp.trivially_infeasible = true;
      return lp;
    }
    eff[i] = b;
  }

  // columns
  for (size_t i = 0; i < n; ++i) {
    StandardLP::VarMap& vm = lp.vmap[i];
    const VarBounds& b = eff[i];
    if (b.lower != -kInfinity) {
      vm.col = lp.num_vars++;
      vm.base = b.lower;
      vm.scale = 1.0;
    } else if (b.upper != kInfinity) {
      vm.col = lp.num_vars++;
      vm.base = b.upper;
      vm.scale = -1.0;
    } else {
      vm.col = lp.num_vars++;
      vm.neg_col = lp.num_vars++;
      vm.base = 0.0;
      vm.scale = 1.0;
    }
  }

  auto add_row = [&](const std::vector<LinearTerm>& terms, Sense sense,
                     double rhs) {
    std::vector<double> row(lp.num_vars, 0.0);
    double shift = 0.0;
    for (const auto& t : terms) {
      const StandardLP::VarMap& vm = lp.vmap[var_index.at(t.var)];
      row[vm.col] += t.coeff * vm.scale;
      if (vm.neg_col >= 0) row[vm.neg_col] -= t.coeff;
      shift += t.coeff * vm.base;
    }
    lp.rows.push_back(std::move(row));
    lp.senses.push_back(sense);
    lp.rhs.push_back(rhs - shift);
  };

  for (const auto& c : model.constraints) add_row(c.terms, c.sense, c.rhs);

  // finite two-sided ranges become explicit upper rows on the shifted column
  for (size_t i = 0; i < n; ++i) {
    const VarBounds& b = eff[i];
    if (b.lower != -kInfinity && b.upper != kInfinity) {
      std::vector<double> row(lp.num_vars, 0.0);
      row[lp.vmap[i].col] = 1.0;
      lp.rows.push_back(std::move(row));
      lp.senses.push_back(Sense::LessEqual);
      lp.rhs.push_back(b.upper - b.lower);
    }
  }
  return lp;
}

enum class LpResult { Optimal, Infeasible, Unbounded };

// Dense two-phase simplex over the standardized rows. Minimizes cost·y.
// Pivot ties within kPivotTol break toward the lowest index (Bland).
class SimplexTableau {
 public:
  SimplexTableau(const StandardLP& lp, std::vector<double> cost)
      : cost_(std::move(cost)) {
    const int m = (int)lp.rows.size();
    n_ = lp.num_vars;
    // slack/surplus columns
    for (int i = 0; i < m; ++i)
      if (lp.senses[i] != Sense::Equal) slack_col_.push_back(n_ + (int)slack_col_.size());
    total_ = n_ + (int)slack_col_.size();
    cost_.resize(total_, 0.0);

    int next_slack = n_;
    rows_.assign(m, std::vector<double>(total_ + 1, 0.0));
    basis_.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      double sgn = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < lp.num_vars; ++j) rows_[i][j] = sgn * lp.rows[i][j];
      rows_[i][total_] = sgn * lp.rhs[i];
      if (lp.senses[i] != Sense::Equal) {
        double s = lp.senses[i] == Sense::LessEqual ? 1.0 : -1.0;
        rows_[i][next_slack] = sgn * s;
        if (sgn * s > 0.0) basis_[i] = next_slack;
        ++next_slack;
      }
    }
  }

  LpResult run() {
    const int m = (int)rows_.size();
    // Phase 1: artificial columns for rows without a usable slack basis.
    std::vector<int> artificial;
    for (int i = 0; i < m; ++i) {
      if (basis_[i] == -1) {
        for (auto& row : rows_) row.insert(row.end() - 1, 0.0);
        rows_[i][total_] = 1.0;
        basis_[i] = total_;
        artificial.push_back(total_);
        ++total_;
      }
    }
    if (!artificial.empty()) {
      std::vector<double> phase1(total_, 0.0);
      for (int a : artificial) phase1[a] = 1.0;
      LpResult r = optimize(phase1, /*phase1=*/true);
      if (r == LpResult::Unbounded)
        throw NumericalError("phase-1 objective unbounded");
      double infeas = 0.0;
      for (int i = 0; i < m; ++i)
        if (std::find(artificial.begin(), artificial.end(), basis_[i]) !=
            artificial.end())
          infeas += rows_[i].back();
      if (infeas > 1e-7) return LpResult::Infeasible;
      purge_artificials(artificial);
    }
    cost_.resize(total_, 0.0);
    return optimize(cost_, /*phase1=*/false);
  }

  // y-column values of the optimal basic solution
  std::vector<double> solution() const {
    std::vector<double> y(total_, 0.0);
    for (size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] >= 0 && basis_[i] < total_) y[basis_[i]] = rows_[i].back();
    return y;
  }

 private:
  void purge_artificials(const std::vector<int>& artificial) {
    auto is_art = [&](int j) {
      return std::find(artificial.begin(), artificial.end(), j) !=
             artificial.end();
    };
    for (size_t i = 0; i < basis_.size();) {
      if (!is_art(basis_[i])) {
        ++i;
        continue;
      }
      int pivot_col = -1;
      for (int j = 0; j < total_; ++j) {
        if (is_art(j)) continue;
        if (std::abs(rows_[i][j]) > kPivotTol) {
          pivot_col = j;
          break;
        }
      }
      if (pivot_col >= 0) {
        pivot((int)i, pivot_col);
        ++i;
      } else {
        // dependent row: drop it
        rows_.erase(rows_.begin() + (long)i);
        basis_.erase(basis_.begin() + (long)i);
      }
    }
    // zero out artificial columns so they can never re-enter
    for (auto& row : rows_)
      for (int a : artificial) row[a] = 0.0;
  }

  LpResult optimize(const std::vector<double>& cost, bool phase1) {
    const int m = (int)rows_.size();
    long max_iter = 2000L + 200L * (m + total_);
    for (long iter = 0; iter < max_iter; ++iter) {
      // reduced costs r_j = c_j - c_B . column_j
      std::vector<double> cb(m);
      for (int i = 0; i < m; ++i)
        cb[i] = basis_[i] >= 0 && basis_[i] < (int)cost.size() ? cost[basis_[i]] : 0.0;
      int enter = -1;
      double best = -kPivotTol;
      for (int j = 0; j < total_; ++j) {
        if (j >= (int)cost.size()) break;
        double r = cost[j];
        for (int i = 0; i < m; ++i)
          if (cb[i] != 0.0) r -= cb[i] * rows_[i][j];
        if (r < best - kPivotTol) {
          best = r;
          enter = j;
        } else if (enter >= 0 && r < best + kPivotTol && j < enter) {
          // tolerance tie: Bland, lowest index (never reached since j>enter
          // in this scan order; kept for clarity)
        }
      }
      if (enter < 0) return LpResult::Optimal;

      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        double a = rows_[i][enter];
        if (a > kPivotTol) {
          double ratio = rows_[i].back() / a;
          if (leave < 0 || ratio < best_ratio - kPivotTol ||
              (ratio < best_ratio + kPivotTol && basis_[i] < basis_[leave])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        if (phase1) throw NumericalError("phase-1 ratio test failed");
        return LpResult::Unbounded;
      }
      pivot(leave, enter);
    }
    throw NumericalError("simplex iteration limit exceeded");
  }

  void pivot(int r, int c) {
    double p = rows_[r][c];
    if (std::abs(p) < kPivotTol)
      throw NumericalError("pivot element below tolerance");
    double inv = 1.0 / p;
    for (double& v : rows_[r]) v *= inv;
    rows_[r][c] = 1.0;
    for (size_t i = 0; i < rows_.size(); ++i) {
      if ((int)i == r) continue;
      double f = rows_[i][c];
      if (f == 0.0) continue;
      for (size_t j = 0; j < rows_[i].size(); ++j)
        rows_[i][j] -= f * rows_[r][j];
      rows_[i][c] = 0.0;
    }
    basis_[r] = c;
  }

  int n_{0};
  int total_{0};
  std::vector<int> slack_col_;
  std::vector<double> cost_;
  std::vector<std::vector<double>> rows_;
  std::vector<int> basis_;
};

struct RelaxationResult {
  LpResult result;
  std::map<std::string, double> assignment;
  double objective{0.0};
};

RelaxationResult solve_lp(const InstanceModel& model,
                          const std::map<std::string, VarBounds>& overrides) {
  StandardLP lp = build_standard(model, overrides);
  if (lp.trivially_infeasible) return {LpResult::Infeasible, {}, 0.0};

  std::vector<double> cost(lp.num_vars, 0.0);
  const double dir = model.direction == Direction::Maximize ? -1.0 : 1.0;
  std::map<std::string, int> var_index;
  for (size_t i = 0; i < model.variable_order.size(); ++i)
    var_index[model.variable_order[i]] = (int)i;
  for (const auto& t : model.objective) {
    const StandardLP::VarMap& vm = lp.vmap[var_index.at(t.var)];
    cost[vm.col] += dir * t.coeff * vm.scale;
    if (vm.neg_col >= 0) cost[vm.neg_col] -= dir * t.coeff;
  }

  SimplexTableau tableau(lp, cost);
  LpResult r = tableau.run();
  if (r != LpResult::Optimal) return {r, {}, 0.0};

  std::vector<double> y = tableau.solution();
  RelaxationResult out;
  out.result = LpResult::Optimal;
  for (size_t i = 0; i < model.variable_order.size(); ++i) {
    const StandardLP::VarMap& vm = lp.vmap[i];
    double v = vm.base + vm.scale * y[vm.col];
    if (vm.neg_col >= 0) v -= y[vm.neg_col];
    out.assignment[model.variable_order[i]] = v;
  }
  out.objective = evaluate_objective(model, out.assignment);
  return out;
}

std::vector<std::string> integer_vars(const InstanceModel& model) {
  std::vector<std::string> v;
  for (const std::string& name : model.variable_order) {
    VarKind k = model.var_kind.at(name);
    if (k != VarKind::Continuous) v.push_back(name);
  }
  return v;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Error: return "error";
  }
  return "error";
}

double evaluate_objective(const InstanceModel& model,
                          const std::map<std::string, double>& assignment) {
  double v = model.objective_constant;
  for (const auto& t : model.objective) v += t.coeff * assignment.at(t.var);
  return v;
}

bool check_feasible(const InstanceModel& model,
                    const std::map<std::string, double>& assignment,
                    double tol) {
  for (const std::string& name : model.variable_order) {
    auto it = assignment.find(name);
    if (it == assignment.end()) return false;
    const VarBounds& b = model.bounds.at(name);
    if (it->second < b.lower - tol || it->second > b.upper + tol) return false;
  }
  for (const auto& c : model.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coeff * assignment.at(t.var);
    switch (c.sense) {
      case Sense::LessEqual:
        if (lhs > c.rhs + tol) return false;
        break;
      case Sense::GreaterEqual:
        if (lhs < c.rhs - tol) return false;
        break;
      case Sense::Equal:
        if (std::abs(lhs - c.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

SolveOutcome solve_relaxation(const InstanceModel& model) {
  return solve_relaxation(model, SolverConfig{});
}

SolveOutcome solve_relaxation(const InstanceModel& model,
                              const SolverConfig& cfg) {
  (void)cfg;
  RelaxationResult r = solve_lp(model, {});
  SolveOutcome out;
  switch (r.result) {
    case LpResult::Optimal:
      out.status = SolveStatus::Optimal;
      out.objective = r.objective;
      out.assignment = std::move(r.assignment);
      break;
    case LpResult::Infeasible:
      out.status = SolveStatus::Infeasible;
      break;
    case LpResult::Unbounded:
      out.status = SolveStatus::Unbounded;
      break;
  }
  return out;
}

SolveOutcome solve(const InstanceModel& model, const SolverConfig& cfg) {
  if (model.nonlinear_flag) throw NonlinearUnsupportedError();

  const std::vector<std::string> ints = integer_vars(model);
  if (ints.empty()) return solve_relaxation(model, cfg);

  const auto deadline = std::chrono::steady_clock::now() + cfg.time_limit;
  const bool maximize = model.direction == Direction::Maximize;
  const double worst = maximize ? -kInfinity : kInfinity;
  auto better = [&](double a, double b) { return maximize ? a > b : a < b; };

  struct Node {
    long id;
    double bound;
    std::map<std::string, VarBounds> overrides;
    std::map<std::string, double> relaxed;
  };
  auto node_order = [&](const Node& a, const Node& b) {
    if (a.bound != b.bound) return maximize ? a.bound < b.bound : a.bound > b.bound;
    return a.id > b.id;  // FIFO among equal bounds
  };
  std::priority_queue<Node, std::vector<Node>, decltype(node_order)> open(
      node_order);

  long nodes = 0;
  long next_id = 0;
  bool has_incumbent = false;
  double incumbent_obj = worst;
  std::map<std::string, double> incumbent;

  SolveOutcome out;

  // evaluates one node; returns false when limits are hit
  auto expand = [&](std::map<std::string, VarBounds> overrides) -> bool {
    ++nodes;
    if (nodes > cfg.node_limit) {
      out.status = SolveStatus::NodeLimit;
      return false;
    }
    if (std::chrono::steady_clock::now() > deadline) {
      out.status = SolveStatus::TimeLimit;
      return false;
    }
    RelaxationResult r = solve_lp(model, overrides);
    if (r.result == LpResult::Infeasible) return true;
    if (r.result == LpResult::Unbounded) {
      if (nodes == 1) {
        out.status = SolveStatus::Unbounded;
        return false;
      }
      throw NumericalError("bounded node relaxation reported unbounded");
    }
    if (has_incumbent && !better(r.objective, incumbent_obj)) return true;

    // integrality check
    std::string branch_var;
    double branch_val = 0.0;
    double best_dist = kInfinity;
    for (const std::string& name : ints) {
      double v = r.assignment.at(name);
      double frac = std::abs(v - std::round(v));
      if (frac > cfg.integrality_tol) {
        double dist = std::abs(frac - 0.5);
        if (dist < best_dist - 1e-12) {
          best_dist = dist;
          branch_var = name;
          branch_val = v;
        }
      }
    }
    if (branch_var.empty()) {
      // integral: snap and accept as incumbent
      std::map<std::string, double> candidate = r.assignment;
      for (const std::string& name : ints)
        candidate[name] = std::round(candidate[name]);
      double obj = evaluate_objective(model, candidate);
      if (check_feasible(model, candidate, cfg.feasibility_tol)) {
        if (!has_incumbent || better(obj, incumbent_obj)) {
          has_incumbent = true;
          incumbent_obj = obj;
          incumbent = std::move(candidate);
        }
      } else if (!has_incumbent || better(r.objective, incumbent_obj)) {
        // snapping perturbed a tight constraint: keep the LP point
        has_incumbent = true;
        incumbent_obj = r.objective;
        incumbent = r.assignment;
      }
      return true;
    }

    Node node;
    node.id = next_id++;
    node.bound = r.objective;
    node.overrides = std::move(overrides);
    node.relaxed = std::move(r.assignment);
    // remember the branching variable via the relaxation point
    open.push(std::move(node));
    return true;
  };

  try {
    if (!expand({})) return out;
    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (has_incumbent && !better(node.bound, incumbent_obj)) continue;

      // re-derive the branch variable for this node's relaxation point
      std::string branch_var;
      double branch_val = 0.0;
      double best_dist = kInfinity;
      for (const std::string& name : ints) {
        double v = node.relaxed.at(name);
        double frac = std::abs(v - std::round(v));
        if (frac > cfg.integrality_tol) {
          double dist = std::abs(frac - 0.5);
          if (dist < best_dist - 1e-12) {
            best_dist = dist;
            branch_var = name;
            branch_val = v;
          }
        }
      }
      if (branch_var.empty()) continue;  // defensive; handled at expand

      double floor_v = std::floor(branch_val);
      auto down = node.overrides;
      {
        VarBounds vb = down.count(branch_var) ? down[branch_var] : VarBounds{-kInfinity, kInfinity};
        vb.upper = std::min(vb.upper, floor_v);
        down[branch_var] = vb;
      }
      auto up = node.overrides;
      {
        VarBounds vb = up.count(branch_var) ? up[branch_var] : VarBounds{-kInfinity, kInfinity};
        vb.lower = std::max(vb.lower, floor_v + 1.0);
        up[branch_var] = vb;
      }
      if (!expand(std::move(down))) return out;
      if (!expand(std::move(up))) return out;
    }
  } catch (const NumericalError& e) {
    out.status = SolveStatus::Error;
    out.message = e.what();
    out.nodes_explored = nodes;
    return out;
  }

  out.nodes_explored = nodes;
  if (has_incumbent) {
    out.status = SolveStatus::Optimal;
    out.objective = incumbent_obj;
    out.assignment = std::move(incumbent);
  } else {
    out.status = SolveStatus::Infeasible;
  }
  return out;
}

}  // namespace sirl
