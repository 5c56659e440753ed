#pragma once

#include <stdexcept>
#include <limits>
#include <string>
#include <vector>

namespace sdnpart::milp {

enum class VarType { Boolean, Integer, Continuous };

struct Variable {
  std::string name;
  VarType type = VarType::Boolean;
  double lb = 0;
  double ub = 1;
  double obj = 0;
};

struct Term {
  int var = -1;
  double coef = 0;
};

enum class Sense { LE, GE, EQ };

struct Constraint {
  std::vector<Term> terms;
  Sense sense = Sense::LE;
  double rhs = 0;
  std::string name;
};

// Bounding hint: a set of integer/boolean variables owned exclusively by this
// group plus constraints that mostly involve them. The solver may enumerate
// the group's assignments to strengthen the lower bound. Groups must not
// share variables.
struct Group {
  std::vector<int> vars;
  std::vector<int> constraints;
};

class Model {
 public:
  int add_bool(const std::string& name, double obj = 0);
  int add_int(const std::string& name, long long lb, long long ub, double obj = 0);
  // Continuous variables are nonnegative and epigraph-like: they may appear
  // only with positive coefficient in GE constraints, and carry obj >= 0.
  int add_continuous(const std::string& name, double obj = 0);

  int add_constraint(std::vector<Term> terms, Sense sense, double rhs,
                     const std::string& name = "");

  void set_objective_coef(int var, double obj);
  void add_group(Group g);
  // Branching order. Defaults to declaration order over non-continuous vars.
  void set_branch_order(std::vector<int> vars);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const std::vector<Group>& groups() const { return groups_; }
  const std::vector<int>& branch_order() const { return branch_order_; }

  std::string to_lp_text() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<Group> groups_;
  std::vector<int> branch_order_;
};

struct Limits {
  long long max_nodes = 20'000'000;
  double max_seconds = 0;  // 0 disables the wall clock limit
};

enum class Status { Optimal, FeasibleWithGap, Infeasible };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> values;
  double objective = 0;
  double bound = 0;
  long long nodes_explored = 0;

  double gap() const;
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Branch and bound minimizer. Deterministic: node limits, never wall clock,
// decide reproducibility of truncated runs.
Solution solve(const Model& model, const Limits& limits = {},
               const std::vector<double>* warm_start = nullptr);

}  // namespace sdnpart::milp
