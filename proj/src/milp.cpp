#include "sdnpart/milp.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <deque>
#include <queue>
#include <sstream>

namespace sdnpart::milp {

namespace {
constexpr double kEps = 1e-9;
constexpr double kTol = 1e-6;
constexpr double kInf = 1e100;
}  // namespace

double Solution::gap() const {
  double denom = std::max(1.0, std::fabs(objective));
  return (objective - bound) / denom;
}

// ====== model construction ======

int Model::add_bool(const std::string& name, double obj) {
  vars_.push_back({name, VarType::Boolean, 0, 1, obj});
  return static_cast<int>(vars_.size()) - 1;
}

int Model::add_int(const std::string& name, long long lb, long long ub, double obj) {
  if (lb > ub) throw ModelError("integer variable with empty range: " + name);
  vars_.push_back({name, VarType::Integer, static_cast<double>(lb), static_cast<double>(ub), obj});
  return static_cast<int>(vars_.size()) - 1;
}

int Model::add_continuous(const std::string& name, double obj) {
  if (obj < 0) throw ModelError("continuous variable needs nonnegative objective: " + name);
  vars_.push_back({name, VarType::Continuous, 0, kInf, obj});
  return static_cast<int>(vars_.size()) - 1;
}

int Model::add_constraint(std::vector<Term> terms, Sense sense, double rhs,
                          const std::string& name) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
      throw ModelError("constraint references unknown variable");
    if (vars_[t.var].type == VarType::Continuous && (sense != Sense::GE || t.coef <= 0))
      throw ModelError(
          "continuous variables may only appear in GE rows with positive coefficient: " + name);
  }
  cons_.push_back({std::move(terms), sense, rhs, name});
  return static_cast<int>(cons_.size()) - 1;
}

void Model::set_objective_coef(int var, double obj) {
  if (vars_.at(var).type == VarType::Continuous && obj < 0)
    throw ModelError("continuous variable needs nonnegative objective");
  vars_.at(var).obj = obj;
}

void Model::add_group(Group g) {
  for (int v : g.vars)
    if (vars_.at(v).type == VarType::Continuous)
      throw ModelError("bounding groups may only own integer variables");
  groups_.push_back(std::move(g));
}

void Model::set_branch_order(std::vector<int> vars) { branch_order_ = std::move(vars); }

std::string Model::to_lp_text() const {
  auto var_name = [&](int i) {
    std::string n = vars_[i].name.empty() ? "v" : vars_[i].name;
    for (char& c : n)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
    return n + "_" + std::to_string(i);
  };
  std::ostringstream out;
  out << "Minimize\n obj:";
  bool first = true;
  for (int i = 0; i < static_cast<int>(vars_.size()); ++i) {
    if (vars_[i].obj == 0) continue;
    out << (vars_[i].obj >= 0 && !first ? " +" : " ") << vars_[i].obj << " " << var_name(i);
    first = false;
  }
  if (first) out << " 0";
  out << "\nSubject To\n";
  for (int c = 0; c < static_cast<int>(cons_.size()); ++c) {
    out << " c" << c << ":";
    for (const auto& t : cons_[c].terms)
      out << (t.coef >= 0 ? " +" : " ") << t.coef << " " << var_name(t.var);
    switch (cons_[c].sense) {
      case Sense::LE: out << " <= "; break;
      case Sense::GE: out << " >= "; break;
      case Sense::EQ: out << " = "; break;
    }
    out << cons_[c].rhs << "\n";
  }
  out << "Bounds\n";
  for (int i = 0; i < static_cast<int>(vars_.size()); ++i) {
    if (vars_[i].type == VarType::Continuous)
      out << " " << var_name(i) << " >= 0\n";
    else
      out << " " << vars_[i].lb << " <= " << var_name(i) << " <= " << vars_[i].ub << "\n";
  }
  out << "General\n";
  for (int i = 0; i < static_cast<int>(vars_.size()); ++i)
    if (vars_[i].type == VarType::Integer) out << " " << var_name(i) << "\n";
  out << "Binary\n";
  for (int i = 0; i < static_cast<int>(vars_.size()); ++i)
    if (vars_[i].type == VarType::Boolean) out << " " << var_name(i) << "\n";
  out << "End\n";
  return out.str();
}

// ====== solver ======

namespace {

struct Box {
  std::vector<double> lb, ub;
};

struct SearchNode {
  long long id = 0;
  int parent = -1;
  int depth = 0;
  double bound = -kInf;
  int var = -1;  // branching decision applied on top of the parent box
  double lo = 0, hi = 0;
};

class Solver {
 public:
  Solver(const Model& model, const Limits& limits, const std::vector<double>* warm)
      : m_(model), limits_(limits) {
    n_ = static_cast<int>(m_.variables().size());
    c_ = static_cast<int>(m_.constraints().size());
    var_cons_.resize(n_);
    cont_count_.resize(c_, 0);
    std::size_t nnz = 0;
    for (int c = 0; c < c_; ++c) {
      for (const auto& t : m_.constraints()[c].terms) {
        var_cons_[t.var].push_back(c);
        if (m_.variables()[t.var].type == VarType::Continuous) ++cont_count_[c];
      }
      nnz += m_.constraints()[c].terms.size();
    }
    surrogate_everywhere_ = nnz <= 20000;
    if (!m_.branch_order().empty()) {
      branch_order_ = m_.branch_order();
    } else {
      for (int i = 0; i < n_; ++i)
        if (m_.variables()[i].type != VarType::Continuous) branch_order_.push_back(i);
    }
    root_.lb.resize(n_);
    root_.ub.resize(n_);
    for (int i = 0; i < n_; ++i) {
      root_.lb[i] = m_.variables()[i].lb;
      root_.ub[i] = m_.variables()[i].ub;
    }
    if (warm) try_incumbent_from_ints(*warm);
  }

  Solution run() {
    auto started = std::chrono::steady_clock::now();
    {
      Box box = root_;
      if (propagate(box, all_constraints())) {
        root_ = box;  // children restart from the root fixpoint
        double bound = lower_bound(box, 0);
        if (bound < kInf) {
          nodes_.push_back(SearchNode{next_id_++, -1, 0, bound, -1, 0, 0});
          open_.push(OpenItem{bound, 0, nodes_.back().id, 0});
        }
      }
    }
    long long processed = 0;
    while (!open_.empty()) {
      if (processed >= limits_.max_nodes) break;
      if (limits_.max_seconds > 0 && (processed & 255) == 0) {
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        if (elapsed.count() > limits_.max_seconds) break;
      }
      OpenItem top = open_.top();
      open_.pop();
      ++processed;
      if (has_incumbent_ && nodes_[top.index].bound > incumbent_obj_ - kEps) continue;
      process(top.index);
    }
    Solution sol;
    sol.nodes_explored = processed;
    double open_bound = has_incumbent_ ? incumbent_obj_ : kInf;
    while (!open_.empty()) {
      open_bound = std::min(open_bound, nodes_[open_.top().index].bound);
      open_.pop();
    }
    if (!has_incumbent_) {
      if (open_bound < kInf)
        throw ModelError("search limit reached before any feasible point was found");
      sol.status = Status::Infeasible;
      return sol;
    }
    sol.values = incumbent_;
    sol.objective = incumbent_obj_;
    sol.bound = std::min(open_bound, incumbent_obj_);
    bool closed = (incumbent_obj_ - sol.bound) <= kTol * std::max(1.0, std::fabs(incumbent_obj_));
    sol.status = closed ? Status::Optimal : Status::FeasibleWithGap;
    if (closed) sol.bound = sol.objective;
    return sol;
  }

 private:
  struct OpenItem {
    double bound;
    int depth;
    long long id;
    std::size_t index;
    bool operator>(const OpenItem& o) const {
      if (bound != o.bound) return bound > o.bound;
      if (depth != o.depth) return depth < o.depth;  // deeper nodes pop first
      return id > o.id;
    }
  };

  std::vector<int> all_constraints() const {
    std::vector<int> v(c_);
    for (int c = 0; c < c_; ++c) v[c] = c;
    return v;
  }

  Box materialize(int index, std::vector<int>* touched) const {
    Box box = root_;
    std::vector<int> chain;
    for (int cur = index; cur >= 0; cur = nodes_[cur].parent) chain.push_back(cur);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const SearchNode& s = nodes_[*it];
      if (s.var < 0) continue;
      box.lb[s.var] = std::max(box.lb[s.var], s.lo);
      box.ub[s.var] = std::min(box.ub[s.var], s.hi);
      touched->push_back(s.var);
    }
    return box;
  }

  bool propagate(Box& box, const std::vector<int>& seed_cons) {
    std::vector<char> queued(c_, 0);
    std::deque<int> queue;
    for (int c : seed_cons)
      if (!queued[c]) {
        queued[c] = 1;
        queue.push_back(c);
      }
    auto push_var_cons = [&](int v) {
      for (int c : var_cons_[v])
        if (!queued[c]) {
          queued[c] = 1;
          queue.push_back(c);
        }
    };
    long long budget = 256LL * std::max(1, c_) + 4096;
    while (!queue.empty() && budget-- > 0) {
      int c = queue.front();
      queue.pop_front();
      queued[c] = 0;
      const Constraint& con = m_.constraints()[c];
      bool ge = con.sense == Sense::GE || con.sense == Sense::EQ;
      bool le = con.sense == Sense::LE || con.sense == Sense::EQ;
      double max_fin = 0, min_fin = 0;
      int max_inf = 0, min_inf = 0;
      for (const auto& t : con.terms) {
        double hi_c = t.coef > 0 ? box.ub[t.var] : box.lb[t.var];
        double lo_c = t.coef > 0 ? box.lb[t.var] : box.ub[t.var];
        if (std::fabs(hi_c) >= kInf)
          ++max_inf;
        else
          max_fin += t.coef * hi_c;
        if (std::fabs(lo_c) >= kInf)
          ++min_inf;
        else
          min_fin += t.coef * lo_c;
      }
      if (ge && max_inf == 0 && max_fin < con.rhs - 1e-7) return false;
      if (le && min_inf == 0 && min_fin > con.rhs + 1e-7) return false;
      for (const auto& t : con.terms) {
        const Variable& var = m_.variables()[t.var];
        bool is_int = var.type != VarType::Continuous;
        if (ge) {
          double hi_c = t.coef > 0 ? box.ub[t.var] : box.lb[t.var];
          bool this_inf = std::fabs(hi_c) >= kInf;
          if (max_inf == (this_inf ? 1 : 0)) {
            double rest = max_fin - (this_inf ? 0.0 : t.coef * hi_c);
            double limit = (con.rhs - rest) / t.coef;
            if (t.coef > 0) {
              double nlb = is_int ? std::ceil(limit - 1e-6) : limit;
              if (nlb > box.lb[t.var] + 1e-9) {
                box.lb[t.var] = nlb;
                if (box.lb[t.var] > box.ub[t.var] + 1e-7) return false;
                push_var_cons(t.var);
              }
            } else {
              double nub = is_int ? std::floor(limit + 1e-6) : limit;
              if (nub < box.ub[t.var] - 1e-9) {
                box.ub[t.var] = nub;
                if (box.lb[t.var] > box.ub[t.var] + 1e-7) return false;
                push_var_cons(t.var);
              }
            }
          }
        }
        if (le) {
          double lo_c = t.coef > 0 ? box.lb[t.var] : box.ub[t.var];
          bool this_inf = std::fabs(lo_c) >= kInf;
          if (min_inf == (this_inf ? 1 : 0)) {
            double rest = min_fin - (this_inf ? 0.0 : t.coef * lo_c);
            double limit = (con.rhs - rest) / t.coef;
            if (t.coef > 0) {
              double nub = is_int ? std::floor(limit + 1e-6) : limit;
              if (nub < box.ub[t.var] - 1e-9) {
                box.ub[t.var] = nub;
                if (box.lb[t.var] > box.ub[t.var] + 1e-7) return false;
                push_var_cons(t.var);
              }
            } else {
              double nlb = is_int ? std::ceil(limit - 1e-6) : limit;
              if (nlb > box.lb[t.var] + 1e-9) {
                box.lb[t.var] = nlb;
                if (box.lb[t.var] > box.ub[t.var] + 1e-7) return false;
                push_var_cons(t.var);
              }
            }
          }
        }
      }
    }
    return true;
  }

  double naive_bound(const Box& box) const {
    double b = 0;
    for (int i = 0; i < n_; ++i) {
      double c = m_.variables()[i].obj;
      if (c > 0)
        b += c * box.lb[i];
      else if (c < 0)
        b += c * box.ub[i];
    }
    return b;
  }

  // Cheapest extra objective needed to satisfy one >= row, continuous
  // relaxation over the box. kInf marks an unsatisfiable row, -kInf no info.
  double surrogate_extra(const std::vector<Term>& terms, double rhs, const Box& box) const {
    double activity = 0;
    struct Move {
      double rate;
      double gain;
    };
    std::vector<Move> moves;
    for (const auto& t : terms) {
      const Variable& var = m_.variables()[t.var];
      double x0 = var.obj > 0 ? box.lb[t.var] : box.ub[t.var];
      if (std::fabs(x0) >= kInf) {
        if (t.coef > 0 && var.obj <= 0) return -kInf;  // free unbounded mass
        x0 = box.lb[t.var];
      }
      activity += t.coef * x0;
      double headroom = t.coef > 0 ? box.ub[t.var] - x0 : x0 - box.lb[t.var];
      if (headroom <= 0) continue;
      double gain = std::fabs(t.coef) * std::min(headroom, kInf);
      double rate = var.obj == 0 ? 0 : std::fabs(var.obj) / std::fabs(t.coef);
      moves.push_back({rate, gain});
    }
    double deficit = rhs - activity;
    if (deficit <= 1e-9) return 0;
    std::sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) {
      if (a.rate != b.rate) return a.rate < b.rate;
      return a.gain > b.gain;
    });
    double extra = 0;
    for (const auto& mv : moves) {
      double used = std::min(deficit, mv.gain);
      extra += used * mv.rate;
      deficit -= used;
      if (deficit <= 1e-9) return extra;
    }
    return kInf;
  }

  double group_bound_delta(const Group& g, const Box& box) const {
    if (g.vars.empty()) return 0;
    double combos = 1;
    for (int v : g.vars) {
      combos *= std::floor(box.ub[v] + 1e-6) - std::ceil(box.lb[v] - 1e-6) + 1;
      if (combos > 512 || combos < 1) return 0;
    }
    std::vector<long long> lo(g.vars.size()), hi(g.vars.size()), cur(g.vars.size());
    for (std::size_t i = 0; i < g.vars.size(); ++i) {
      lo[i] = static_cast<long long>(std::ceil(box.lb[g.vars[i]] - 1e-6));
      hi[i] = static_cast<long long>(std::floor(box.ub[g.vars[i]] + 1e-6));
      cur[i] = lo[i];
    }
    double best = kInf;
    while (true) {
      double cost = 0;
      for (std::size_t i = 0; i < g.vars.size(); ++i)
        cost += m_.variables()[g.vars[i]].obj * static_cast<double>(cur[i]);
      bool ok = cost < best;  // only cheaper assignments need the feasibility check
      if (ok) {
        for (int c : g.constraints) {
          const Constraint& con = m_.constraints()[c];
          bool ge = con.sense == Sense::GE || con.sense == Sense::EQ;
          bool le = con.sense == Sense::LE || con.sense == Sense::EQ;
          double max_a = 0, min_a = 0;
          bool max_infinite = false, min_infinite = false;
          for (const auto& t : con.terms) {
            double xlo = box.lb[t.var], xhi = box.ub[t.var];
            for (std::size_t i = 0; i < g.vars.size(); ++i) {
              if (g.vars[i] == t.var) {
                xlo = xhi = static_cast<double>(cur[i]);
                break;
              }
            }
            double chi = t.coef > 0 ? xhi : xlo;
            double clo = t.coef > 0 ? xlo : xhi;
            if (std::fabs(chi) >= kInf)
              max_infinite = true;
            else
              max_a += t.coef * chi;
            if (std::fabs(clo) >= kInf)
              min_infinite = true;
            else
              min_a += t.coef * clo;
          }
          if (ge && !max_infinite && max_a < con.rhs - 1e-7) ok = false;
          if (le && !min_infinite && min_a > con.rhs + 1e-7) ok = false;
          if (!ok) break;
        }
      }
      if (ok) best = std::min(best, cost);
      std::size_t i = 0;
      for (; i < cur.size(); ++i) {
        if (cur[i] < hi[i]) {
          ++cur[i];
          break;
        }
        cur[i] = lo[i];
      }
      if (i == cur.size()) break;
    }
    if (best >= kInf) return kInf;
    double naive = 0;
    for (int v : g.vars) {
      double c = m_.variables()[v].obj;
      if (c > 0)
        naive += c * box.lb[v];
      else if (c < 0)
        naive += c * box.ub[v];
    }
    return best - naive;
  }

  double lower_bound(const Box& box, int depth) {
    double base = naive_bound(box);
    double best = base;
    if (surrogate_everywhere_ || depth == 0) {
      for (const auto& con : m_.constraints()) {
        if (con.sense == Sense::GE || con.sense == Sense::EQ) {
          double extra = surrogate_extra(con.terms, con.rhs, box);
          if (extra >= kInf) return kInf;
          if (extra > 0) best = std::max(best, base + extra);
        }
        if (con.sense == Sense::LE || con.sense == Sense::EQ) {
          std::vector<Term> flipped = con.terms;
          for (auto& t : flipped) t.coef = -t.coef;
          double extra = surrogate_extra(flipped, -con.rhs, box);
          if (extra >= kInf) return kInf;
          if (extra > 0) best = std::max(best, base + extra);
        }
      }
    }
    if (!m_.groups().empty()) {
      double delta_sum = 0;
      for (const auto& g : m_.groups()) {
        double d = group_bound_delta(g, box);
        if (d >= kInf) return kInf;
        delta_sum += d;
      }
      best = std::max(best, base + delta_sum);
    }
    return best;
  }

  int pick_branch_var(const Box& box) const {
    for (int v : branch_order_)
      if (box.ub[v] - box.lb[v] > 0.5) return v;
    for (int v = 0; v < n_; ++v)
      if (m_.variables()[v].type != VarType::Continuous && box.ub[v] - box.lb[v] > 0.5)
        return v;
    return -1;
  }

  // Closed-form continuous values at a leaf: each one sits on its tightest
  // single-continuous >= row, zero when none binds.
  void leaf_values(const Box& box, std::vector<double>* vals) const {
    vals->assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
      if (m_.variables()[i].type == VarType::Continuous)
        (*vals)[i] = 0;
      else
        (*vals)[i] = std::round(box.lb[i]);
    }
    for (int i = 0; i < n_; ++i) {
      if (m_.variables()[i].type != VarType::Continuous) continue;
      double best = 0;
      for (int c : var_cons_[i]) {
        if (cont_count_[c] != 1) continue;
        const Constraint& con = m_.constraints()[c];
        if (con.sense != Sense::GE) continue;
        double rest = 0;
        double coef = 1;
        for (const auto& t : con.terms) {
          if (t.var == i)
            coef = t.coef;
          else
            rest += t.coef * (*vals)[t.var];
        }
        best = std::max(best, (con.rhs - rest) / coef);
      }
      (*vals)[i] = best;
    }
  }

  bool check_point(const std::vector<double>& vals) const {
    for (const auto& con : m_.constraints()) {
      double act = 0;
      for (const auto& t : con.terms) act += t.coef * vals[t.var];
      double slack = con.rhs - act;
      if (con.sense == Sense::GE && slack > 1e-7) return false;
      if (con.sense == Sense::LE && -slack > 1e-7) return false;
      if (con.sense == Sense::EQ && std::fabs(slack) > 1e-7) return false;
    }
    return true;
  }

  void try_leaf(const Box& box) {
    std::vector<double> vals;
    leaf_values(box, &vals);
    if (!check_point(vals)) return;
    double obj = 0;
    for (int i = 0; i < n_; ++i) obj += m_.variables()[i].obj * vals[i];
    if (!has_incumbent_ || obj < incumbent_obj_ - kEps) {
      has_incumbent_ = true;
      incumbent_obj_ = obj;
      incumbent_ = vals;
    }
  }

  void try_incumbent_from_ints(const std::vector<double>& hint) {
    if (static_cast<int>(hint.size()) != n_) return;
    Box box = root_;
    for (int i = 0; i < n_; ++i) {
      if (m_.variables()[i].type == VarType::Continuous) continue;
      double v = std::round(hint[i]);
      if (v < box.lb[i] - 1e-7 || v > box.ub[i] + 1e-7) return;
      box.lb[i] = box.ub[i] = v;
    }
    if (!propagate(box, all_constraints())) return;
    try_leaf(box);
  }

  void process(std::size_t index) {
    SearchNode node = nodes_[index];
    std::vector<int> touched;
    Box box = materialize(static_cast<int>(index), &touched);
    std::vector<int> seed;
    if (node.parent < 0) {
      seed = all_constraints();
    } else {
      for (int v : touched)
        for (int c : var_cons_[v]) seed.push_back(c);
      std::sort(seed.begin(), seed.end());
      seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    }
    if (!propagate(box, seed)) return;
    int var = pick_branch_var(box);
    if (var < 0) {
      try_leaf(box);
      return;
    }
    double bound = lower_bound(box, node.depth);
    if (bound >= kInf) return;
    if (has_incumbent_ && bound > incumbent_obj_ - kEps) return;
    double lo = box.lb[var], hi = box.ub[var];
    if (m_.variables()[var].type == VarType::Boolean) {
      spawn(static_cast<int>(index), node.depth, bound, var, 1, 1);
      spawn(static_cast<int>(index), node.depth, bound, var, 0, 0);
    } else {
      double mid = std::floor((lo + hi) / 2);
      spawn(static_cast<int>(index), node.depth, bound, var, lo, mid);
      spawn(static_cast<int>(index), node.depth, bound, var, mid + 1, hi);
    }
  }

  void spawn(int parent, int depth, double bound, int var, double lo, double hi) {
    SearchNode child;
    child.id = next_id_++;
    child.parent = parent;
    child.depth = depth + 1;
    child.bound = bound;
    child.var = var;
    child.lo = lo;
    child.hi = hi;
    nodes_.push_back(child);
    open_.push(OpenItem{child.bound, child.depth, child.id, nodes_.size() - 1});
  }

  const Model& m_;
  Limits limits_;
  int n_ = 0, c_ = 0;
  std::vector<std::vector<int>> var_cons_;
  std::vector<int> cont_count_;
  std::vector<int> branch_order_;
  Box root_;
  bool surrogate_everywhere_ = true;
  std::vector<SearchNode> nodes_;
  std::priority_queue<OpenItem, std::vector<OpenItem>, std::greater<OpenItem>> open_;
  long long next_id_ = 0;
  bool has_incumbent_ = false;
  double incumbent_obj_ = 0;
  std::vector<double> incumbent_;
};

}  // namespace

Solution solve(const Model& model, const Limits& limits, const std::vector<double>* warm_start) {
  for (const auto& v : model.variables())
    if (v.type == VarType::Continuous && v.obj < 0)
      throw ModelError("continuous variable with negative objective is unbounded");
  Solver solver(model, limits, warm_start);
  return solver.run();
}

}  // namespace sdnpart::milp
