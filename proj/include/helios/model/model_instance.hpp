#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"

namespace helios {

enum class Sense { le, ge, eq };
enum class ConeKind { exponential, dual_exponential };

struct VarBlock {
  std::string name;
  std::vector<int> dims;
  int first = 0;
  int count = 0;
};

struct RowBlock {
  std::string name;
  std::string tag;  // model component the rows implement
  int first = 0;
  int count = 0;
};

// (scale[0]*x[vars[0]], scale[1]*x[vars[1]], scale[2]*x[vars[2]]) in K.
// K_exp:  {(x,y,z): y*exp(x/y) <= z, y > 0} closure.
// K*_exp: {(u,v,w): -u*exp(v/u) <= e*w, u < 0} closure.
struct ConeTriple {
  ConeKind kind = ConeKind::exponential;
  std::array<int, 3> vars{};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
};

// One scenario's operational cost: sum coefs*x, weighted by probability in the objective.
struct CostBlock {
  int group = 0;     // ambiguity group, (month, year)
  int scenario = 0;  // d
  double probability = 0.0;
  std::vector<int> vars;
  std::vector<double> coefs;
};

struct LinExpr {
  std::vector<int> idx;
  std::vector<double> val;

  void add(int j, double v) {
    if (v == 0.0) return;
    idx.push_back(j);
    val.push_back(v);
  }
  void clear() {
    idx.clear();
    val.clear();
  }
  bool empty() const { return idx.empty(); }
};

class ModelInstance {
 public:
  std::string name = "model";

  // Variables
  std::vector<double> lb, ub, obj;
  double obj_offset = 0.0;
  std::vector<VarBlock> var_blocks;

  // Rows in compressed sparse row form
  std::vector<int> row_ptr{0};
  std::vector<int> cols;
  std::vector<double> vals;
  std::vector<Sense> sense;
  std::vector<double> rhs;
  std::vector<RowBlock> row_blocks;

  std::vector<ConeTriple> cones;
  std::vector<CostBlock> cost_blocks;
  int cost_groups = 0;
  bool cost_blocks_weighted = true;  // objective currently holds sum probability*cost

  int num_vars() const { return static_cast<int>(lb.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
  size_t num_nonzeros() const { return vals.size(); }

  int add_block(std::string block_name, std::vector<int> dims, double lo, double hi, double cost = 0.0) {
    int count = 1;
    for (int d : dims) count *= d;
    VarBlock b{std::move(block_name), std::move(dims), num_vars(), count};
    lb.insert(lb.end(), count, lo);
    ub.insert(ub.end(), count, hi);
    obj.insert(obj.end(), count, cost);
    var_blocks.push_back(std::move(b));
    return var_blocks.back().first;
  }

  int add_variable(std::string var_name, double lo, double hi, double cost = 0.0) {
    return add_block(std::move(var_name), {}, lo, hi, cost);
  }

  void begin_rows(std::string block_name, std::string tag) {
    row_blocks.push_back({std::move(block_name), std::move(tag), num_rows(), 0});
  }

  int add_row(const LinExpr& e, Sense s, double r) { return add_row(e.idx, e.val, s, r); }

  int add_row(const std::vector<int>& idx, const std::vector<double>& val, Sense s, double r) {
    if (row_blocks.empty()) begin_rows("rows", "");
    std::vector<std::pair<int, double>> t(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= num_vars())
        fail(ErrorCode::inconsistent_dimensions, "row references unregistered variable");
      t[k] = {idx[k], val[k]};
    }
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    int last = -1;
    for (const auto& [j, v] : t) {
      if (j == last) {
        vals.back() += v;
      } else {
        cols.push_back(j);
        vals.push_back(v);
        last = j;
      }
    }
    row_ptr.push_back(static_cast<int>(cols.size()));
    sense.push_back(s);
    rhs.push_back(r);
    row_blocks.back().count++;
    return num_rows() - 1;
  }

  void add_cone(ConeKind kind, std::array<int, 3> v, std::array<double, 3> s = {1.0, 1.0, 1.0}) {
    for (int j : v)
      if (j < 0 || j >= num_vars()) fail(ErrorCode::inconsistent_dimensions, "cone references unregistered variable");
    cones.push_back({kind, v, s});
  }

  // Append an operational cost block; its weighted cost is added to the objective.
  void add_cost_block(CostBlock b) {
    for (size_t k = 0; k < b.vars.size(); ++k) obj[b.vars[k]] += b.probability * b.coefs[k];
    cost_groups = std::max(cost_groups, b.group + 1);
    cost_blocks.push_back(std::move(b));
  }

  const VarBlock* find_block(std::string_view block_name) const {
    for (const auto& b : var_blocks)
      if (b.name == block_name) return &b;
    return nullptr;
  }
  const RowBlock* find_rows(std::string_view block_name) const {
    for (const auto& b : row_blocks)
      if (b.name == block_name) return &b;
    return nullptr;
  }

  std::string var_name(int j) const {
    auto it = std::upper_bound(var_blocks.begin(), var_blocks.end(), j,
                               [](int v, const VarBlock& b) { return v < b.first; });
    const VarBlock& b = *std::prev(it);
    int off = j - b.first;
    if (b.dims.empty()) return b.name;
    std::vector<int> ix(b.dims.size());
    for (int k = static_cast<int>(b.dims.size()) - 1; k >= 0; --k) {
      ix[k] = off % b.dims[k];
      off /= b.dims[k];
    }
    std::string s = b.name + "(";
    for (size_t k = 0; k < ix.size(); ++k) s += (k ? "," : "") + std::to_string(ix[k]);
    return s + ")";
  }

  std::string row_name(int i) const {
    for (const auto& b : row_blocks)
      if (i >= b.first && i < b.first + b.count) return b.name + "(" + std::to_string(i - b.first) + ")";
    return "r" + std::to_string(i);
  }

  double objective_value(const std::vector<double>& x) const {
    double v = obj_offset;
    for (int j = 0; j < num_vars(); ++j) v += obj[j] * x[j];
    return v;
  }

  double row_activity(int i, const std::vector<double>& x) const {
    double a = 0;
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) a += vals[p] * x[cols[p]];
    return a;
  }

  // Largest absolute violation of a row, bound, or (rescaled) cone membership.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0;
    for (int j = 0; j < num_vars(); ++j) {
      worst = std::max(worst, lb[j] - x[j]);
      worst = std::max(worst, x[j] - ub[j]);
    }
    for (int i = 0; i < num_rows(); ++i) {
      double a = row_activity(i, x);
      if (sense[i] != Sense::ge) worst = std::max(worst, a - rhs[i]);
      if (sense[i] != Sense::le) worst = std::max(worst, rhs[i] - a);
    }
    for (const auto& c : cones) {
      double p = c.scale[0] * x[c.vars[0]], q = c.scale[1] * x[c.vars[1]], r = c.scale[2] * x[c.vars[2]];
      worst = std::max(worst, cone_violation(c.kind, p, q, r));
    }
    return worst;
  }

  static double cone_violation(ConeKind kind, double p, double q, double r) {
    if (kind == ConeKind::dual_exponential) {
      // (u,v,w) in K*_exp  <=>  (u - v, -u, w) in K_exp
      double u = p, v = q, w = r;
      p = u - v;
      q = -u;
      r = w;
    }
    if (q > 0) return std::max(0.0, q * std::exp(p / q) - r);
    return std::max({0.0, -q, p, -r});
  }
};

}  // namespace helios
