#ifndef BANMOD_SIMPLEX_HPP_
#define BANMOD_SIMPLEX_HPP_

#include <utility>
#include <vector>

#include "banmod/linalg.hpp"

namespace banmod {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  Vec x;
};

// Dense two-phase tableau simplex with Bland's rule for
//   min c^T x  s.t.  A x = b, x >= 0.
// The optimal basis is re-solved with an LU factorization at the end so the
// reported vertex carries no accumulated pivoting error.
LpResult simplex_solve(const Mat& a, const Vec& b, const Vec& c);

enum class Sense { le, eq, ge };

// Builds small LPs with free and nonnegative variables and converts them to
// the standard form above.
class LpBuilder {
 public:
  Index add_var(bool free_var);
  Index num_vars() const { return static_cast<Index>(free_.size()); }
  void add_row(std::vector<std::pair<Index, double>> coeffs, Sense sense, double rhs);
  void set_objective(std::vector<std::pair<Index, double>> coeffs);
  LpResult minimize() const;

 private:
  struct Row {
    std::vector<std::pair<Index, double>> coeffs;
    Sense sense;
    double rhs;
  };
  std::vector<bool> free_;
  std::vector<Row> rows_;
  std::vector<std::pair<Index, double>> objective_;
};

}  // namespace banmod

#endif  // BANMOD_SIMPLEX_HPP_
