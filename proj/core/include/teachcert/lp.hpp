#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "teachcert/rational.hpp"

namespace teachcert::lp {

enum class RowSense { Eq, Le, Ge };

struct Column {
  std::string name;
  bool nonneg = true;  // otherwise free
};

struct Row {
  std::string name;
  std::vector<std::pair<int, Rational>> coeffs;  // (column, coefficient), unique columns
  RowSense sense = RowSense::Eq;
  Rational rhs = 0;
};

/// Linear program over columns that are either nonnegative or free.
/// The objective (minimized) is empty for pure feasibility problems.
class Problem {
 public:
  int add_column(std::string name, bool nonneg = true);
  /// Duplicate columns in `coeffs` are merged; zero coefficients dropped.
  int add_row(std::string name, std::vector<std::pair<int, Rational>> coeffs, RowSense sense,
              Rational rhs);
  void set_objective(std::vector<std::pair<int, Rational>> coeffs);

  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<std::pair<int, Rational>>& objective() const { return objective_; }
  std::size_t nonzeros() const;

  /// Throws InvariantViolation when a row references an unknown column.
  void validate() const;

  /// Copy with every inequality row moved `delta` into its interior.
  Problem tightened(const Rational& delta) const;

  /// CPLEX-LP-style text. Coefficients are exact ("p/q") unless `decimal`.
  std::string to_text(bool decimal = false) const;
  static Problem from_text(const std::string& text);

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
  std::vector<std::pair<int, Rational>> objective_;
};

enum class Status { Feasible, Infeasible, IterationLimit };
enum class Mode { Float, Exact };

std::string to_string(Status s);

struct Solution {
  Status status = Status::IterationLimit;
  Mode mode = Mode::Float;
  std::vector<double> values;          // float mode (also filled in exact mode)
  RationalVector exact_values;         // exact mode, or after a passing recheck
  double max_equality_residual = 0;
  double max_inequality_violation = 0;
  /// Row multipliers y proving infeasibility: y >= 0 on >= rows, y <= 0 on <= rows,
  /// y^T A <= 0 on nonnegative columns, = 0 on free columns, y^T b > 0.
  std::vector<double> farkas;
  RationalVector exact_farkas;
  /// Final basis over the internal standard form (used by recheck).
  std::vector<int> basis;
  std::size_t iterations = 0;
};

struct Options {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  std::size_t iteration_limit = 200000;
  /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
  std::size_t stall_threshold = 50;
};

/// Two-phase simplex. Float mode: revised simplex in doubles. Exact mode:
/// tableau simplex over rationals (desk-scale problems only).
/// Throws IterationLimit and (float mode) NumericalBreakdown.
Solution solve(const Problem& p, Mode mode, const Options& options = {});

struct AuditReport {
  bool passed = false;
  std::string method;  // "exact", "rationalized", "basis-resolve", "farkas"
  std::vector<std::size_t> violated_rows;
  RationalVector assignment;
};

/// Exact re-evaluation of a solution. Feasible float solutions are first
/// rationalized (continued fractions, denominator cap 10^6 after power-of-two
/// normalization); if some row fails, the final basis is re-solved exactly.
/// Infeasible solutions are audited through their Farkas multipliers.
/// Throws AuditFailed listing violated rows.
AuditReport recheck(const Problem& p, const Solution& sol);

/// Same checks without throwing.
AuditReport try_recheck(const Problem& p, const Solution& sol);

/// True when y is an exact Farkas certificate of infeasibility for p.
bool validate_farkas(const Problem& p, const RationalVector& y);

struct AuditedOptions {
  Options simplex;
  bool exact = false;                 // solve in exact mode from the start
  std::size_t exact_fallback_limit = 400000;  // rows*cols budget for exact retries
  std::vector<double> margins = {1e-6, 1e-4};  // tightening ladder for repairs
};

struct AuditedResult {
  Status status = Status::IterationLimit;
  bool audited = false;               // status backed by an exact audit
  Solution solution;
  AuditReport audit;
  std::vector<std::string> log;
};

/// Float solve, exact recheck, margin-tightened re-solves and an exact-mode
/// fallback, in that order. Never throws AuditFailed: an unaudited result has
/// audited == false.
AuditedResult solve_audited(const Problem& p, const AuditedOptions& options = {});

/// JSON {status, assignment, residuals}.
std::string solution_json(const Problem& p, const Solution& sol);

namespace detail {

/// Problem rewritten as A x = b, x >= 0, b >= 0, with one initial basic
/// column (slack or artificial) per row.
struct StandardForm {
  std::size_t m = 0;
  std::size_t n = 0;                   // standard columns, artificials included
  std::vector<std::vector<std::pair<int, Rational>>> cols;  // column-major
  RationalVector b;
  RationalVector cost;                 // phase-2 cost
  std::vector<int> initial_basis;      // per row
  std::vector<bool> artificial;
  std::vector<int> source_column;      // original column or -1
  std::vector<int> source_sign;        // +1 / -1 for split free columns
  std::vector<int> row_sign;           // +1 or -1 (row negated to make b >= 0)
};

StandardForm standardize(const Problem& p);
/// Maps standard-form values back to original columns.
RationalVector to_original(const StandardForm& sf, const RationalVector& x);
std::vector<double> to_original(const StandardForm& sf, const std::vector<double>& x);

/// Exact solution of B x_B = b for the given basis; nullopt when singular.
std::optional<RationalVector> exact_basic_solution(const StandardForm& sf, const std::vector<int>& basis);

/// Fills max_equality_residual / max_inequality_violation from `values`.
void fill_residuals(const Problem& p, Solution& sol);

Solution solve_float(const Problem& p, const StandardForm& sf, const Options& options);
Solution solve_exact(const Problem& p, const StandardForm& sf, const Options& options);

}  // namespace detail

}  // namespace teachcert::lp
