#include <cmath>
#include <map>
#include <set>

#include "teachcert/errors.hpp"
#include "teachcert/lp.hpp"

namespace teachcert::lp {

namespace {

using SparseRow = std::map<int, Rational>;

/// Sparse exact Gaussian elimination on a square system. Pivots are chosen
/// from the shortest remaining row, breaking ties toward the sparsest column.
std::optional<RationalVector> sparse_solve(std::size_t size, std::vector<SparseRow> rows,
                                           RationalVector rhs) {
  std::vector<std::set<int>> col_rows(size);
  for (std::size_t i = 0; i < size; ++i)
    for (const auto& [k, v] : rows[i]) col_rows[k].insert(static_cast<int>(i));
  std::vector<bool> active(size, true);
  std::vector<std::pair<int, int>> order;  // (row, column)
  order.reserve(size);

  for (std::size_t step = 0; step < size; ++step) {
    int r = -1;
    for (std::size_t i = 0; i < size; ++i)
      if (active[i] && (r < 0 || rows[i].size() < rows[r].size())) r = static_cast<int>(i);
    if (rows[r].empty()) return std::nullopt;
    int k = -1;
    for (const auto& [c, v] : rows[r])
      if (k < 0 || col_rows[c].size() < col_rows[k].size()) k = c;
    active[r] = false;
    order.emplace_back(r, k);
    const Rational piv = rows[r].at(k);
    const std::vector<int> targets(col_rows[k].begin(), col_rows[k].end());
    for (int i : targets) {
      if (!active[i]) continue;
      const Rational f = rows[i].at(k) / piv;
      for (const auto& [c, v] : rows[r]) {
        auto [it, inserted] = rows[i].try_emplace(c, 0);
        it->second -= f * v;
        if (it->second == 0) {
          rows[i].erase(it);
          col_rows[c].erase(i);
        } else if (inserted) {
          col_rows[c].insert(i);
        }
      }
      rhs[i] -= f * rhs[r];
    }
  }

  RationalVector x(size, Rational(0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto [r, k] = *it;
    Rational acc = rhs[r];
    for (const auto& [c, v] : rows[r])
      if (c != k) acc -= v * x[c];
    x[k] = acc / rows[r].at(k);
  }
  return x;
}

/// Continued-fraction rounding on a power-of-two normalized mantissa, so small
/// magnitudes keep their relative precision.
Rational round_value(double v) {
  if (v == 0.0 || std::abs(v) < 1e-300) return 0;
  if (std::abs(v) >= 1.0) return rationalize(v);
  int exp = 0;
  const double mantissa = std::frexp(v, &exp);  // v = mantissa * 2^exp, exp <= 0
  Rational scale = 1;
  mpz_class den = 1;
  den <<= static_cast<unsigned>(-exp);
  scale = Rational(1, 1) / Rational(den);
  return rationalize(mantissa) * scale;
}

std::vector<std::size_t> violations(const Problem& p, const RationalVector& x) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    const auto& r = p.rows()[i];
    Rational act = 0;
    for (const auto& [c, v] : r.coeffs) act += v * x[c];
    const bool ok = r.sense == RowSense::Eq ? act == r.rhs
                    : r.sense == RowSense::Le ? act <= r.rhs
                                              : act >= r.rhs;
    if (!ok) out.push_back(i);
  }
  for (std::size_t j = 0; j < p.num_columns(); ++j)
    if (p.columns()[j].nonneg && x[j] < 0) out.push_back(p.num_rows() + j);
  return out;
}

/// Phase-1 duals recomputed exactly from the final basis: B^T y = c_B.
std::optional<RationalVector> exact_farkas_from_basis(const detail::StandardForm& sf,
                                                      const std::vector<int>& basis) {
  if (basis.size() != sf.m) return std::nullopt;
  std::vector<SparseRow> rows(sf.m);
  RationalVector rhs(sf.m, Rational(0));
  for (std::size_t k = 0; k < sf.m; ++k) {
    for (const auto& [i, v] : sf.cols[basis[k]]) rows[k][i] = v;
    if (sf.artificial[basis[k]]) rhs[k] = 1;
  }
  auto y = sparse_solve(sf.m, std::move(rows), std::move(rhs));
  if (!y) return std::nullopt;
  for (std::size_t i = 0; i < sf.m; ++i) (*y)[i] *= sf.row_sign[i];
  return y;
}

}  // namespace

namespace detail {

std::optional<RationalVector> exact_basic_solution(const StandardForm& sf, const std::vector<int>& basis) {
  if (basis.size() != sf.m) return std::nullopt;
  std::vector<SparseRow> rows(sf.m);
  for (std::size_t k = 0; k < sf.m; ++k)
    for (const auto& [i, v] : sf.cols[basis[k]]) rows[i][static_cast<int>(k)] = v;
  auto xb = sparse_solve(sf.m, std::move(rows), sf.b);
  if (!xb) return std::nullopt;
  RationalVector x(sf.n, Rational(0));
  for (std::size_t k = 0; k < sf.m; ++k) x[basis[k]] = (*xb)[k];
  return x;
}

}  // namespace detail

bool validate_farkas(const Problem& p, const RationalVector& y) {
  if (y.size() != p.num_rows()) return false;
  std::vector<Rational> col_sum(p.num_columns(), Rational(0));
  Rational yb = 0;
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    const auto& r = p.rows()[i];
    if (r.sense == RowSense::Ge && y[i] < 0) return false;
    if (r.sense == RowSense::Le && y[i] > 0) return false;
    if (y[i] == 0) continue;
    for (const auto& [c, v] : r.coeffs) col_sum[c] += y[i] * v;
    yb += y[i] * r.rhs;
  }
  for (std::size_t j = 0; j < p.num_columns(); ++j) {
    if (p.columns()[j].nonneg ? col_sum[j] > 0 : col_sum[j] != 0) return false;
  }
  return yb > 0;
}

AuditReport try_recheck(const Problem& p, const Solution& sol) {
  AuditReport rep;
  if (sol.status == Status::IterationLimit) {
    rep.method = "none";
    return rep;
  }
  if (sol.status == Status::Infeasible) {
    rep.method = "farkas";
    if (!sol.exact_farkas.empty() && validate_farkas(p, sol.exact_farkas)) {
      rep.passed = true;
      rep.assignment = sol.exact_farkas;
      return rep;
    }
    RationalVector rounded;
    for (double v : sol.farkas) rounded.push_back(round_value(v));
    if (validate_farkas(p, rounded)) {
      rep.passed = true;
      rep.assignment = std::move(rounded);
      return rep;
    }
    const auto sf = detail::standardize(p);
    if (auto y = exact_farkas_from_basis(sf, sol.basis); y && validate_farkas(p, *y)) {
      rep.passed = true;
      rep.assignment = std::move(*y);
    }
    return rep;
  }

  if (!sol.exact_values.empty()) {
    rep.method = "exact";
    rep.violated_rows = violations(p, sol.exact_values);
    rep.passed = rep.violated_rows.empty();
    rep.assignment = sol.exact_values;
    if (rep.passed) return rep;
  }

  RationalVector rounded;
  rounded.reserve(sol.values.size());
  for (double v : sol.values) rounded.push_back(round_value(v));
  rounded.resize(p.num_columns(), Rational(0));
  auto bad = violations(p, rounded);
  if (bad.empty()) {
    rep.passed = true;
    rep.method = "rationalized";
    rep.violated_rows.clear();
    rep.assignment = std::move(rounded);
    return rep;
  }

  const auto sf = detail::standardize(p);
  if (auto xs = detail::exact_basic_solution(sf, sol.basis)) {
    auto x = detail::to_original(sf, *xs);
    x.resize(p.num_columns(), Rational(0));
    auto bad_basis = violations(p, x);
    if (bad_basis.empty()) {
      rep.passed = true;
      rep.method = "basis-resolve";
      rep.violated_rows.clear();
      rep.assignment = std::move(x);
      return rep;
    }
  }
  rep.passed = false;
  rep.method = "rationalized";
  rep.violated_rows = std::move(bad);
  rep.assignment = std::move(rounded);
  return rep;
}

AuditReport recheck(const Problem& p, const Solution& sol) {
  auto rep = try_recheck(p, sol);
  if (!rep.passed) {
    std::string rows;
    for (std::size_t k = 0; k < rep.violated_rows.size() && k < 10; ++k) {
      const std::size_t i = rep.violated_rows[k];
      rows += (k ? ", " : "") + (i < p.num_rows() ? p.rows()[i].name
                                                  : p.columns()[i - p.num_rows()].name + ">=0");
    }
    if (rep.violated_rows.size() > 10) rows += ", ...";
    throw AuditFailed("exact recheck failed (" + to_string(sol.status) + ")" +
                      (rows.empty() ? std::string() : ": " + rows));
  }
  return rep;
}

AuditedResult solve_audited(const Problem& p, const AuditedOptions& options) {
  AuditedResult out;
  const std::size_t size = p.num_rows() * std::max<std::size_t>(1, p.num_columns());
  auto exact_attempt = [&](const std::string& why) {
    out.log.push_back(why + "; solving exactly");
    out.solution = solve(p, Mode::Exact, options.simplex);
    out.status = out.solution.status;
    out.audit = try_recheck(p, out.solution);
    out.audited = out.audit.passed;
  };

  if (options.exact) {
    exact_attempt("exact mode requested");
    return out;
  }

  try {
    out.solution = solve(p, Mode::Float, options.simplex);
  } catch (const NumericalBreakdown& e) {
    out.log.push_back(std::string("float solve broke down: ") + e.what());
    if (size <= options.exact_fallback_limit) exact_attempt("float solve unusable");
    return out;
  } catch (const IterationLimit& e) {
    out.log.push_back(std::string("float solve: ") + e.what());
    if (size <= options.exact_fallback_limit) exact_attempt("float solve unusable");
    return out;
  }
  out.status = out.solution.status;
  out.log.push_back("float solve: " + to_string(out.status) + " after " +
                    std::to_string(out.solution.iterations) + " iterations");
  out.audit = try_recheck(p, out.solution);
  if (out.audit.passed) {
    out.audited = true;
    out.log.push_back("exact recheck passed (" + out.audit.method + ")");
    return out;
  }
  out.log.push_back("exact recheck failed (" + out.audit.method + ")");

  if (out.status == Status::Feasible) {
    for (double delta : options.margins) {
      Solution tight;
      try {
        tight = solve(p.tightened(exact_from_double(delta)), Mode::Float, options.simplex);
      } catch (const Error& e) {
        out.log.push_back("tightened solve failed: " + std::string(e.what()));
        continue;
      }
      if (tight.status != Status::Feasible) {
        out.log.push_back("tightened by " + std::to_string(delta) + ": " + to_string(tight.status));
        continue;
      }
      auto rep = try_recheck(p, tight);
      out.log.push_back("tightened by " + std::to_string(delta) + ": recheck " +
                        (rep.passed ? "passed" : "failed"));
      if (rep.passed) {
        out.solution = std::move(tight);
        out.audit = std::move(rep);
        out.audited = true;
        return out;
      }
    }
  }

  if (size <= options.exact_fallback_limit) {
    exact_attempt("float result not auditable");
  } else {
    out.log.push_back("problem too large for an exact fallback");
  }
  return out;
}

}  // namespace teachcert::lp
