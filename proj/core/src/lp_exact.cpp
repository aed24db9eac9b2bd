#include "teachcert/errors.hpp"
#include "teachcert/lp.hpp"

namespace teachcert::lp::detail {

namespace {

class Tableau {
 public:
  Tableau(const StandardForm& sf, const Options& opt) : sf_(sf), opt_(opt), m_(sf.m), n_(sf.n) {
    rows_.assign(m_, RationalVector(n_, Rational(0)));
    for (std::size_t j = 0; j < n_; ++j)
      for (const auto& [i, v] : sf.cols[j]) rows_[i][j] = v;
    rhs_ = sf.b;
    basis_ = sf.initial_basis;
    in_basis_.assign(n_, false);
    for (int j : basis_) in_basis_[j] = true;
  }

  enum class Outcome { Optimal, Unbounded, Limit };

  Outcome run(const RationalVector& cost, bool artificials_may_enter) {
    reduced_ = cost;
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < n_; ++j)
        if (rows_[i][j] != 0) reduced_[j] -= cb * rows_[i][j];
    }
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations_ >= opt_.iteration_limit) return Outcome::Limit;
      const bool bland = degenerate_run > opt_.stall_threshold;
      int q = -1;
      for (std::size_t j = 0; j < n_; ++j) {
        if (in_basis_[j] || reduced_[j] >= 0) continue;
        if (!artificials_may_enter && sf_.artificial[j]) continue;
        if (q < 0 || (!bland && reduced_[j] < reduced_[q])) q = static_cast<int>(j);
        if (bland) break;
      }
      if (q < 0) return Outcome::Optimal;

      int r = -1;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (rows_[i][q] <= 0) continue;
        Rational ratio = rhs_[i] / rows_[i][q];
        if (r < 0 || ratio < best || (ratio == best && basis_[i] < basis_[r])) {
          r = static_cast<int>(i);
          best = ratio;
        }
      }
      if (r < 0) return Outcome::Unbounded;
      degenerate_run = best == 0 ? degenerate_run + 1 : 0;
      pivot(q, r);
      ++iterations_;
    }
  }

  Rational objective(const RationalVector& cost) const {
    Rational v = 0;
    for (std::size_t i = 0; i < m_; ++i) v += cost[basis_[i]] * rhs_[i];
    return v;
  }

  RationalVector primal() const {
    RationalVector x(n_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = rhs_[i];
    return x;
  }

  /// y with y^T A_j = c_j - d_j; read off the unit initial-basis columns.
  RationalVector duals(const RationalVector& cost) const {
    RationalVector y(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const int j = sf_.initial_basis[i];
      y[i] = cost[j] - reduced_[j];
    }
    return y;
  }

  const std::vector<int>& basis() const { return basis_; }
  std::size_t iterations() const { return iterations_; }

 private:
  void pivot(int q, int r) {
    const Rational piv = rows_[r][q];
    auto& prow = rows_[r];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < n_; ++j)
      if (prow[j] != 0) {
        prow[j] /= piv;
        nz.push_back(j);
      }
    rhs_[r] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (static_cast<int>(i) == r || rows_[i][q] == 0) continue;
      const Rational f = rows_[i][q];
      for (std::size_t j : nz) rows_[i][j] -= f * prow[j];
      rhs_[i] -= f * rhs_[r];
    }
    if (reduced_[q] != 0) {
      const Rational f = reduced_[q];
      for (std::size_t j : nz) reduced_[j] -= f * prow[j];
    }
    in_basis_[basis_[r]] = false;
    basis_[r] = q;
    in_basis_[q] = true;
  }

  const StandardForm& sf_;
  const Options& opt_;
  std::size_t m_;
  std::size_t n_;
  std::vector<RationalVector> rows_;
  RationalVector rhs_;
  RationalVector reduced_;
  std::vector<int> basis_;
  std::vector<bool> in_basis_;
  std::size_t iterations_ = 0;
};

}  // namespace

Solution solve_exact(const Problem& p, const StandardForm& sf, const Options& options) {
  Solution sol;
  sol.mode = Mode::Exact;
  Tableau tab(sf, options);

  RationalVector phase1(sf.n, Rational(0));
  bool any_artificial = false;
  for (std::size_t j = 0; j < sf.n; ++j)
    if (sf.artificial[j]) {
      phase1[j] = 1;
      any_artificial = true;
    }

  if (any_artificial) {
    if (tab.run(phase1, true) == Tableau::Outcome::Limit)
      throw IterationLimit("exact simplex iteration limit reached in phase 1");
    if (tab.objective(phase1) > 0) {
      sol.status = Status::Infeasible;
      sol.iterations = tab.iterations();
      const auto y = tab.duals(phase1);
      sol.exact_farkas.resize(sf.m);
      sol.farkas.resize(sf.m);
      for (std::size_t i = 0; i < sf.m; ++i) {
        sol.exact_farkas[i] = y[i] * sf.row_sign[i];
        sol.farkas[i] = sol.exact_farkas[i].get_d();
      }
      sol.basis = tab.basis();
      return sol;
    }
  }

  bool has_cost = false;
  for (const auto& c : sf.cost) has_cost = has_cost || c != 0;
  if (has_cost && tab.run(sf.cost, false) == Tableau::Outcome::Limit)
    throw IterationLimit("exact simplex iteration limit reached in phase 2");

  sol.status = Status::Feasible;
  sol.iterations = tab.iterations();
  sol.basis = tab.basis();
  sol.exact_values = to_original(sf, tab.primal());
  sol.exact_values.resize(p.num_columns(), Rational(0));
  for (const auto& v : sol.exact_values) sol.values.push_back(v.get_d());
  fill_residuals(p, sol);
  return sol;
}

}  // namespace teachcert::lp::detail
