#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <klu.h>

#include "teachcert/errors.hpp"
#include "teachcert/lp.hpp"

namespace teachcert::lp::detail {

namespace {

constexpr double kPivotTol = 1e-7;
constexpr double kHarrisTol = 1e-9;
constexpr double kPerturbation = 1e-7;
constexpr std::size_t kRefactorEvery = 64;
// Degenerate Bland pivots tolerated before the degenerate bounds are shifted.
constexpr std::size_t kBlandBudget = 500;

using SparseCol = std::vector<std::pair<int, double>>;
using Vec = Eigen::VectorXd;

/// Sparse LU of a square matrix (KLU: block triangular form, then AMD per
/// block), with solves against the matrix and its transpose.
class SparseFactor {
 public:
  SparseFactor() {
    klu_defaults(&common_);
    common_.tol = 0.1;  // stricter partial pivoting than the default 0.001
  }
  SparseFactor(const SparseFactor&) = delete;
  SparseFactor& operator=(const SparseFactor&) = delete;
  ~SparseFactor() { release(); }

  /// Column-compressed input; false when the matrix is singular.
  bool factorize(int n, std::vector<int> Ap, std::vector<int> Ai, std::vector<double> Ax) {
    release();
    Ap_ = std::move(Ap);
    Ai_ = std::move(Ai);
    Ax_ = std::move(Ax);
    symbolic_ = klu_analyze(n, Ap_.data(), Ai_.data(), &common_);
    if (!symbolic_) return false;
    numeric_ = klu_factor(Ap_.data(), Ai_.data(), Ax_.data(), symbolic_, &common_);
    return numeric_ && common_.status == KLU_OK;
  }

  Eigen::VectorXd solve(Eigen::VectorXd x) const {
    klu_solve(symbolic_, numeric_, static_cast<int>(x.size()), 1, x.data(), &common_);
    return x;
  }

  Eigen::VectorXd solve_transposed(Eigen::VectorXd x) const {
    klu_tsolve(symbolic_, numeric_, static_cast<int>(x.size()), 1, x.data(), &common_);
    return x;
  }

 private:
  void release() {
    if (numeric_) klu_free_numeric(&numeric_, &common_);
    if (symbolic_) klu_free_symbolic(&symbolic_, &common_);
  }

  mutable klu_common common_{};
  klu_symbolic* symbolic_ = nullptr;
  klu_numeric* numeric_ = nullptr;
  std::vector<int> Ap_, Ai_;
  std::vector<double> Ax_;
};

/// Basis update B_k = B_{k-1} E_k where E_k is the identity with column r
/// replaced by alpha.
struct Eta {
  int r = 0;
  double pivot = 1;
  SparseCol others;  // (i, alpha_i), i != r
};

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardForm& sf, const Options& opt) : sf_(sf), opt_(opt), m_(sf.m), n_(sf.n) {
    cols_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j)
      for (const auto& [i, v] : sf.cols[j]) cols_[j].emplace_back(i, v.get_d());
    equilibrate();
    original_b_.resize(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) original_b_(static_cast<Eigen::Index>(i)) = sf.b[i].get_d() * row_scale_[i];
    b_ = original_b_;
    basis_ = sf.initial_basis;
    position_.assign(n_, -1);
    for (std::size_t i = 0; i < m_; ++i) position_[basis_[i]] = static_cast<int>(i);
    refactor();
  }

  enum class Outcome { Optimal, Unbounded, Limit };

  /// `bounded`: the objective is bounded below (phase 1), so a column without
  /// a usable pivot is a numerical artifact and is skipped instead.
  Outcome run(const std::vector<double>& cost, bool artificials_may_enter, bool bounded) {
    set_cost(cost);
    rejected_.assign(n_, false);
    std::size_t degenerate_run = 0;
    bool fresh = false;
    while (true) {
      if (iterations_ >= opt_.iteration_limit) return Outcome::Limit;
      compute_duals();
      const bool bland = degenerate_run > opt_.stall_threshold;
      const int q = price(artificials_may_enter, bland);
      if (q < 0) {
        // Confirm optimality on a fresh factorization.
        if (fresh) return Outcome::Optimal;
        refactor();
        fresh = true;
        continue;
      }
      const Vec alpha = ftran_column(q);
      const int r = leaving_row(alpha, bland);
      if (r < 0 && !fresh) {
        refactor();
        fresh = true;
        continue;
      }
      if (r < 0) {
        if (!bounded) return Outcome::Unbounded;
        rejected_[q] = true;
        continue;
      }
      const double step = std::max(xb_(r), 0.0) / alpha(r);
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(q, r, alpha, step);
      if (degenerate_run > opt_.stall_threshold + kBlandBudget) {
        lift_degenerate();
        degenerate_run = 0;
      }
      std::fill(rejected_.begin(), rejected_.end(), false);
      fresh = false;
    }
  }

  /// Shifts every right-hand side up by a small random amount; degenerate
  /// vertices of the shifted problem are rare.
  void perturb(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    for (Eigen::Index i = 0; i < b_.size(); ++i)
      b_(i) = original_b_(i) + kPerturbation * (1.0 + std::abs(original_b_(i))) * u(rng);
    xb_ = ftran(b_);
    shifted_ = true;
  }

  /// Moves every basic variable at or below zero to a small positive value by
  /// shifting b along its basis column.
  void lift_degenerate() {
    std::uniform_real_distribution<double> u(1.0, 2.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double x = xb_(static_cast<Eigen::Index>(i));
      if (x > kPerturbation) continue;
      const double delta = kPerturbation * u(lift_rng_) - x;
      for (const auto& [row, v] : cols_[basis_[i]]) b_(row) += v * delta;
    }
    xb_ = ftran(b_);
    shifted_ = true;
  }

  bool shifted() const { return shifted_; }

  /// Restores the original right-hand side and repairs the small primal
  /// infeasibility with dual simplex pivots; the basis stays dual feasible.
  void unperturb(bool artificials_may_enter) {
    b_ = original_b_;
    shifted_ = false;
    refactor();
    // Tight on purpose: the exact audit re-solves this basis and needs x_B >= 0.
    const double tol = 1e-14 * (1.0 + b_.lpNorm<Eigen::Infinity>());
    while (iterations_ < opt_.iteration_limit) {
      Eigen::Index r = 0;
      if (xb_.minCoeff(&r) >= -tol) return;
      compute_duals();
      Vec e = Vec::Zero(static_cast<Eigen::Index>(m_));
      e(r) = 1.0;
      const Vec rho = btran(e);
      int q = -1;
      double best = std::numeric_limits<double>::infinity(), best_a = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (position_[j] >= 0 || (!artificials_may_enter && sf_.artificial[j])) continue;
        double a = 0, d = cost_[j];
        for (const auto& [i, v] : cols_[j]) {
          a += rho(i) * v;
          d -= y_(i) * v;
        }
        if (a >= -kPivotTol) continue;
        const double ratio = std::max(d, 0.0) / -a;
        if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && -a > best_a)) {
          best = ratio;
          best_a = -a;
          q = static_cast<int>(j);
        }
      }
      if (q < 0) return;  // left to the exact recheck
      const Vec alpha = ftran_column(q);
      pivot(q, static_cast<int>(r), alpha, xb_(r) / alpha(r));
    }
  }

  double objective(const std::vector<double>& cost) const {
    double v = 0;
    for (std::size_t i = 0; i < m_; ++i)
      v += cost[basis_[i]] * col_scale_[basis_[i]] * xb_(static_cast<Eigen::Index>(i));
    return v;
  }

  std::vector<double> primal() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      x[basis_[i]] = std::max(0.0, xb_(static_cast<Eigen::Index>(i))) * col_scale_[basis_[i]];
    return x;
  }

  /// Duals for `cost` at the current basis, in unscaled rows.
  Vec duals(const std::vector<double>& cost) {
    set_cost(cost);
    compute_duals();
    Vec y = y_;
    for (std::size_t i = 0; i < m_; ++i) y(static_cast<Eigen::Index>(i)) *= row_scale_[i];
    return y;
  }

  const std::vector<int>& basis() const { return basis_; }
  std::size_t iterations() const { return iterations_; }

 private:
  void set_cost(const std::vector<double>& cost) {
    cost_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = cost[j] * col_scale_[j];
  }

  /// Geometric-mean row and column scaling by powers of two, applied in place
  /// to cols_. Scaled entries are row_scale[i] * a_ij * col_scale[j].
  void equilibrate() {
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    const auto pow2 = [](double s) { return std::exp2(std::round(std::log2(s))); };
    for (int pass = 0; pass < 4; ++pass) {
      std::vector<double> lo(m_, std::numeric_limits<double>::infinity()), hi(m_, 0.0);
      for (const auto& col : cols_)
        for (const auto& [i, v] : col) {
          lo[i] = std::min(lo[i], std::abs(v));
          hi[i] = std::max(hi[i], std::abs(v));
        }
      for (std::size_t i = 0; i < m_; ++i)
        if (hi[i] > 0) row_scale_[i] *= pow2(1.0 / std::sqrt(lo[i] * hi[i]));
      for (std::size_t j = 0; j < n_; ++j) {
        double clo = std::numeric_limits<double>::infinity(), chi = 0;
        for (const auto& [i, v] : sf_.cols[j]) {
          const double a = std::abs(v.get_d()) * row_scale_[i];
          clo = std::min(clo, a);
          chi = std::max(chi, a);
        }
        col_scale_[j] = chi > 0 ? pow2(1.0 / std::sqrt(clo * chi)) : 1.0;
      }
      for (std::size_t j = 0; j < n_; ++j) {
        std::size_t k = 0;
        for (const auto& [i, v] : sf_.cols[j]) cols_[j][k++].second = v.get_d() * row_scale_[i] * col_scale_[j];
      }
    }
  }

  int price(bool artificials_may_enter, bool bland) const {
    int q = -1;
    double best = -opt_.optimality_tol;
    for (std::size_t j = 0; j < n_; ++j) {
      if (position_[j] >= 0 || rejected_[j]) continue;
      if (!artificials_may_enter && sf_.artificial[j]) continue;
      double d = cost_[j];
      for (const auto& [i, v] : cols_[j]) d -= y_(i) * v;
      if (d < -opt_.optimality_tol) {
        if (bland) return static_cast<int>(j);
        if (d < best) {
          best = d;
          q = static_cast<int>(j);
        }
      }
    }
    return q;
  }

  // Harris two-pass ratio test; Bland mode keeps the textbook minimum ratio
  // with lowest-index ties so that cycling stays impossible.
  int leaving_row(const Vec& alpha, bool bland) const {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = alpha(static_cast<Eigen::Index>(i));
      if (a <= kPivotTol) continue;
      const double x = std::max(xb_(static_cast<Eigen::Index>(i)), 0.0);
      bound = std::min(bound, (bland ? x : x + kHarrisTol) / a);
    }
    int r = -1;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = alpha(static_cast<Eigen::Index>(i));
      if (a <= kPivotTol) continue;
      const double ratio = std::max(xb_(static_cast<Eigen::Index>(i)), 0.0) / a;
      if (ratio > bound + (bland ? 1e-12 : 0.0)) continue;
      if (r < 0 || (bland ? basis_[i] < basis_[r] : a > alpha(r))) r = static_cast<int>(i);
    }
    return r;
  }

  void pivot(int q, int r, const Vec& alpha, double step) {
    xb_.noalias() -= step * alpha;
    xb_(r) = step;
    Eta eta;
    eta.r = r;
    eta.pivot = alpha(r);
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
      if (i != r && alpha(i) != 0.0) eta.others.emplace_back(static_cast<int>(i), alpha(i));
    etas_.push_back(std::move(eta));

    position_[basis_[r]] = -1;
    basis_[r] = q;
    position_[q] = r;
    ++iterations_;
    if (etas_.size() >= kRefactorEvery) refactor();
  }

  Vec ftran(const Vec& a) const {
    Vec x = lu_.solve(a);
    for (const auto& eta : etas_) {
      const double xr = x(eta.r) / eta.pivot;
      for (const auto& [i, v] : eta.others) x(i) -= v * xr;
      x(eta.r) = xr;
    }
    return x;
  }

  Vec ftran_column(int q) const {
    Vec a = Vec::Zero(static_cast<Eigen::Index>(m_));
    for (const auto& [i, v] : cols_[q]) a(i) = v;
    return ftran(a);
  }

  Vec btran(Vec c) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = c(it->r);
      for (const auto& [i, v] : it->others) s -= v * c(i);
      c(it->r) = s / it->pivot;
    }
    return lu_.solve_transposed(std::move(c));
  }

  void compute_duals() {
    Vec cb(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) cb(static_cast<Eigen::Index>(i)) = cost_[basis_[i]];
    y_ = btran(std::move(cb));
  }

  /// Fresh sparse LU of the basis matrix; recomputes x_B.
  void refactor() {
    std::vector<int> Ap{0}, Ai;
    std::vector<double> Ax;
    for (std::size_t k = 0; k < m_; ++k) {
      for (const auto& [row, v] : cols_[basis_[k]]) {
        Ai.push_back(row);
        Ax.push_back(v);
      }
      Ap.push_back(static_cast<int>(Ai.size()));
    }
    if (!lu_.factorize(static_cast<int>(m_), std::move(Ap), std::move(Ai), std::move(Ax)))
      throw NumericalBreakdown("basis matrix became singular");
    etas_.clear();
    xb_ = lu_.solve(b_);
    // One step of iterative refinement against the basis matrix.
    Vec residual = b_;
    for (std::size_t k = 0; k < m_; ++k)
      for (const auto& [row, v] : cols_[basis_[k]]) residual(row) -= v * xb_(static_cast<Eigen::Index>(k));
    xb_ += lu_.solve(residual);
    if (!xb_.allFinite()) throw NumericalBreakdown("non-finite basic solution");
  }

  const StandardForm& sf_;
  const Options& opt_;
  std::size_t m_;
  std::size_t n_;
  std::vector<SparseCol> cols_;
  Vec b_;
  Vec original_b_;
  std::vector<int> basis_;
  std::vector<int> position_;
  SparseFactor lu_;
  std::vector<Eta> etas_;
  Vec xb_;
  Vec y_;
  std::vector<double> cost_;
  std::vector<bool> rejected_;
  std::size_t iterations_ = 0;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  std::mt19937_64 lift_rng_{0x11f7};
  bool shifted_ = false;
};

}  // namespace

Solution solve_float(const Problem& p, const StandardForm& sf, const Options& options) {
  Solution sol;
  sol.mode = Mode::Float;
  RevisedSimplex simplex(sf, options);

  std::vector<double> phase1(sf.n, 0.0);
  bool any_artificial = false;
  for (std::size_t j = 0; j < sf.n; ++j)
    if (sf.artificial[j]) {
      phase1[j] = 1.0;
      any_artificial = true;
    }

  double bmax = 0;
  for (const auto& v : sf.b) bmax = std::max(bmax, std::abs(v.get_d()));

  if (any_artificial) {
    simplex.perturb(0x5eed);
    const auto outcome = simplex.run(phase1, true, true);
    if (outcome == RevisedSimplex::Outcome::Limit)
      throw IterationLimit("simplex iteration limit reached in phase 1");
    simplex.unperturb(true);
    sol.iterations = simplex.iterations();
    const double infeasibility = simplex.objective(phase1);
    if (infeasibility > options.feasibility_tol * (1.0 + bmax)) {
      sol.status = Status::Infeasible;
      const Vec y = simplex.duals(phase1);
      sol.farkas.resize(sf.m);
      for (std::size_t i = 0; i < sf.m; ++i) sol.farkas[i] = sf.row_sign[i] * y(static_cast<Eigen::Index>(i));
      sol.basis = simplex.basis();
      return sol;
    }
  }

  std::vector<double> phase2(sf.n);
  bool has_cost = false;
  for (std::size_t j = 0; j < sf.n; ++j) {
    phase2[j] = sf.cost[j].get_d();
    has_cost = has_cost || phase2[j] != 0.0;
  }
  if (has_cost) {
    const auto outcome = simplex.run(phase2, false, false);
    if (outcome == RevisedSimplex::Outcome::Limit)
      throw IterationLimit("simplex iteration limit reached in phase 2");
    if (simplex.shifted()) simplex.unperturb(false);
  }
  sol.iterations = simplex.iterations();
  sol.status = Status::Feasible;
  sol.basis = simplex.basis();
  sol.values = to_original(sf, simplex.primal());
  fill_residuals(p, sol);
  return sol;
}

}  // namespace teachcert::lp::detail
