#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "teachcert/belief.hpp"
#include "teachcert/rational.hpp"

namespace teachcert {

/// Exponent vector over a fixed variable ring.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<std::uint8_t> exps) : exps_(std::move(exps)) {}
  static Monomial variable(std::size_t nvars, std::size_t var, unsigned power = 1);

  std::size_t nvars() const { return exps_.size(); }
  unsigned degree() const;
  std::uint8_t operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<std::uint8_t>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;

  /// Graded order: lower total degree first, ties broken by descending
  /// lexicographic exponents (b1^2 < b1 b2 < b2^2).
  friend bool operator<(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) = default;

 private:
  std::vector<std::uint8_t> exps_;
};

/// All monomials of total degree exactly `degree` in the first `active` variables
/// of an `nvars`-variable ring, in canonical order.
std::vector<Monomial> monomials_of_degree(std::size_t nvars, std::size_t active, unsigned degree);
/// All monomials of total degree <= `degree`, in canonical order.
std::vector<Monomial> monomials_up_to(std::size_t nvars, std::size_t active, unsigned degree);

/// Sparse multivariate polynomial with exact rational coefficients.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational>;

  Poly() = default;
  explicit Poly(std::size_t nvars) : nvars_(nvars) {}
  static Poly constant(std::size_t nvars, const Rational& c);
  static Poly variable(std::size_t nvars, std::size_t var);
  static Poly monomial(const Monomial& m, const Rational& c = 1);
  /// sum_i coeffs[i] * x_i, in a ring of max(nvars, coeffs.size()) variables.
  static Poly linear(std::size_t nvars, const LinearForm& coeffs);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  Rational coefficient(const Monomial& m) const;

  void add_term(const Monomial& m, const Rational& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const { return *this * Rational(-1); }
  friend bool operator==(const Poly& a, const Poly& b) = default;

  Poly pow(unsigned k) const;
  /// Replaces variable `var` with `value` (a polynomial over the same ring).
  Poly substitute_var(std::size_t var, const Poly& value) const;
  /// Drops trailing variables, which must not occur.
  Poly restrict_ring(std::size_t nvars) const;
  /// Embeds into a larger ring (new trailing variables).
  Poly extend_ring(std::size_t nvars) const;

  Rational eval(const RationalVector& point) const;
  double eval(const std::vector<double>& point) const;

  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  std::size_t nvars_ = 0;
  Terms terms_;
};

/// Every term of degree k < D multiplied by unit^(D - k); unit is usually the
/// simplex sum b_1 + ... + b_n, so the result agrees with p on the simplex.
Poly homogenize(const Poly& p, unsigned D, const Poly& unit);

/// R(b)^d * B(S(b) / R(b)): each belief variable b(h') is replaced by S_rows[h']
/// and every monomial of degree k is padded with R^(d - k). Requires deg B <= d.
Poly compose_cleared(const Poly& B, const RationalUpdate& forms, unsigned d);

/// Decision-variable identifier inside one program's registry.
using VarId = int;

/// c + sum_k a_k * x_k over LP decision variables.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(const Rational& c) : constant_(c) {}  // NOLINT(google-explicit-constructor)
  static AffineExpr var(VarId v, const Rational& coeff = 1);

  const Rational& constant() const { return constant_; }
  const std::map<VarId, Rational>& terms() const { return terms_; }
  bool is_zero() const { return constant_ == 0 && terms_.empty(); }
  bool is_constant() const { return terms_.empty(); }

  void add_var(VarId v, const Rational& c);
  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(const Rational& c);
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, const Rational& c) { return a *= c; }
  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;

  Rational eval(const std::function<Rational(VarId)>& value) const;

 private:
  Rational constant_ = 0;
  std::map<VarId, Rational> terms_;
};

/// Polynomial whose coefficients are affine in decision variables.
class PolyTemplate {
 public:
  using Terms = std::map<Monomial, AffineExpr>;

  PolyTemplate() = default;
  explicit PolyTemplate(std::size_t nvars) : nvars_(nvars) {}
  explicit PolyTemplate(const Poly& p);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  AffineExpr coefficient(const Monomial& m) const;

  void add_term(const Monomial& m, const AffineExpr& c);
  PolyTemplate& operator+=(const PolyTemplate& o);
  PolyTemplate& operator-=(const PolyTemplate& o);
  PolyTemplate& operator*=(const Rational& c);
  friend PolyTemplate operator+(PolyTemplate a, const PolyTemplate& b) { return a += b; }
  friend PolyTemplate operator-(PolyTemplate a, const PolyTemplate& b) { return a -= b; }
  friend PolyTemplate operator*(const PolyTemplate& a, const Poly& p);

  /// Concrete polynomial at the given assignment.
  Poly instantiate(const std::function<Rational(VarId)>& value) const;
  /// Linear map applied monomial-by-monomial: sum_m coeff_m * image(m).
  PolyTemplate map_monomials(std::size_t nvars, const std::function<Poly(const Monomial&)>& image) const;
  PolyTemplate substitute_var(std::size_t var, const Poly& value) const;
  PolyTemplate restrict_ring(std::size_t nvars) const;

  /// Every decision variable referenced by a coefficient.
  std::vector<VarId> variables() const;

 private:
  void prune();
  std::size_t nvars_ = 0;
  Terms terms_;
};

PolyTemplate homogenize(const PolyTemplate& p, unsigned D, const Poly& unit);
PolyTemplate compose_cleared(const PolyTemplate& B, const RationalUpdate& forms, unsigned d);

/// JSON list of {exponents, coefficient} in canonical order.
std::string serialize(const Poly& p);
Poly deserialize_poly(const std::string& json, std::size_t nvars);

}  // namespace teachcert
