#include "teachcert/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "teachcert/errors.hpp"

namespace teachcert {

Monomial Monomial::variable(std::size_t nvars, std::size_t var, unsigned power) {
  if (var >= nvars) throw DimensionMismatch("variable index outside ring");
  Monomial m(nvars);
  m.exps_[var] = static_cast<std::uint8_t>(power);
  return m;
}

unsigned Monomial::degree() const {
  return std::accumulate(exps_.begin(), exps_.end(), 0u);
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (nvars() != other.nvars()) throw RingMismatch("monomials live in different rings");
  Monomial m(*this);
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    const unsigned e = m.exps_[i] + other.exps_[i];
    if (e > 255) throw DimensionMismatch("exponent overflow");
    m.exps_[i] = static_cast<std::uint8_t>(e);
  }
  return m;
}

bool operator<(const Monomial& a, const Monomial& b) {
  const unsigned da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.exps_ > b.exps_;
}

namespace {

void enumerate_degree(std::size_t active, unsigned degree, std::size_t pos, Monomial& cur,
                      std::vector<std::uint8_t>& exps, std::vector<Monomial>& out) {
  if (pos + 1 == active) {
    exps[pos] = static_cast<std::uint8_t>(degree);
    out.emplace_back(exps);
    exps[pos] = 0;
    return;
  }
  for (int e = static_cast<int>(degree); e >= 0; --e) {
    exps[pos] = static_cast<std::uint8_t>(e);
    enumerate_degree(active, degree - static_cast<unsigned>(e), pos + 1, cur, exps, out);
  }
  exps[pos] = 0;
}

}  // namespace

std::vector<Monomial> monomials_of_degree(std::size_t nvars, std::size_t active, unsigned degree) {
  if (active > nvars) throw DimensionMismatch("active variables exceed ring size");
  std::vector<Monomial> out;
  if (active == 0) {
    if (degree == 0) out.emplace_back(nvars);
    return out;
  }
  std::vector<std::uint8_t> exps(nvars, 0);
  Monomial scratch;
  enumerate_degree(active, degree, 0, scratch, exps, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Monomial> monomials_up_to(std::size_t nvars, std::size_t active, unsigned degree) {
  std::vector<Monomial> out;
  for (unsigned k = 0; k <= degree; ++k) {
    auto part = monomials_of_degree(nvars, active, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// ---------------------------------------------------------------- Poly

Poly Poly::constant(std::size_t nvars, const Rational& c) {
  Poly p(nvars);
  p.add_term(Monomial(nvars), c);
  return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t var) {
  Poly p(nvars);
  p.add_term(Monomial::variable(nvars, var), 1);
  return p;
}

Poly Poly::monomial(const Monomial& m, const Rational& c) {
  Poly p(m.nvars());
  p.add_term(m, c);
  return p;
}

Poly Poly::linear(std::size_t nvars, const LinearForm& coeffs) {
  Poly p(std::max(nvars, coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) p.add_term(Monomial::variable(p.nvars_, i), coeffs[i]);
  return p;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.degree()));
  return d;
}

Rational Poly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (m.nvars() != nvars_) throw RingMismatch("monomial ring differs from polynomial ring");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ != o.nvars_) throw RingMismatch("adding polynomials over different rings");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ != o.nvars_) throw RingMismatch("subtracting polynomials over different rings");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.nvars_ != b.nvars_) throw RingMismatch("multiplying polynomials over different rings");
  Poly out(a.nvars_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Poly Poly::pow(unsigned k) const {
  Poly out = constant(nvars_, 1);
  for (unsigned i = 0; i < k; ++i) out = out * *this;
  return out;
}

Poly Poly::substitute_var(std::size_t var, const Poly& value) const {
  if (value.nvars_ != nvars_) throw RingMismatch("substituted value lives in another ring");
  if (var >= nvars_) throw DimensionMismatch("substituted variable outside ring");
  std::vector<Poly> powers{constant(nvars_, 1)};
  Poly out(nvars_);
  for (const auto& [m, c] : terms_) {
    const unsigned e = m[var];
    while (powers.size() <= e) powers.push_back(powers.back() * value);
    auto exps = m.exponents();
    exps[var] = 0;
    out += monomial(Monomial(std::move(exps)), c) * powers[e];
  }
  return out;
}

Poly Poly::restrict_ring(std::size_t nvars) const {
  Poly out(nvars);
  for (const auto& [m, c] : terms_) {
    for (std::size_t i = nvars; i < m.nvars(); ++i)
      if (m[i] != 0) throw RingMismatch("cannot drop a variable that still occurs");
    std::vector<std::uint8_t> exps(m.exponents().begin(), m.exponents().begin() + static_cast<long>(nvars));
    out.add_term(Monomial(std::move(exps)), c);
  }
  return out;
}

Poly Poly::extend_ring(std::size_t nvars) const {
  if (nvars < nvars_) throw RingMismatch("extend_ring cannot shrink a ring");
  Poly out(nvars);
  for (const auto& [m, c] : terms_) {
    auto exps = m.exponents();
    exps.resize(nvars, 0);
    out.add_term(Monomial(std::move(exps)), c);
  }
  return out;
}

Rational Poly::eval(const RationalVector& point) const {
  if (point.size() != nvars_) throw DimensionMismatch("evaluation point has the wrong dimension");
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (unsigned k = 0; k < m[i]; ++k) v *= point[i];
    total += v;
  }
  return total;
}

double Poly::eval(const std::vector<double>& point) const {
  if (point.size() != nvars_) throw DimensionMismatch("evaluation point has the wrong dimension");
  double total = 0;
  for (const auto& [m, c] : terms_) {
    double v = c.get_d();
    for (std::size_t i = 0; i < nvars_; ++i)
      for (unsigned k = 0; k < m[i]; ++k) v *= point[i];
    total += v;
  }
  return total;
}

std::string Poly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const Rational a = abs(c);
    const bool unit = m.degree() > 0 && a == 1;
    if (!unit) os << teachcert::to_string(a);
    bool first_factor = unit;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      if (!first_factor) os << "*";
      first_factor = false;
      os << (i < names.size() ? names[i] : "x" + std::to_string(i + 1));
      if (m[i] > 1) os << "^" << static_cast<int>(m[i]);
    }
  }
  return os.str();
}

Poly homogenize(const Poly& p, unsigned D, const Poly& unit) {
  if (p.degree() > static_cast<int>(D)) throw DimensionMismatch("cannot homogenize below the degree");
  std::vector<Poly> powers{Poly::constant(p.nvars(), 1)};
  Poly out(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    const unsigned pad = D - m.degree();
    while (powers.size() <= pad) powers.push_back(powers.back() * unit);
    out += Poly::monomial(m, c) * powers[pad];
  }
  return out;
}

namespace {

/// Caches S_rows[h]^k and R^k for one update.
class ClearedImages {
 public:
  ClearedImages(const RationalUpdate& forms, unsigned d) : d_(d) {
    n_ = forms.R.size();
    for (const auto& s : forms.S_rows) S_.push_back({Poly::constant(n_, 1), Poly::linear(n_, s)});
    R_ = {Poly::constant(n_, 1), Poly::linear(n_, forms.R)};
  }

  Poly image(const Monomial& m) {
    if (m.nvars() != n_) throw RingMismatch("certificate ring differs from belief dimension");
    const unsigned k = m.degree();
    if (k > d_) throw InvariantViolation("certificate degree exceeds the clearing degree");
    auto cached = cache_.find(m);
    if (cached != cache_.end()) return cached->second;
    Poly out = power(R_, d_ - k);
    for (std::size_t h = 0; h < n_; ++h)
      if (m[h] > 0) out = out * power(S_[h], m[h]);
    cache_.emplace(m, out);
    return out;
  }

 private:
  static const Poly& power(std::vector<Poly>& table, unsigned k) {
    while (table.size() <= k) table.push_back(table.back() * table[1]);
    return table[k];
  }

  unsigned d_;
  std::size_t n_ = 0;
  std::vector<std::vector<Poly>> S_;
  std::vector<Poly> R_;
  std::map<Monomial, Poly> cache_;
};

}  // namespace

Poly compose_cleared(const Poly& B, const RationalUpdate& forms, unsigned d) {
  ClearedImages images(forms, d);
  Poly out(B.nvars());
  for (const auto& [m, c] : B.terms()) out += images.image(m) * c;
  return out;
}

// ---------------------------------------------------------------- AffineExpr

AffineExpr AffineExpr::var(VarId v, const Rational& coeff) {
  AffineExpr e;
  e.add_var(v, coeff);
  return e;
}

void AffineExpr::add_var(VarId v, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(v, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  constant_ += o.constant_;
  for (const auto& [v, c] : o.terms_) add_var(v, c);
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  constant_ -= o.constant_;
  for (const auto& [v, c] : o.terms_) add_var(v, -c);
  return *this;
}

AffineExpr& AffineExpr::operator*=(const Rational& c) {
  if (c == 0) {
    constant_ = 0;
    terms_.clear();
    return *this;
  }
  constant_ *= c;
  for (auto& [v, a] : terms_) a *= c;
  return *this;
}

Rational AffineExpr::eval(const std::function<Rational(VarId)>& value) const {
  Rational out = constant_;
  for (const auto& [v, c] : terms_) out += c * value(v);
  return out;
}

// ---------------------------------------------------------------- PolyTemplate

PolyTemplate::PolyTemplate(const Poly& p) : nvars_(p.nvars()) {
  for (const auto& [m, c] : p.terms()) terms_.emplace(m, AffineExpr(c));
}

int PolyTemplate::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.degree()));
  return d;
}

AffineExpr PolyTemplate::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? AffineExpr() : it->second;
}

void PolyTemplate::add_term(const Monomial& m, const AffineExpr& c) {
  if (m.nvars() != nvars_) throw RingMismatch("monomial ring differs from template ring");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

PolyTemplate& PolyTemplate::operator+=(const PolyTemplate& o) {
  if (nvars_ != o.nvars_) throw RingMismatch("adding templates over different rings");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

PolyTemplate& PolyTemplate::operator-=(const PolyTemplate& o) {
  if (nvars_ != o.nvars_) throw RingMismatch("subtracting templates over different rings");
  for (const auto& [m, c] : o.terms_) add_term(m, c * Rational(-1));
  return *this;
}

PolyTemplate& PolyTemplate::operator*=(const Rational& c) {
  for (auto& [m, a] : terms_) a *= c;
  prune();
  return *this;
}

PolyTemplate operator*(const PolyTemplate& a, const Poly& p) {
  if (a.nvars_ != p.nvars()) throw RingMismatch("multiplying template by polynomial over another ring");
  PolyTemplate out(a.nvars_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mp, cp] : p.terms()) out.add_term(ma * mp, ca * cp);
  return out;
}

void PolyTemplate::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.is_zero()) it = terms_.erase(it);
    else ++it;
  }
}

Poly PolyTemplate::instantiate(const std::function<Rational(VarId)>& value) const {
  Poly out(nvars_);
  for (const auto& [m, c] : terms_) out.add_term(m, c.eval(value));
  return out;
}

PolyTemplate PolyTemplate::map_monomials(std::size_t nvars,
                                         const std::function<Poly(const Monomial&)>& image) const {
  PolyTemplate out(nvars);
  for (const auto& [m, c] : terms_) {
    const Poly img = image(m);
    if (img.nvars() != nvars) throw RingMismatch("monomial image lives in another ring");
    for (const auto& [mi, ci] : img.terms()) out.add_term(mi, c * ci);
  }
  return out;
}

PolyTemplate PolyTemplate::substitute_var(std::size_t var, const Poly& value) const {
  std::vector<Poly> powers{Poly::constant(nvars_, 1)};
  return map_monomials(nvars_, [&](const Monomial& m) {
    const unsigned e = m[var];
    while (powers.size() <= e) powers.push_back(powers.back() * value);
    auto exps = m.exponents();
    exps[var] = 0;
    return Poly::monomial(Monomial(std::move(exps))) * powers[e];
  });
}

PolyTemplate PolyTemplate::restrict_ring(std::size_t nvars) const {
  return map_monomials(nvars, [&](const Monomial& m) {
    return Poly::monomial(m).restrict_ring(nvars);
  });
}

std::vector<VarId> PolyTemplate::variables() const {
  std::set<VarId> vars;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, a] : c.terms()) vars.insert(v);
  return {vars.begin(), vars.end()};
}

PolyTemplate homogenize(const PolyTemplate& p, unsigned D, const Poly& unit) {
  if (p.degree() > static_cast<int>(D)) throw DimensionMismatch("cannot homogenize below the degree");
  std::vector<Poly> powers{Poly::constant(p.nvars(), 1)};
  return p.map_monomials(p.nvars(), [&](const Monomial& m) {
    const unsigned pad = D - m.degree();
    while (powers.size() <= pad) powers.push_back(powers.back() * unit);
    return Poly::monomial(m) * powers[pad];
  });
}

PolyTemplate compose_cleared(const PolyTemplate& B, const RationalUpdate& forms, unsigned d) {
  ClearedImages images(forms, d);
  return B.map_monomials(B.nvars(), [&](const Monomial& m) { return images.image(m); });
}

// ---------------------------------------------------------------- serialization

std::string serialize(const Poly& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> exps(m.exponents().begin(), m.exponents().end());
    out.push_back({{"exponents", exps}, {"coefficient", to_string(c)}});
  }
  return out.dump();
}

Poly deserialize_poly(const std::string& text, std::size_t nvars) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("polynomial is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("polynomial must be a JSON list of terms");
  Poly p(nvars);
  for (const auto& term : doc) {
    if (!term.is_object() || !term.contains("exponents") || !term.contains("coefficient"))
      throw SchemaError("polynomial term needs exponents and coefficient");
    auto exps = term.at("exponents").get<std::vector<int>>();
    if (exps.size() != nvars) throw DimensionMismatch("polynomial term has the wrong number of exponents");
    std::vector<std::uint8_t> e8;
    for (int e : exps) {
      if (e < 0 || e > 255) throw SchemaError("exponent out of range");
      e8.push_back(static_cast<std::uint8_t>(e));
    }
    p.add_term(Monomial(std::move(e8)), parse_rational(term.at("coefficient").get<std::string>()));
  }
  return p;
}

}  // namespace teachcert
