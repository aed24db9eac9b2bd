#include "teachcert/belief.hpp"

#include <cmath>
#include <ostream>

#include "teachcert/errors.hpp"

namespace teachcert {

Belief Belief::exact(RationalVector weights) {
  Rational sum = 0;
  for (const auto& w : weights) {
    if (w < 0) throw InvariantViolation("belief has a negative entry");
    sum += w;
  }
  if (sum != 1) throw InvariantViolation("exact belief does not sum to 1");
  return Belief(std::move(weights));
}

Belief Belief::floating(std::vector<double> weights) {
  double sum = 0;
  for (double w : weights) {
    if (!(w >= -kFloatTolerance)) throw InvariantViolation("belief has a negative entry");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kFloatTolerance * std::max<double>(1.0, static_cast<double>(weights.size())))
    throw InvariantViolation("float belief does not sum to 1");
  return Belief(std::move(weights));
}

Belief Belief::point_mass(std::size_t size, std::size_t h, NumericMode mode) {
  if (h >= size) throw OutOfBounds("point mass index out of range");
  if (mode == NumericMode::Exact) {
    RationalVector w(size, Rational(0));
    w[h] = 1;
    return Belief(std::move(w));
  }
  std::vector<double> w(size, 0.0);
  w[h] = 1.0;
  return Belief(std::move(w));
}

std::size_t Belief::size() const {
  return std::visit([](const auto& w) { return w.size(); }, weights_);
}

const RationalVector& Belief::exact_weights() const {
  if (auto* w = std::get_if<RationalVector>(&weights_)) return *w;
  throw InvariantViolation("belief is in float mode; exact weights requested");
}

const std::vector<double>& Belief::float_weights() const {
  if (auto* w = std::get_if<std::vector<double>>(&weights_)) return *w;
  throw InvariantViolation("belief is in exact mode; float weights requested");
}

double Belief::weight_as_double(std::size_t h) const {
  if (auto* w = std::get_if<RationalVector>(&weights_)) return (*w)[h].get_d();
  return std::get<std::vector<double>>(weights_)[h];
}

Belief Belief::to_float() const {
  if (mode() == NumericMode::Float) return *this;
  std::vector<double> w;
  for (const auto& q : exact_weights()) w.push_back(q.get_d());
  return Belief(std::move(w));
}

Rational evaluate(const LinearForm& form, const RationalVector& b) {
  if (form.size() != b.size()) throw DimensionMismatch("linear form and belief sizes differ");
  Rational v = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (form[i] != 0) v += form[i] * b[i];
  return v;
}

double evaluate(const LinearForm& form, const std::vector<double>& b) {
  if (form.size() != b.size()) throw DimensionMismatch("linear form and belief sizes differ");
  double v = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (form[i] != 0) v += form[i].get_d() * b[i];
  return v;
}

bool RationalUpdate::vacuous() const {
  for (const auto& c : R)
    if (c != 0) return false;
  return true;
}

RationalUpdate linear_forms(const LearningPomdp& pomdp, std::size_t z, std::size_t y) {
  const std::size_t n = pomdp.num_hypotheses();
  if (z >= pomdp.num_examples()) throw OutOfBounds("example index out of range");
  if (y >= pomdp.num_observations()) throw OutOfBounds("observation index out of range");
  RationalUpdate u;
  u.z = z;
  u.y = y;
  u.S_rows.assign(n, LinearForm(n, Rational(0)));
  u.R.assign(n, Rational(0));
  const auto& T = pomdp.T();
  for (std::size_t hn = 0; hn < n; ++hn) {
    if (!pomdp.O()(y, hn, z)) continue;
    for (std::size_t h = 0; h < n; ++h) {
      const Rational& t = T(h, z, hn);
      if (t == 0) continue;
      u.S_rows[hn][h] = t;
      u.R[h] += t;
    }
  }
  return u;
}

Rational observation_probability(const RationalVector& b, const RationalUpdate& forms) {
  return evaluate(forms.R, b);
}

double observation_probability(const std::vector<double>& b, const RationalUpdate& forms) {
  return evaluate(forms.R, b);
}

Belief update(const Belief& b, const RationalUpdate& forms) {
  if (b.size() != forms.R.size()) throw DimensionMismatch("belief and update sizes differ");
  if (b.mode() == NumericMode::Exact) {
    const auto& w = b.exact_weights();
    const Rational r = evaluate(forms.R, w);
    if (r == 0) throw ZeroProbabilityObservation("observation has zero probability under b");
    RationalVector out(w.size());
    for (std::size_t h = 0; h < w.size(); ++h) out[h] = evaluate(forms.S_rows[h], w) / r;
    return Belief::exact(std::move(out));
  }
  const auto& w = b.float_weights();
  const double r = evaluate(forms.R, w);
  if (!(r > 0)) throw ZeroProbabilityObservation("observation has zero probability under b");
  std::vector<double> out(w.size());
  for (std::size_t h = 0; h < w.size(); ++h) out[h] = evaluate(forms.S_rows[h], w) / r;
  return Belief::floating(std::move(out));
}

std::vector<Belief> propagate(const LearningPomdp& pomdp, const Belief& b0,
                              const std::vector<PlanStep>& plan) {
  std::vector<Belief> out{b0};
  out.reserve(plan.size() + 1);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto forms = linear_forms(pomdp, plan[i].first, plan[i].second);
    try {
      out.push_back(update(out.back(), forms));
    } catch (const ZeroProbabilityObservation&) {
      throw ZeroProbabilityObservation(
          "plan step " + std::to_string(i) + " observes a zero-probability label", i);
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const LearningPomdp& pomdp,
                          const std::vector<Belief>& beliefs, const std::vector<PlanStep>& plan) {
  out << "t";
  for (std::size_t h = 0; h < pomdp.num_hypotheses(); ++h) out << ",b_h" << h;
  out << ",z,y\n";
  for (std::size_t t = 0; t < beliefs.size(); ++t) {
    out << t;
    for (std::size_t h = 0; h < beliefs[t].size(); ++h) {
      out << ',';
      if (beliefs[t].mode() == NumericMode::Exact) out << to_string(beliefs[t].exact_weights()[h]);
      else out << beliefs[t].float_weights()[h];
    }
    if (t == 0 || t > plan.size()) {
      out << ",,\n";
    } else {
      out << ',' << plan[t - 1].first << ',' << pomdp.observation_name(plan[t - 1].second) << '\n';
    }
  }
}

}  // namespace teachcert
