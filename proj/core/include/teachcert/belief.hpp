#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <variant>
#include <vector>

#include "teachcert/model.hpp"
#include "teachcert/rational.hpp"

namespace teachcert {

enum class NumericMode { Exact, Float };

/// A point on the belief simplex, tagged with its numeric mode. Exact beliefs
/// sum to one exactly; float beliefs within 1e-12. Modes never mix.
class Belief {
 public:
  static constexpr double kFloatTolerance = 1e-12;

  Belief() = default;  // empty exact belief

  static Belief exact(RationalVector weights);
  static Belief floating(std::vector<double> weights);
  /// Point mass on hypothesis h.
  static Belief point_mass(std::size_t size, std::size_t h, NumericMode mode = NumericMode::Exact);

  NumericMode mode() const { return std::holds_alternative<RationalVector>(weights_) ? NumericMode::Exact : NumericMode::Float; }
  std::size_t size() const;
  const RationalVector& exact_weights() const;
  const std::vector<double>& float_weights() const;
  double weight_as_double(std::size_t h) const;
  Belief to_float() const;

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  explicit Belief(std::variant<RationalVector, std::vector<double>> w) : weights_(std::move(w)) {}
  std::variant<RationalVector, std::vector<double>> weights_;
};

/// Linear form sum_h coeffs[h] * b(h) (no constant term).
using LinearForm = RationalVector;

Rational evaluate(const LinearForm& form, const RationalVector& b);
double evaluate(const LinearForm& form, const std::vector<double>& b);

/// Numerators S_rows[h'] and shared denominator R of the mode-(z, y) update.
struct RationalUpdate {
  std::size_t z = 0;
  std::size_t y = 0;
  std::vector<LinearForm> S_rows;
  LinearForm R;

  /// True when R is the zero form: observation y can never follow example z.
  bool vacuous() const;
};

RationalUpdate linear_forms(const LearningPomdp& pomdp, std::size_t z, std::size_t y);

/// b'(h') = S_rows[h'](b) / R(b). Throws ZeroProbabilityObservation when R(b) = 0.
Belief update(const Belief& b, const RationalUpdate& forms);

/// R(b): probability of observing y after showing z from belief b.
Rational observation_probability(const RationalVector& b, const RationalUpdate& forms);
double observation_probability(const std::vector<double>& b, const RationalUpdate& forms);

using PlanStep = std::pair<std::size_t, std::size_t>;  // (example z, observation y)

/// b0 followed by one belief per plan step.
std::vector<Belief> propagate(const LearningPomdp& pomdp, const Belief& b0,
                              const std::vector<PlanStep>& plan);

/// CSV with columns t, b_<h>..., z, y (row t = 0 leaves z and y empty).
void write_trajectory_csv(std::ostream& out, const LearningPomdp& pomdp,
                          const std::vector<Belief>& beliefs, const std::vector<PlanStep>& plan);

}  // namespace teachcert
