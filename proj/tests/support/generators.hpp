#pragma once

// Hand-rolled random generators shared by the property tests and the
// acceptance runner. Everything is driven by an explicit std::mt19937_64 so a
// failing case can be replayed from its seed.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "teachcert/model.hpp"
#include "teachcert/polynomial.hpp"
#include "teachcert/policies.hpp"

namespace teachcert::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// p/q with |p| <= max_num and 1 <= q <= max_den.
inline Rational random_rational(Rng& rng, long max_num = 9, long max_den = 7, bool nonneg = false) {
  std::uniform_int_distribution<long> num(nonneg ? 0 : -max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

/// Exact point in the relative interior of the simplex or on a face
/// (about one draw in four zeroes a random coordinate).
inline RationalVector random_simplex_point(Rng& rng, std::size_t n, bool allow_faces = true) {
  RationalVector w(n);
  Rational total = 0;
  for (auto& v : w) {
    v = Rational(std::uniform_int_distribution<long>(1, 12)(rng));
    total += v;
  }
  if (allow_faces && n > 1 && std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
    const std::size_t k = uniform_index(rng, n);
    total -= w[k];
    w[k] = 0;
  }
  for (auto& v : w) v /= total;
  return w;
}

enum class PreferenceDraw { WinStay, Lattice, Table };

struct RandomPomdpOptions {
  std::size_t max_hypotheses = 3;
  std::size_t max_examples = 3;
  std::size_t min_hypotheses = 1;
};

/// Random label-feedback POMDP: hypotheses label |X| points with +-1, the
/// target is consistent with every example by construction, and the
/// preference is win-stay-lose-shift, l1 on a 1 x n line, or a random table.
inline PomdpSpec random_pomdp_spec(Rng& rng, const RandomPomdpOptions& opt = {}) {
  const std::size_t n = opt.min_hypotheses + uniform_index(rng, opt.max_hypotheses - opt.min_hypotheses + 1);
  const std::size_t nx = 1 + uniform_index(rng, 3);
  PomdpSpec spec;
  spec.labels = {1, -1};
  spec.space.num_unlabeled = nx;
  for (std::size_t h = 0; h < n; ++h) {
    Hypothesis hyp{h, {}};
    for (std::size_t x = 0; x < nx; ++x) hyp.label_row.push_back(uniform_index(rng, 2) ? 1 : -1);
    spec.space.hypotheses.push_back(hyp);
  }
  spec.target = uniform_index(rng, n);
  const std::size_t nz = 1 + uniform_index(rng, opt.max_examples);
  for (std::size_t z = 0; z < nz; ++z) {
    const std::size_t x = uniform_index(rng, nx);
    spec.examples.push_back({x, spec.space.label(spec.target, x)});
  }
  switch (static_cast<PreferenceDraw>(uniform_index(rng, 3))) {
    case PreferenceDraw::WinStay:
      spec.preference = PreferenceFunction::win_stay_lose_shift(n);
      break;
    case PreferenceDraw::Lattice:
      spec.preference = PreferenceFunction::l1_lattice({1, static_cast<int>(n)});
      break;
    case PreferenceDraw::Table: {
      std::vector<RationalVector> table(n, RationalVector(n));
      // Small integer range so ties (uniform jumps) actually occur.
      for (auto& row : table)
        for (auto& v : row) v = Rational(static_cast<long>(uniform_index(rng, 3)));
      spec.preference = PreferenceFunction::explicit_table(std::move(table));
      break;
    }
  }
  spec.p0 = random_simplex_point(rng, n);
  return spec;
}

inline LearningPomdp random_pomdp(Rng& rng, const RandomPomdpOptions& opt = {}) {
  return make_pomdp(random_pomdp_spec(rng, opt));
}

/// Two hypotheses, two points; z1 = (x1, +1) separates them, z2 = (x2, +1)
/// does not. Win-stay-lose-shift, uniform p0, target h1.
inline LearningPomdp toy_pomdp(RationalVector p0 = {Rational(1, 2), Rational(1, 2)}) {
  PomdpSpec spec;
  spec.space.num_unlabeled = 2;
  spec.space.hypotheses = {{0, {1, 1}}, {1, {-1, 1}}};
  spec.labels = {1, -1};
  spec.examples = {{0, 1}, {1, 1}};
  spec.preference = PreferenceFunction::win_stay_lose_shift(2);
  spec.p0 = std::move(p0);
  spec.target = 0;
  return make_pomdp(std::move(spec));
}

inline LearningPomdp single_hypothesis_pomdp() {
  PomdpSpec spec;
  spec.space.num_unlabeled = 1;
  spec.space.hypotheses = {{0, {1}}};
  spec.labels = {1, -1};
  spec.examples = {{0, 1}};
  spec.preference = PreferenceFunction::win_stay_lose_shift(1);
  spec.p0 = {Rational(1)};
  spec.target = 0;
  return make_pomdp(std::move(spec));
}

/// Random polynomial with up to `terms` terms of degree <= degree over the
/// first `active` variables of an nvars ring.
inline Poly random_poly(Rng& rng, std::size_t nvars, std::size_t active, unsigned degree, std::size_t terms) {
  const auto monos = monomials_up_to(nvars, active, degree);
  Poly p(nvars);
  for (std::size_t k = 0; k < terms; ++k) p.add_term(monos[uniform_index(rng, monos.size())], random_rational(rng));
  return p;
}

/// Either a constant policy or the argmax-cell partition of an adaptive rule.
inline PartitionPolicy random_partition_policy(Rng& rng, const LearningPomdp& pomdp, std::string* name = nullptr) {
  switch (uniform_index(rng, 3)) {
    case 0: {
      const std::size_t z = uniform_index(rng, pomdp.num_examples());
      if (name) *name = "always-z" + std::to_string(z);
      return PartitionPolicy::constant(pomdp.num_hypotheses(), z);
    }
    case 1:
      if (name) *name = "myopic";
      return policy_to_partition(pomdp, AdaptivePolicy::myopic());
    default:
      if (name) *name = "ada-l";
      return policy_to_partition(pomdp, AdaptivePolicy::ada_l());
  }
}

}  // namespace teachcert::testing
