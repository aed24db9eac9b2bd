#include "teachcert/model.hpp"

#include <algorithm>
#include <cstdlib>

#include "teachcert/errors.hpp"

namespace teachcert {

std::size_t LatticeShape::index(int row, int col) const {
  if (row < 1 || row > rows || col < 1 || col > cols)
    throw OutOfBounds("lattice coordinate (" + std::to_string(row) + "," + std::to_string(col) +
                      ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
  return static_cast<std::size_t>((row - 1) * cols + (col - 1));
}

std::pair<int, int> LatticeShape::coordinate(std::size_t index) const {
  const int i = static_cast<int>(index);
  return {i / cols + 1, i % cols + 1};
}

int LatticeShape::l1(std::size_t a, std::size_t b) const {
  auto [ra, ca] = coordinate(a);
  auto [rb, cb] = coordinate(b);
  return std::abs(ra - rb) + std::abs(ca - cb);
}

PreferenceFunction PreferenceFunction::explicit_table(std::vector<RationalVector> table) {
  const std::size_t n = table.size();
  for (const auto& row : table) {
    if (row.size() != n) throw InvariantViolation("preference table must be square");
    for (const auto& v : row)
      if (v < 0) throw InvariantViolation("preference entries must be nonnegative");
  }
  PreferenceFunction p;
  p.kind_ = PreferenceKind::ExplicitTable;
  p.table_ = std::move(table);
  return p;
}

PreferenceFunction PreferenceFunction::win_stay_lose_shift(std::size_t n) {
  PreferenceFunction p;
  p.kind_ = PreferenceKind::WinStayLoseShift;
  p.table_.assign(n, RationalVector(n, Rational(1)));
  for (std::size_t i = 0; i < n; ++i) p.table_[i][i] = 0;
  return p;
}

PreferenceFunction PreferenceFunction::l1_lattice(LatticeShape shape) {
  if (shape.rows < 1 || shape.cols < 1) throw OutOfBounds("lattice dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(shape.rows * shape.cols);
  PreferenceFunction p;
  p.kind_ = PreferenceKind::L1Lattice;
  p.lattice_ = shape;
  p.table_.assign(n, RationalVector(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) p.table_[a][b] = shape.l1(a, b);
  return p;
}

std::string LearningPomdp::observation_name(std::size_t y) const {
  if (variant_ == ObservationVariant::Hypothesis) return "h" + std::to_string(y);
  const Label l = labels_.at(y);
  return l > 0 ? "+" + std::to_string(l) : std::to_string(l);
}

std::vector<std::size_t> version_space(const HypothesisSpace& space,
                                       const std::vector<LabeledExample>& shown) {
  std::vector<std::size_t> out;
  for (std::size_t h = 0; h < space.size(); ++h) {
    bool ok = std::all_of(shown.begin(), shown.end(),
                          [&](const LabeledExample& z) { return space.consistent(h, z); });
    if (ok) out.push_back(h);
  }
  return out;
}

TransitionKernel build_transition_kernel(const HypothesisSpace& space,
                                         const PreferenceFunction& sigma,
                                         const std::vector<LabeledExample>& examples) {
  const std::size_t n = space.size();
  if (sigma.size() != n)
    throw InvariantViolation("preference table size does not match hypothesis count");
  TransitionKernel T(n, examples.size());
  for (std::size_t z = 0; z < examples.size(); ++z) {
    const auto consistent = version_space(space, {examples[z]});
    if (consistent.empty())
      throw EmptyVersionSpace("example " + std::to_string(z) +
                              " is inconsistent with every hypothesis");
    for (std::size_t h = 0; h < n; ++h) {
      Rational best = sigma(consistent.front(), h);
      for (auto c : consistent) best = std::min(best, Rational(sigma(c, h)));
      std::vector<std::size_t> argmin;
      for (auto c : consistent)
        if (sigma(c, h) == best) argmin.push_back(c);
      const Rational mass(1, static_cast<unsigned long>(argmin.size()));
      for (auto c : argmin) T(h, z, c) = mass;
    }
  }
  return T;
}

ObservationKernel build_observation_kernel(const HypothesisSpace& space,
                                           const std::vector<LabeledExample>& examples,
                                           const std::vector<Label>& labels,
                                           ObservationVariant variant) {
  const std::size_t n = space.size();
  if (variant == ObservationVariant::Hypothesis) {
    ObservationKernel O(n, n, examples.size());
    for (std::size_t z = 0; z < examples.size(); ++z)
      for (std::size_t h = 0; h < n; ++h) O.set(h, h, z, true);
    return O;
  }
  ObservationKernel O(labels.size(), n, examples.size());
  for (std::size_t z = 0; z < examples.size(); ++z) {
    for (std::size_t h = 0; h < n; ++h) {
      const Label l = space.label(h, examples[z].x);
      auto it = std::find(labels.begin(), labels.end(), l);
      if (it == labels.end())
        throw InvariantViolation("hypothesis " + std::to_string(h) + " emits label " +
                                 std::to_string(l) + " outside Y");
      O.set(static_cast<std::size_t>(it - labels.begin()), h, z, true);
    }
  }
  return O;
}

namespace {

void validate_spec(const PomdpSpec& spec) {
  const auto& space = spec.space;
  const std::size_t n = space.size();
  if (n == 0) throw InvariantViolation("hypothesis space is empty");
  if (spec.labels.empty()) throw InvariantViolation("label set Y is empty");
  for (std::size_t i = 0; i < spec.labels.size(); ++i)
    for (std::size_t j = i + 1; j < spec.labels.size(); ++j)
      if (spec.labels[i] == spec.labels[j]) throw InvariantViolation("duplicate label in Y");
  for (const auto& h : space.hypotheses) {
    if (h.label_row.size() != space.num_unlabeled)
      throw InvariantViolation("hypothesis " + std::to_string(h.id) +
                               " label row length differs from |X|");
    for (Label l : h.label_row)
      if (std::find(spec.labels.begin(), spec.labels.end(), l) == spec.labels.end())
        throw InvariantViolation("hypothesis " + std::to_string(h.id) + " uses a label outside Y");
  }
  if (spec.target >= n) throw InvariantViolation("target index out of range");
  for (std::size_t z = 0; z < spec.examples.size(); ++z) {
    const auto& ex = spec.examples[z];
    if (ex.x >= space.num_unlabeled)
      throw InvariantViolation("example " + std::to_string(z) + " refers to unknown x");
  }
  if (spec.examples.empty()) throw InvariantViolation("example set Z is empty");
  if (spec.p0.size() != n) throw InvariantViolation("p0 length differs from |H|");
  Rational sum = 0;
  for (const auto& p : spec.p0) {
    if (p < 0) throw InvariantViolation("p0 has a negative entry");
    sum += p;
  }
  if (sum != 1) throw InvariantViolation("p0 does not sum to 1 (sum = " + to_string(sum) + ")");
}

void validate_override(const PomdpSpec& spec, const TransitionKernel& T) {
  const std::size_t n = spec.space.size();
  if (T.num_hypotheses() != n || T.num_examples() != spec.examples.size())
    throw InvariantViolation("T override has wrong dimensions");
  for (std::size_t z = 0; z < spec.examples.size(); ++z) {
    for (std::size_t h = 0; h < n; ++h) {
      Rational row = 0;
      for (std::size_t hn = 0; hn < n; ++hn) {
        const Rational& v = T(h, z, hn);
        if (v < 0) throw InvariantViolation("T override has a negative entry");
        if (v != 0 && !spec.space.consistent(hn, spec.examples[z]))
          throw InvariantViolation("T override moves mass to a hypothesis inconsistent with example " +
                                   std::to_string(z));
        row += v;
      }
      if (row != 1)
        throw InvariantViolation("T override slice (h=" + std::to_string(h) +
                                 ", z=" + std::to_string(z) + ") is not stochastic");
    }
  }
}

}  // namespace

LearningPomdp make_pomdp(PomdpSpec spec) {
  validate_spec(spec);
  LearningPomdp m;
  if (spec.transition_override) {
    for (std::size_t z = 0; z < spec.examples.size(); ++z)
      if (version_space(spec.space, {spec.examples[z]}).empty())
        throw EmptyVersionSpace("example " + std::to_string(z) +
                                " is inconsistent with every hypothesis");
    validate_override(spec, *spec.transition_override);
    m.T_ = *spec.transition_override;
    m.overridden_ = true;
  } else {
    m.T_ = build_transition_kernel(spec.space, spec.preference, spec.examples);
  }
  for (std::size_t z = 0; z < spec.examples.size(); ++z)
    if (!spec.space.consistent(spec.target, spec.examples[z]))
      throw InvariantViolation("example " + std::to_string(z) +
                               " is not labeled by the target hypothesis");
  m.O_ = build_observation_kernel(spec.space, spec.examples, spec.labels, spec.variant);
  m.space_ = std::move(spec.space);
  m.labels_ = std::move(spec.labels);
  m.examples_ = std::move(spec.examples);
  m.preference_ = std::move(spec.preference);
  m.p0_ = std::move(spec.p0);
  m.target_ = spec.target;
  m.variant_ = spec.variant;
  return m;
}

LearningPomdp lattice_generator(int rows, int cols, std::pair<int, int> h0,
                                std::pair<int, int> h_star, ObservationVariant variant) {
  if (rows < 1 || cols < 1) throw OutOfBounds("lattice dimensions must be positive");
  const LatticeShape shape{rows, cols};
  const std::size_t start = shape.index(h0.first, h0.second);
  const std::size_t goal = shape.index(h_star.first, h_star.second);
  const std::size_t n = static_cast<std::size_t>(rows * cols);

  PomdpSpec spec;
  spec.space.num_unlabeled = n;
  for (std::size_t h = 0; h < n; ++h) {
    Hypothesis hyp{h, std::vector<Label>(n, -1)};
    hyp.label_row[h] = +1;
    spec.space.hypotheses.push_back(std::move(hyp));
  }
  spec.labels = {-1, +1};
  for (std::size_t loc = 0; loc < n; ++loc)
    spec.examples.push_back({loc, loc == goal ? +1 : -1});
  spec.preference = PreferenceFunction::l1_lattice(shape);
  spec.p0.assign(n, Rational(0));
  spec.p0[start] = 1;
  spec.target = goal;
  spec.variant = variant;
  return make_pomdp(std::move(spec));
}

std::size_t emitted_observation(const LearningPomdp& pomdp, std::size_t h, std::size_t z) {
  for (std::size_t y = 0; y < pomdp.num_observations(); ++y)
    if (pomdp.O()(y, h, z)) return y;
  throw InvariantViolation("hypothesis emits no observation");
}

}  // namespace teachcert
