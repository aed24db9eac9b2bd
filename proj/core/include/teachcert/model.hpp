#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "teachcert/rational.hpp"

namespace teachcert {

using Label = int;

/// A hypothesis tabulated as one label per unlabeled example x.
struct Hypothesis {
  std::size_t id = 0;
  std::vector<Label> label_row;
};

struct LabeledExample {
  std::size_t x = 0;
  Label y_star = 0;
};

enum class PreferenceKind { ExplicitTable, WinStayLoseShift, L1Lattice };

/// Lattice geometry, 1-based (row, col) coordinates; hypothesis index is
/// (row - 1) * cols + (col - 1).
struct LatticeShape {
  int rows = 0;
  int cols = 0;

  std::size_t index(int row, int col) const;
  std::pair<int, int> coordinate(std::size_t index) const;
  int l1(std::size_t a, std::size_t b) const;
};

/// sigma(h'; h) stored as table[h'][h].
class PreferenceFunction {
 public:
  static PreferenceFunction explicit_table(std::vector<RationalVector> table);
  static PreferenceFunction win_stay_lose_shift(std::size_t n);
  static PreferenceFunction l1_lattice(LatticeShape shape);

  PreferenceKind kind() const { return kind_; }
  std::size_t size() const { return table_.size(); }
  const Rational& operator()(std::size_t h_next, std::size_t h_current) const {
    return table_[h_next][h_current];
  }
  const std::vector<RationalVector>& table() const { return table_; }
  const std::optional<LatticeShape>& lattice() const { return lattice_; }

 private:
  PreferenceKind kind_ = PreferenceKind::ExplicitTable;
  std::vector<RationalVector> table_;
  std::optional<LatticeShape> lattice_;
};

struct HypothesisSpace {
  std::vector<Hypothesis> hypotheses;
  std::size_t num_unlabeled = 0;  // |X|

  std::size_t size() const { return hypotheses.size(); }
  Label label(std::size_t h, std::size_t x) const { return hypotheses[h].label_row[x]; }
  bool consistent(std::size_t h, const LabeledExample& z) const {
    return label(h, z.x) == z.y_star;
  }
};

/// Learner feedback channel: (a) the learner's label, (b) the learner's hypothesis.
enum class ObservationVariant { Label, Hypothesis };

/// T(h, z, h') as a dense |H| x |Z| x |H| tensor of exact rationals.
class TransitionKernel {
 public:
  TransitionKernel() = default;
  TransitionKernel(std::size_t num_h, std::size_t num_z)
      : num_h_(num_h), num_z_(num_z), data_(num_h * num_z * num_h) {}

  std::size_t num_hypotheses() const { return num_h_; }
  std::size_t num_examples() const { return num_z_; }
  Rational& operator()(std::size_t h, std::size_t z, std::size_t h_next) {
    return data_[(h * num_z_ + z) * num_h_ + h_next];
  }
  const Rational& operator()(std::size_t h, std::size_t z, std::size_t h_next) const {
    return data_[(h * num_z_ + z) * num_h_ + h_next];
  }

 private:
  std::size_t num_h_ = 0, num_z_ = 0;
  std::vector<Rational> data_;
};

/// O(y | h', z) as a binary |Obs| x |H| x |Z| tensor; y is an index into the
/// observation alphabet.
class ObservationKernel {
 public:
  ObservationKernel() = default;
  ObservationKernel(std::size_t num_obs, std::size_t num_h, std::size_t num_z)
      : num_obs_(num_obs), num_h_(num_h), num_z_(num_z), data_(num_obs * num_h * num_z, 0) {}

  std::size_t num_observations() const { return num_obs_; }
  bool operator()(std::size_t y, std::size_t h_next, std::size_t z) const {
    return data_[(y * num_h_ + h_next) * num_z_ + z] != 0;
  }
  void set(std::size_t y, std::size_t h_next, std::size_t z, bool v) {
    data_[(y * num_h_ + h_next) * num_z_ + z] = v ? 1 : 0;
  }

 private:
  std::size_t num_obs_ = 0, num_h_ = 0, num_z_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Everything needed to build a LearningPomdp; validated by make_pomdp.
struct PomdpSpec {
  HypothesisSpace space;
  std::vector<Label> labels;
  std::vector<LabeledExample> examples;
  PreferenceFunction preference;
  RationalVector p0;
  std::size_t target = 0;
  ObservationVariant variant = ObservationVariant::Label;
  std::optional<TransitionKernel> transition_override;
};

/// The learning POMDP (H, p0, Z, T, Y, O). Immutable once built.
class LearningPomdp {
 public:
  std::size_t num_hypotheses() const { return space_.size(); }
  std::size_t num_examples() const { return examples_.size(); }
  /// Size of the observation alphabet: |Y| for label feedback, |H| otherwise.
  std::size_t num_observations() const { return O_.num_observations(); }

  const HypothesisSpace& space() const { return space_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<LabeledExample>& examples() const { return examples_; }
  const PreferenceFunction& preference() const { return preference_; }
  const RationalVector& p0() const { return p0_; }
  std::size_t target() const { return target_; }
  ObservationVariant variant() const { return variant_; }
  const TransitionKernel& T() const { return T_; }
  const ObservationKernel& O() const { return O_; }
  bool has_transition_override() const { return overridden_; }

  /// Human-readable name of observation index y ("+1", "-1", or "h3").
  std::string observation_name(std::size_t y) const;

 private:
  friend LearningPomdp make_pomdp(PomdpSpec spec);

  HypothesisSpace space_;
  std::vector<Label> labels_;
  std::vector<LabeledExample> examples_;
  PreferenceFunction preference_;
  RationalVector p0_;
  std::size_t target_ = 0;
  ObservationVariant variant_ = ObservationVariant::Label;
  TransitionKernel T_;
  ObservationKernel O_;
  bool overridden_ = false;
};

/// Hypotheses consistent with every example in `shown` (all of them when empty).
std::vector<std::size_t> version_space(const HypothesisSpace& space,
                                       const std::vector<LabeledExample>& shown);

/// Memoryless learner jump: from h under example z the learner moves uniformly
/// to the sigma(.; h)-minimizers among hypotheses consistent with z.
TransitionKernel build_transition_kernel(const HypothesisSpace& space,
                                         const PreferenceFunction& sigma,
                                         const std::vector<LabeledExample>& examples);

ObservationKernel build_observation_kernel(const HypothesisSpace& space,
                                           const std::vector<LabeledExample>& examples,
                                           const std::vector<Label>& labels,
                                           ObservationVariant variant = ObservationVariant::Label);

/// Validates every invariant and builds T and O (or checks the override).
LearningPomdp make_pomdp(PomdpSpec spec);

/// rows x cols lattice; one hypothesis per cell, one example per cell that
/// flags it (label +1 only at its own cell), l1 preference, point-mass p0 on h0.
LearningPomdp lattice_generator(int rows, int cols, std::pair<int, int> h0,
                                std::pair<int, int> h_star,
                                ObservationVariant variant = ObservationVariant::Label);

/// Index of the observation a hypothesis emits for example z.
std::size_t emitted_observation(const LearningPomdp& pomdp, std::size_t h, std::size_t z);

// Scenario files (JSON).
LearningPomdp load_pomdp(const std::string& document);
LearningPomdp load_pomdp_file(const std::string& path);
std::string scenario_json(const LearningPomdp& pomdp);

/// Stable content digest (FNV-1a 64, hex) of a scenario's canonical JSON.
std::string pomdp_digest(const LearningPomdp& pomdp);

}  // namespace teachcert
