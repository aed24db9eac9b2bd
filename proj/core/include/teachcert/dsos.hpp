#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "teachcert/lp.hpp"
#include "teachcert/model.hpp"
#include "teachcert/policies.hpp"
#include "teachcert/polynomial.hpp"

namespace teachcert {

enum class VarKind { Certificate, Multiplier, Gram };

struct VarInfo {
  std::string name;
  VarKind kind = VarKind::Gram;
  bool nonneg = false;
};

/// Decision variables of one program; ids are dense and become LP columns.
class VarRegistry {
 public:
  VarId add(std::string name, VarKind kind, bool nonneg);
  std::size_t size() const { return vars_.size(); }
  const VarInfo& info(VarId v) const { return vars_.at(static_cast<std::size_t>(v)); }
  const std::vector<VarInfo>& all() const { return vars_; }

 private:
  std::vector<VarInfo> vars_;
};

struct MonomialBasis {
  std::vector<Monomial> monomials;
};

/// "target is DSOS" as linear constraints on a Gram matrix Q with
/// Q_ij = Q+_ij - Q-_ij off the diagonal. In homogeneous form the target is a
/// form of degree `degree` checked on the nonnegative orthant: the basis holds
/// the monomials of degree exactly degree/2 and every degree-`degree` monomial
/// carries an extra nonnegative coefficient.
struct DsosConstraint {
  std::string name;
  std::string role;  // "failure", "decrease", "multiplier" or empty
  PolyTemplate target;
  unsigned degree = 0;
  bool homogeneous = false;
  MonomialBasis basis;
  std::vector<VarId> diagonal;
  std::vector<std::pair<VarId, VarId>> off_diagonal;  // (Q+, Q-) for i < j, row-major
  std::vector<std::pair<Monomial, VarId>> orthant_terms;

  std::size_t off_index(std::size_t i, std::size_t j) const;  // i < j
};

/// Encodes target >= 0 via DSOS. Without `degree`, the target's own degree is
/// used and must be even (OddDegree otherwise).
DsosConstraint dsos_encode(const PolyTemplate& target, VarRegistry& vars, const std::string& name,
                           std::optional<unsigned> degree = std::nullopt, bool homogeneous = false);

struct GramValues {
  std::vector<RationalVector> Q;
  RationalVector orthant;  // aligned with DsosConstraint::orthant_terms
};

GramValues recover_gram(const DsosConstraint& c, const RationalVector& assignment);
/// m^T Q m plus the orthant terms, over the target's ring.
Poly gram_polynomial(const DsosConstraint& c, const GramValues& g);
/// Diagonal dominance with nonnegative diagonal (so Q is PSD by Gershgorin),
/// and nonnegative orthant coefficients.
bool diagonally_dominant(const GramValues& g);

/// expr (sense) 0.
struct LinearConstraint {
  std::string name;
  AffineExpr expr;
  lp::RowSense sense = lp::RowSense::Ge;
};

/// Barrier polynomial in (b_1..b_n, t) with t as the last variable.
struct CertificateTemplate {
  std::string label;
  PolyTemplate poly;
};

struct DsosProgram {
  std::string name;
  VarRegistry vars;
  std::vector<DsosConstraint> constraints;
  std::vector<LinearConstraint> linear;
  std::vector<CertificateTemplate> certificates;
  std::size_t decrease_constraints = 0;  // including vacuous ones
  std::size_t vacuous_constraints = 0;
  bool failure_set_empty = false;

  /// Columns follow the registry; rows: coefficient matching, dominance, linear.
  lp::Problem to_lp() const;
  std::size_t estimated_rows() const;
};

/// Programs that share no decision variable, in original constraint order.
std::vector<DsosProgram> split_components(const DsosProgram& program);

enum class PolicyCoupling {
  Shared,      // one certificate, decrease localized per region
  Independent  // one certificate per region, each its own program
};

struct ProgramOptions {
  /// Require nonnegativity only on the belief simplex.
  bool simplex_multipliers = true;
  /// Global DSOS (no simplex terms) and one independent certificate per region.
  bool paper_faithful = false;
  /// Multiplier degree; defaults to d, clipped so products fit the target degree.
  std::optional<unsigned> multiplier_degree;
  PolicyCoupling coupling = PolicyCoupling::Shared;
  /// Strictness margins of the failure and initial conditions.
  Rational margin{1, 1000000};
  unsigned jobs = 1;

  bool localized() const { return simplex_multipliers && !paper_faithful; }
  PolicyCoupling effective_coupling() const {
    return paper_faithful ? PolicyCoupling::Independent : coupling;
  }
};

/// One switching mode of the decrease condition: example z applied on the
/// region {g <= 0 for g in region} (the whole simplex when empty).
struct DecreaseMode {
  std::size_t example = 0;
  std::vector<Poly> region;
  std::string label;
};

struct ProgramSpec {
  std::string name;
  std::vector<DecreaseMode> modes;
  std::vector<Poly> failure_region;  // localizes the failure condition
  bool initial = true;
  /// Fixed barrier in (b, t); when absent its coefficients are decision variables.
  std::optional<Poly> fixed_certificate;
};

/// Failure, initial and decrease conditions for the given spec.
DsosProgram build_program(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star,
                          unsigned d, const ProgramOptions& options, const ProgramSpec& spec);

DsosProgram assemble_monolithic(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star,
                                unsigned d, const ProgramOptions& options = {});
std::vector<DsosProgram> assemble_per_example(const LearningPomdp& pomdp, const Rational& lambda,
                                              unsigned t_star, unsigned d,
                                              const ProgramOptions& options = {});
std::vector<DsosProgram> assemble_policy(const LearningPomdp& pomdp, const PartitionPolicy& policy,
                                         const Rational& lambda, unsigned t_star, unsigned d,
                                         const ProgramOptions& options = {});

/// Decrease modes of the arbitrary-switching system (every example, no region).
std::vector<DecreaseMode> arbitrary_modes(const LearningPomdp& pomdp);
/// One mode per taught example; regions sharing an example keep only their
/// common inequalities.
std::vector<DecreaseMode> policy_modes(const PartitionPolicy& policy);

/// Ring size of certificates: |H| belief variables plus the trial variable.
inline std::size_t certificate_ring(const LearningPomdp& pomdp) { return pomdp.num_hypotheses() + 1; }

}  // namespace teachcert
