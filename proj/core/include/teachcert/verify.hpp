#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teachcert/dsos.hpp"
#include "teachcert/lp.hpp"
#include "teachcert/model.hpp"
#include "teachcert/policies.hpp"

namespace teachcert {

enum class VerifyMode { Arbitrary, PerExample, Policy };
enum class Outcome { Verified, Unknown };
enum class CertificateKind { Monolithic, PerExample, PerPartition };

std::string to_string(VerifyMode m);
std::string to_string(Outcome o);
std::string to_string(CertificateKind k);

/// A solved program together with its exactly audited assignment.
struct ProgramRecord {
  DsosProgram program;
  RationalVector assignment;
  std::string audit_method;
};

/// Fixed-barrier program checking one certificate against every mode.
struct CompositionRecord {
  ProgramSpec spec;
  std::vector<ProgramRecord> parts;  // independent components
};

struct Certificate {
  CertificateKind kind = CertificateKind::Monolithic;
  Rational lambda = 0;
  unsigned t_star = 0;
  unsigned degree = 0;
  ProgramOptions options;
  /// Barrier polynomials in (b, t); labels match the programs' certificate labels.
  std::vector<std::string> labels;
  std::vector<Poly> barriers;
  /// Barrier that is valid for the whole system (checked against every mode).
  std::size_t composite = 0;
  std::vector<ProgramRecord> programs;
  std::optional<CompositionRecord> composition;
  /// Policy driving the dynamics (absent for arbitrary switching).
  std::optional<PartitionPolicy> policy;

  const Poly& barrier() const { return barriers.at(composite); }
};

struct ProgramDiagnostic {
  std::string program;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::size_t decrease_constraints = 0;
  std::size_t vacuous_constraints = 0;
  std::string status;  // feasible | infeasible | iteration-limit | skipped | error
  bool audited = false;
  std::string audit_method;
  std::vector<std::string> log;
  double seconds = 0;
};

struct Verdict {
  Outcome outcome = Outcome::Unknown;
  unsigned degree = 0;
  std::optional<Certificate> certificate;
  std::vector<ProgramDiagnostic> diagnostics;
  std::string note;
  double seconds = 0;

  bool verified() const { return outcome == Outcome::Verified; }
};

struct VerifyOptions {
  ProgramOptions program;
  lp::AuditedOptions lp;
  bool exact_lp = false;
  /// Retry unknown verdicts with degree d + 2, d + 4, ... up to degree_cap.
  bool escalate = false;
  unsigned degree_cap = 4;
  /// Programs above this estimated row count are not attempted (unknown).
  std::size_t row_budget = 12000;
  /// Local certificates that do not compose are retried as one coupled program.
  bool joint_fallback = true;
  std::size_t audit_trajectories = 100;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

Verdict verify_arbitrary(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star, unsigned d,
                         const VerifyOptions& options = {});
Verdict verify_per_example(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star, unsigned d,
                           const VerifyOptions& options = {});
Verdict verify_policy(const LearningPomdp& pomdp, const PartitionPolicy& policy, const Rational& lambda,
                      unsigned t_star, unsigned d, const VerifyOptions& options = {});

/// Dispatch by mode, with optional degree escalation. `policy` is required in Policy mode.
Verdict verify(const LearningPomdp& pomdp, VerifyMode mode, const PartitionPolicy* policy,
               const Rational& lambda, unsigned t_star, unsigned d, const VerifyOptions& options = {});

struct MinTrialsResult {
  std::optional<unsigned> t_star;
  std::vector<std::pair<unsigned, Verdict>> attempts;  // in the order tried
};

/// Descends t* = t_max, t_max - 1, ... while verification succeeds and returns
/// the smallest verified value (none when t_max itself is not verified).
MinTrialsResult min_trials(const LearningPomdp& pomdp, const Rational& lambda, unsigned d, unsigned t_max,
                           VerifyMode mode, const PartitionPolicy* policy = nullptr,
                           const VerifyOptions& options = {});

struct CertificateAudit {
  bool passed = false;
  std::vector<std::string> failures;
  std::size_t trajectories = 0;
};

/// Exact re-derivation of every program condition from the barrier
/// polynomials, plus non-increase of B(t, b_t) along sampled positive-probability
/// trajectories and B(0, p0) < 0.
CertificateAudit try_audit_certificate(const Certificate& cert, const LearningPomdp& pomdp,
                                       std::size_t trajectories = 100, std::uint64_t seed = 1);
/// Throws AuditFailed naming the first violated condition.
CertificateAudit audit_certificate(const Certificate& cert, const LearningPomdp& pomdp,
                                   std::size_t trajectories = 100, std::uint64_t seed = 1);

/// Exact B(t, b) for a barrier in (b, t).
Rational barrier_value(const Poly& barrier, unsigned t, const RationalVector& b);

}  // namespace teachcert
