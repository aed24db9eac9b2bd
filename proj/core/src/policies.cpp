#include "teachcert/policies.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "teachcert/errors.hpp"

namespace teachcert {

namespace {

std::vector<LabeledExample> examples_of(const LearningPomdp& pomdp, const std::vector<std::size_t>& shown) {
  std::vector<LabeledExample> out;
  for (std::size_t z : shown) {
    if (z >= pomdp.num_examples()) throw OutOfBounds("example index out of range");
    out.push_back(pomdp.examples()[z]);
  }
  return out;
}

std::vector<double> random_simplex_point(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> b(n);
  double sum = 0;
  for (auto& v : b) sum += (v = e(rng));
  for (auto& v : b) v /= sum;
  return b;
}

}  // namespace

PartitionPolicy PartitionPolicy::constant(std::size_t num_hypotheses, std::size_t example) {
  (void)num_hypotheses;
  PartitionPolicy p;
  p.regions.push_back({{}, example});
  return p;
}

std::optional<std::size_t> PartitionPolicy::region_of(const RationalVector& b) const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    bool inside = true;
    for (const auto& g : regions[i].inequalities)
      if (g.eval(b) > 0) {
        inside = false;
        break;
      }
    if (inside) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> PartitionPolicy::region_of(const std::vector<double>& b, double tol) const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    bool inside = true;
    for (const auto& g : regions[i].inequalities)
      if (g.eval(b) > tol) {
        inside = false;
        break;
      }
    if (inside) return i;
  }
  return std::nullopt;
}

std::size_t PartitionPolicy::example_at(const Belief& b) const {
  const auto region = b.mode() == NumericMode::Exact ? region_of(b.exact_weights()) : region_of(b.float_weights());
  if (!region) throw InvariantViolation("no policy region contains the current belief");
  return regions[*region].example;
}

void validate_partition(const LearningPomdp& pomdp, const PartitionPolicy& policy, std::size_t samples,
                        std::uint64_t seed) {
  const std::size_t n = pomdp.num_hypotheses();
  if (policy.regions.empty()) throw InvariantViolation("policy has no regions");
  for (const auto& r : policy.regions) {
    if (r.example >= pomdp.num_examples()) throw InvariantViolation("policy region teaches an unknown example");
    for (const auto& g : r.inequalities)
      if (g.nvars() != n) throw InvariantViolation("policy inequality lives in the wrong ring");
  }
  for (std::size_t h = 0; h < n; ++h) {
    RationalVector e(n, Rational(0));
    e[h] = 1;
    if (!policy.region_of(e)) throw InvariantViolation("policy regions miss simplex vertex " + std::to_string(h));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto b = random_simplex_point(n, rng);
    if (!policy.region_of(b, 1e-12)) throw InvariantViolation("policy regions do not cover the simplex");
  }
}

std::string AdaptivePolicy::name() const {
  switch (kind) {
    case PolicyKind::Myopic: return "myopic";
    case PolicyKind::AdaL: return "ada-l";
    case PolicyKind::CustomTable: return "table";
  }
  return "table";
}

std::size_t AdaptivePolicy::select(const LearningPomdp& pomdp, std::size_t current_h,
                                   const std::vector<std::size_t>& shown) const {
  switch (kind) {
    case PolicyKind::Myopic: return myopic_select(pomdp, current_h, shown);
    case PolicyKind::AdaL: return adal_select(pomdp, current_h, shown);
    case PolicyKind::CustomTable:
      if (current_h >= table.size()) throw OutOfBounds("policy table has no entry for the hypothesis");
      if (table[current_h] >= pomdp.num_examples()) throw OutOfBounds("policy table names an unknown example");
      return table[current_h];
  }
  throw InvariantViolation("unknown policy kind");
}

std::size_t target_rank(const LearningPomdp& pomdp, std::size_t current_h, const std::vector<std::size_t>& members) {
  const auto& sigma = pomdp.preference();
  std::vector<std::size_t> order = members;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sigma(a, current_h) != sigma(b, current_h)) return sigma(a, current_h) < sigma(b, current_h);
    return a < b;
  });
  auto it = std::find(order.begin(), order.end(), pomdp.target());
  if (it == order.end()) throw InvariantViolation("target hypothesis left the version space");
  return static_cast<std::size_t>(it - order.begin()) + 1;
}

std::vector<std::size_t> next_hypotheses(const LearningPomdp& pomdp, std::size_t current_h,
                                         const std::vector<std::size_t>& shown, std::size_t z) {
  auto seen = examples_of(pomdp, shown);
  seen.push_back(examples_of(pomdp, {z}).front());
  const auto vs = version_space(pomdp.space(), seen);
  if (vs.empty()) throw EmptyVersionSpace("no hypothesis is consistent with the shown examples");
  const auto& sigma = pomdp.preference();
  Rational best = sigma(vs.front(), current_h);
  for (std::size_t h : vs) best = std::min(best, sigma(h, current_h));
  std::vector<std::size_t> out;
  for (std::size_t h : vs)
    if (sigma(h, current_h) == best) out.push_back(h);
  return out;
}

std::size_t myopic_select(const LearningPomdp& pomdp, std::size_t current_h, const std::vector<std::size_t>& shown) {
  std::size_t best_z = 0, best_rank = 0;
  for (std::size_t z = 0; z < pomdp.num_examples(); ++z) {
    auto seen = examples_of(pomdp, shown);
    seen.push_back(pomdp.examples()[z]);
    const auto vs = version_space(pomdp.space(), seen);
    if (std::find(vs.begin(), vs.end(), pomdp.target()) == vs.end()) continue;
    const std::size_t rank = target_rank(pomdp, current_h, vs);
    if (best_rank == 0 || rank < best_rank) {
      best_rank = rank;
      best_z = z;
    }
  }
  if (best_rank == 0) throw InvariantViolation("no example keeps the target in the version space");
  return best_z;
}

std::size_t adal_select(const LearningPomdp& pomdp, std::size_t current_h, const std::vector<std::size_t>& shown) {
  const auto& sigma = pomdp.preference();
  const std::size_t target = pomdp.target();
  std::optional<Rational> best;
  std::size_t best_z = 0;
  for (std::size_t z = 0; z < pomdp.num_examples(); ++z) {
    const auto next = next_hypotheses(pomdp, current_h, shown, z);
    Rational worst = sigma(target, next.front());
    for (std::size_t h : next) worst = std::max(worst, sigma(target, h));
    if (!best || worst < *best) {
      best = worst;
      best_z = z;
    }
  }
  return best_z;
}

PartitionPolicy policy_to_partition(const LearningPomdp& pomdp, const AdaptivePolicy& adaptive) {
  const std::size_t n = pomdp.num_hypotheses();
  std::vector<std::size_t> choice(n);
  for (std::size_t h = 0; h < n; ++h) choice[h] = adaptive.select(pomdp, h, {});
  PartitionPolicy out;
  if (std::all_of(choice.begin(), choice.end(), [&](std::size_t z) { return z == choice[0]; })) {
    out.regions.push_back({{}, choice[0]});
    return out;
  }
  // Cell of h: b(h_j) - b(h) <= 0 against every hypothesis taught differently.
  // Comparisons inside a group are dropped: the union of the group's cells is unchanged.
  for (std::size_t h = 0; h < n; ++h) {
    PolicyRegion r;
    r.example = choice[h];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == h || choice[j] == choice[h]) continue;
      r.inequalities.push_back(Poly::variable(n, j) - Poly::variable(n, h));
    }
    out.regions.push_back(std::move(r));
  }
  return out;
}

SimulationResult simulate_teaching(const LearningPomdp& pomdp, const PartitionPolicy& policy, std::size_t runs,
                                   std::size_t horizon, std::uint64_t seed, unsigned jobs) {
  const std::size_t n = pomdp.num_hypotheses();
  const std::size_t nz = pomdp.num_examples();
  const std::size_t ny = pomdp.num_observations();
  const std::size_t target = pomdp.target();

  // Float copies of the kernels: transition rows and update matrices per (z, y).
  std::vector<std::vector<double>> trans(n * nz, std::vector<double>(n));
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t hn = 0; hn < n; ++hn) trans[h * nz + z][hn] = pomdp.T()(h, z, hn).get_d();
  std::vector<std::vector<double>> S(nz * ny, std::vector<double>(n * n, 0.0));
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y) {
      const auto f = linear_forms(pomdp, z, y);
      for (std::size_t hn = 0; hn < n; ++hn)
        for (std::size_t h = 0; h < n; ++h) S[z * ny + y][hn * n + h] = f.S_rows[hn][h].get_d();
    }
  std::vector<double> p0(n);
  for (std::size_t h = 0; h < n; ++h) p0[h] = pomdp.p0()[h].get_d();

  std::vector<std::vector<std::uint8_t>> hit(runs, std::vector<std::uint8_t>(horizon + 1, 0));
  std::vector<std::vector<double>> mass(runs, std::vector<double>(horizon + 1, 0.0));

  detail::parallel_for(runs, jobs, [&](std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
    std::mt19937_64 rng(seq);
    std::discrete_distribution<std::size_t> start(p0.begin(), p0.end());
    std::size_t h = start(rng);
    std::vector<double> b = p0;
    hit[r][0] = h == target;
    mass[r][0] = b[target];
    for (std::size_t t = 1; t <= horizon; ++t) {
      const auto region = policy.region_of(b, 1e-12);
      if (!region) throw InvariantViolation("no policy region contains the teacher belief");
      const std::size_t z = policy.regions[*region].example;
      const auto& row = trans[h * nz + z];
      std::discrete_distribution<std::size_t> jump(row.begin(), row.end());
      h = jump(rng);
      const std::size_t y = emitted_observation(pomdp, h, z);
      const auto& M = S[z * ny + y];
      std::vector<double> next(n, 0.0);
      double total = 0;
      for (std::size_t hn = 0; hn < n; ++hn) {
        for (std::size_t k = 0; k < n; ++k) next[hn] += M[hn * n + k] * b[k];
        total += next[hn];
      }
      if (!(total > 0)) throw ZeroProbabilityObservation("simulated observation has zero belief probability", t - 1);
      for (auto& v : next) v /= total;
      b = std::move(next);
      hit[r][t] = h == target;
      mass[r][t] = b[target];
    }
  });

  SimulationResult res;
  res.runs = runs;
  res.horizon = horizon;
  res.seed = seed;
  res.successes.assign(horizon + 1, 0);
  res.mean_target_belief.assign(horizon + 1, 0.0);
  for (std::size_t r = 0; r < runs; ++r)
    for (std::size_t t = 0; t <= horizon; ++t) {
      res.successes[t] += hit[r][t];
      res.mean_target_belief[t] += mass[r][t];
    }
  if (runs)
    for (auto& m : res.mean_target_belief) m /= static_cast<double>(runs);
  return res;
}

PolicyFile load_policy(const std::string& document, std::size_t num_hypotheses) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("policy file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("policy file must be a JSON object");
  PolicyFile out;
  if (doc.contains("regions")) {
    if (doc.contains("kind")) throw SchemaError("policy file mixes 'kind' and 'regions'");
    PartitionPolicy p;
    for (const auto& r : doc.at("regions")) {
      if (!r.is_object() || !r.contains("example")) throw SchemaError("policy region needs an example");
      PolicyRegion region;
      if (!r.at("example").is_number_unsigned()) throw SchemaError("policy region example must be an index");
      region.example = r.at("example").get<std::size_t>();
      if (r.contains("inequalities"))
        for (const auto& g : r.at("inequalities")) region.inequalities.push_back(deserialize_poly(g.dump(), num_hypotheses));
      p.regions.push_back(std::move(region));
    }
    out.partition = std::move(p);
    return out;
  }
  if (!doc.contains("kind") || !doc.at("kind").is_string()) throw SchemaError("policy file needs 'kind' or 'regions'");
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "myopic") out.adaptive = AdaptivePolicy::myopic();
  else if (kind == "ada-l") out.adaptive = AdaptivePolicy::ada_l();
  else if (kind == "table") {
    if (!doc.contains("table") || !doc.at("table").is_array()) throw SchemaError("table policy needs 'table'");
    std::vector<std::size_t> table;
    for (const auto& v : doc.at("table")) {
      if (!v.is_number_unsigned()) throw SchemaError("table entries must be example indices");
      table.push_back(v.get<std::size_t>());
    }
    if (table.size() != num_hypotheses) throw SchemaError("table policy needs one entry per hypothesis");
    out.adaptive = AdaptivePolicy::custom(std::move(table));
  } else {
    throw SchemaError("unknown policy kind '" + kind + "'");
  }
  return out;
}

std::string policy_json(const PartitionPolicy& policy) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : policy.regions) {
    nlohmann::json ineq = nlohmann::json::array();
    for (const auto& g : r.inequalities) ineq.push_back(nlohmann::json::parse(serialize(g)));
    regions.push_back({{"inequalities", ineq}, {"example", r.example}});
  }
  return nlohmann::json{{"regions", regions}}.dump(2);
}

}  // namespace teachcert
