#include "teachcert/oracle.hpp"

#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "teachcert/errors.hpp"

namespace teachcert {

std::vector<BeliefNode> enumerate(const LearningPomdp& pomdp, unsigned t_star, OracleMode mode,
                                  const PartitionPolicy* policy, const EnumerateOptions& options) {
  if (mode == OracleMode::FixedPolicy && policy == nullptr)
    throw InvariantViolation("fixed-policy enumeration needs a policy");
  const std::size_t nz = pomdp.num_examples();
  const std::size_t ny = pomdp.num_observations();
  std::vector<RationalUpdate> forms;
  forms.reserve(nz * ny);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y) forms.push_back(linear_forms(pomdp, z, y));

  std::vector<BeliefNode> level{{Belief::exact(pomdp.p0()), 0, {}, Rational(1)}};
  std::size_t created = 1;
  for (unsigned depth = 1; depth <= t_star; ++depth) {
    std::vector<std::vector<BeliefNode>> children(level.size());
    detail::parallel_for(level.size(), options.jobs, [&](std::size_t i) {
      const BeliefNode& node = level[i];
      const auto& b = node.belief.exact_weights();
      std::vector<std::size_t> zs;
      if (mode == OracleMode::FixedPolicy) zs.push_back(policy->example_at(node.belief));
      else
        for (std::size_t z = 0; z < nz; ++z) zs.push_back(z);
      for (std::size_t z : zs)
        for (std::size_t y = 0; y < ny; ++y) {
          const auto& f = forms[z * ny + y];
          const Rational r = observation_probability(b, f);
          if (r == 0) continue;
          BeliefNode child{update(node.belief, f), depth, node.path, node.path_probability * r};
          child.path.emplace_back(z, y);
          children[i].push_back(std::move(child));
        }
    });
    std::size_t count = 0;
    for (const auto& c : children) count += c.size();
    if (created + count > options.node_budget)
      throw BudgetExceeded("belief tree exceeds the node budget at depth " + std::to_string(depth),
                           static_cast<int>(depth) - 1);
    created += count;
    std::vector<BeliefNode> next;
    next.reserve(count);
    if (options.merge_duplicates) {
      std::map<RationalVector, std::size_t> seen;
      for (auto& group : children)
        for (auto& c : group) {
          auto [it, fresh] = seen.try_emplace(c.belief.exact_weights(), next.size());
          if (fresh) next.push_back(std::move(c));
          else next[it->second].path_probability += c.path_probability;
        }
    } else {
      for (auto& group : children)
        for (auto& c : group) next.push_back(std::move(c));
    }
    level = std::move(next);
  }
  return level;
}

PerformanceCheck check_performance(const std::vector<BeliefNode>& leaves, std::size_t h_star, const Rational& lambda) {
  if (leaves.empty()) throw InvariantViolation("performance check needs at least one leaf");
  std::size_t worst = 0;
  for (std::size_t i = 1; i < leaves.size(); ++i)
    if (leaves[i].belief.exact_weights().at(h_star) < leaves[worst].belief.exact_weights().at(h_star)) worst = i;
  PerformanceCheck out;
  out.worst = leaves[worst];
  out.holds = out.worst.belief.exact_weights().at(h_star) >= lambda;
  return out;
}

LearnerWalk learner_walk(const LearningPomdp& pomdp, const AdaptivePolicy& policy, std::size_t steps,
                         std::uint64_t seed, WalkVariant variant) {
  const std::size_t n = pomdp.num_hypotheses();
  std::mt19937_64 rng(seed);
  std::vector<double> p0(n);
  for (std::size_t h = 0; h < n; ++h) p0[h] = pomdp.p0()[h].get_d();
  std::discrete_distribution<std::size_t> start(p0.begin(), p0.end());

  LearnerWalk walk;
  std::size_t h = start(rng);
  walk.hypotheses.push_back(h);
  std::vector<std::size_t> shown;
  for (std::size_t s = 0; s < steps; ++s) {
    const bool accumulated = variant == WalkVariant::Accumulated;
    const std::size_t z = policy.select(pomdp, h, accumulated ? shown : std::vector<std::size_t>{});
    if (accumulated) {
      const auto next = next_hypotheses(pomdp, h, shown, z);
      std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
      h = next[pick(rng)];
      shown.push_back(z);
    } else {
      std::vector<double> row(n);
      for (std::size_t hn = 0; hn < n; ++hn) row[hn] = pomdp.T()(h, z, hn).get_d();
      std::discrete_distribution<std::size_t> jump(row.begin(), row.end());
      h = jump(rng);
    }
    walk.examples.push_back(z);
    walk.hypotheses.push_back(h);
  }
  return walk;
}

std::string witness_json(const LearningPomdp& pomdp, const BeliefNode& node) {
  nlohmann::json path = nlohmann::json::array();
  for (const auto& [z, y] : node.path) path.push_back({{"example", z}, {"observation", pomdp.observation_name(y)}});
  nlohmann::json belief = nlohmann::json::array();
  for (const auto& w : node.belief.exact_weights()) belief.push_back(to_string(w));
  return nlohmann::json{{"t", node.t},
                        {"path", path},
                        {"leaf_belief", belief},
                        {"path_probability", to_string(node.path_probability)}}
      .dump(2);
}

}  // namespace teachcert
