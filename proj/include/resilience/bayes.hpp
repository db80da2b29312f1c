#pragma once

#include <map>
#include <string>
#include <vector>

namespace resil::bayes {

using NodeId = std::string;

/// Conditional probability table storing only the true-value entries.
/// Entry indices enumerate parent assignments as a binary counter with the
/// first listed parent as the most significant bit and bit 1 = parent true.
/// Roots hold a single entry, their prior.
struct Cpt {
  std::vector<NodeId> parents;
  std::vector<double> true_probabilities;
};

struct Node {
  NodeId name;
  Cpt cpt;
};

/// Binary polytree of failure variables with a single failure leaf.
/// Node order is the declaration order of the source document; ranking
/// tie-breaks depend on it.
struct BayesNetwork {
  std::vector<Node> nodes;
  NodeId failure_node;

  int index_of(const NodeId& name) const;  // -1 when absent
  std::vector<int> root_indices() const;   // declaration order
  bool is_root(int index) const { return nodes[index].cpt.parents.empty(); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string joined() const;
};

using Evidence = std::map<NodeId, bool>;

struct ComponentRanking {
  struct Entry {
    NodeId root;
    double effect = 0.0;  // reduction of the failure marginal, clamped at 0
  };
  double baseline = 0.0;  // prior failure probability
  std::vector<Entry> entries;
};

inline constexpr int kOracleNodeLimit = 25;

ValidationReport validate_network(const BayesNetwork& n);

/// Probability of one complete assignment: product of CPT lookups.
double joint_probability(const BayesNetwork& n,
                         const std::map<NodeId, bool>& assignment);

/// P(target = true) by variable elimination.
double prior_marginal(const BayesNetwork& n, const NodeId& target);

/// P(target = true | evidence); evidence keys must be roots.
double posterior_marginal(const BayesNetwork& n, const NodeId& target,
                          const Evidence& evidence);

/// Brute-force marginal over all complete assignments; limited to
/// kOracleNodeLimit nodes. Independent check for the elimination path.
double enumerate_joint_oracle(const BayesNetwork& n, const NodeId& target,
                              const Evidence& evidence);

/// Greedy ranking of root components by their effect on the failure
/// marginal, each round conditioning on the previously selected roots
/// being false.
ComponentRanking rank_components(const BayesNetwork& n);

}  // namespace resil::bayes
