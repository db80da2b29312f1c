#pragma once

#include "resilience/bayes.hpp"
#include "resilience/contract.hpp"
#include "resilience/markov.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace resil::testing {

/// Two roots feeding one failure leaf; values small enough to check by hand.
inline bayes::BayesNetwork n1_network() {
  bayes::BayesNetwork net;
  net.nodes = {{"C1", {{}, {0.2}}},
               {"C2", {{}, {0.3}}},
               {"F", {{"C1", "C2"}, {0.05, 0.6, 0.7, 0.95}}}};
  net.failure_node = "F";
  return net;
}

inline markov::TransitionMatrix example_matrix() {
  // rows {0.8,0.15,0.05 / 0.5,0.1,0.4 / 0.5,0,0.5}, epsilon 0.1
  return markov::ChainParams{0.8, 0.15, 0.5, 0.1}.with_pws(0.5);
}

inline markov::TransitionMatrix random_chain(std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p_ss = 0.05 + 0.85 * unit(rng);
  const double p_sw = (1.0 - p_ss) * (0.05 + 0.95 * unit(rng));
  const double epsilon = 0.01 + 0.4 * unit(rng);
  const double p_ws = (1.0 - epsilon) * (0.02 + 0.98 * unit(rng));
  const double p_fs = 0.05 + 0.95 * unit(rng);
  return markov::ChainParams{p_ss, p_sw, p_fs, epsilon}.with_pws(p_ws);
}

/// Random polytree with a single failure sink: every non-failure node is
/// oriented toward node 0. CPT entries are uniform.
inline bayes::BayesNetwork random_polytree(std::mt19937& rng, int node_count) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(node_count));
  for (int i = 1; i < node_count; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    parents[static_cast<std::size_t>(pick(rng))].push_back(i);
  }
  bayes::BayesNetwork net;
  for (int i = 0; i < node_count; ++i) {
    bayes::Node node;
    node.name = "X" + std::to_string(i);
    for (int p : parents[static_cast<std::size_t>(i)])
      node.cpt.parents.push_back("X" + std::to_string(p));
    const std::size_t rows = std::size_t{1} << node.cpt.parents.size();
    for (std::size_t r = 0; r < rows; ++r)
      node.cpt.true_probabilities.push_back(unit(rng));
    net.nodes.push_back(std::move(node));
  }
  net.failure_node = "X0";
  return net;
}

/// Monotone additive CPT: true-probability is base plus the weights of the
/// true parents, never capped, so marginal effects are modular.
inline bayes::Cpt additive_cpt(const std::vector<bayes::NodeId>& parent_names,
                               const std::vector<double>& weights, double base) {
  bayes::Cpt cpt;
  cpt.parents = parent_names;
  const std::size_t k = parent_names.size();
  for (std::size_t idx = 0; idx < (std::size_t{1} << k); ++idx) {
    double p = base;
    for (std::size_t j = 0; j < k; ++j)
      if ((idx >> (k - 1 - j)) & 1u) p += weights[j];
    cpt.true_probabilities.push_back(p);
  }
  return cpt;
}

/// Single-level network whose component effects decay geometrically, the
/// regime the ranking-driven benefit construction assumes.
inline bayes::BayesNetwork random_monotone_network(std::mt19937& rng,
                                                   int root_count) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double first_effect = 0.04 + 0.05 * unit(rng);
  const double decay = 0.6 + 0.2 * unit(rng);
  const double base = 0.02 + 0.03 * unit(rng);

  bayes::BayesNetwork net;
  std::vector<bayes::NodeId> roots;
  std::vector<double> weights;
  double effect = first_effect;
  double weight_sum = 0.0;
  for (int i = 0; i < root_count; ++i) {
    const double prior = 0.3 + 0.4 * unit(rng);
    const double weight = effect / prior;
    roots.push_back("R" + std::to_string(i));
    net.nodes.push_back({roots.back(), {{}, {prior}}});
    weights.push_back(weight);
    weight_sum += weight;
    effect *= decay;
  }
  if (base + weight_sum > 0.95) {
    const double scale = (0.95 - base) / weight_sum;
    for (double& w : weights) w *= scale;
  }
  net.nodes.push_back({"F", additive_cpt(roots, weights, base)});
  net.failure_node = "F";
  return net;
}

/// CiEvaluation whose principal term equals a given table: with
/// alpha_f - alpha_r = -1, n = P = 1 and zero unit cost, z(k) = values[k].
inline contract::CiEvaluation ci_from_z_table(const std::string& name,
                                              std::vector<double> z,
                                              int r_min, int r_max) {
  contract::CiEvaluation ci;
  ci.name = name;
  ci.benefit.values = std::move(z);
  ci.econ = {0.0, 0.0, 1.0, 1.0, 1.0, 0.0};
  ci.range = {r_min, r_max};
  const std::size_t count = ci.benefit.values.size();
  for (std::size_t k = 0; k < count; ++k) {
    ci.v_f.push_back(0.2);
    ci.theta.push_back(0.5 + 0.5 * static_cast<double>(k) /
                                 static_cast<double>(count));
  }
  ci.v_f_min = 0.1;
  return ci;
}

/// Exhaustive allocation oracle over all in-range vectors.
inline double brute_force_best(const std::vector<contract::CiEvaluation>& cis,
                               int total, bool full) {
  double best = -1e300;
  std::vector<int> alloc(cis.size(), 0);
  auto recurse = [&](auto&& self, std::size_t i, int used) -> void {
    if (i == cis.size()) {
      if (full ? used == total : used <= total) {
        double utility = 0.0;
        for (std::size_t j = 0; j < cis.size(); ++j)
          utility += contract::principal_term(cis[j].benefit, cis[j].econ,
                                              alloc[j]);
        best = std::max(best, utility);
      }
      return;
    }
    for (int k = cis[i].range.r_min; k <= cis[i].range.r_max; ++k) {
      if (used + k > total) break;
      alloc[i] = k;
      self(self, i + 1, used + k);
    }
    alloc[i] = cis[i].range.r_min;
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace resil::testing
