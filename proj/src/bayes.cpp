#include "resilience/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace resil::bayes {

namespace {

// Factor over a sorted set of node indices; table indexed lsb-first,
// bit j of the table index is the value of vars[j].
struct Factor {
  std::vector<int> vars;
  std::vector<double> table;
};

std::size_t position_of(const std::vector<int>& vars, int var) {
  return static_cast<std::size_t>(
      std::lower_bound(vars.begin(), vars.end(), var) - vars.begin());
}

Factor restrict_var(const Factor& f, int var, bool value) {
  const std::size_t pos = position_of(f.vars, var);
  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
  out.table.resize(f.table.size() / 2);
  const std::size_t low_mask = (std::size_t{1} << pos) - 1;
  for (std::size_t i = 0; i < out.table.size(); ++i) {
    std::size_t src = (i & low_mask) | ((i & ~low_mask) << 1);
    if (value) src |= std::size_t{1} << pos;
    out.table[i] = f.table[src];
  }
  return out;
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  out.table.assign(std::size_t{1} << out.vars.size(), 0.0);
  // Map positions in the union back into each operand.
  std::vector<std::size_t> a_pos, b_pos;
  for (std::size_t j = 0; j < out.vars.size(); ++j) {
    if (std::binary_search(a.vars.begin(), a.vars.end(), out.vars[j]))
      a_pos.push_back(j);
    if (std::binary_search(b.vars.begin(), b.vars.end(), out.vars[j]))
      b_pos.push_back(j);
  }
  for (std::size_t i = 0; i < out.table.size(); ++i) {
    std::size_t ai = 0, bi = 0;
    for (std::size_t j = 0; j < a_pos.size(); ++j)
      ai |= ((i >> a_pos[j]) & 1u) << j;
    for (std::size_t j = 0; j < b_pos.size(); ++j)
      bi |= ((i >> b_pos[j]) & 1u) << j;
    out.table[i] = a.table[ai] * b.table[bi];
  }
  return out;
}

Factor sum_out(const Factor& f, int var) {
  const std::size_t pos = position_of(f.vars, var);
  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
  out.table.assign(f.table.size() / 2, 0.0);
  const std::size_t low_mask = (std::size_t{1} << pos) - 1;
  for (std::size_t i = 0; i < out.table.size(); ++i) {
    const std::size_t base = (i & low_mask) | ((i & ~low_mask) << 1);
    out.table[i] = f.table[base] + f.table[base | (std::size_t{1} << pos)];
  }
  return out;
}

std::size_t cpt_row_index(const BayesNetwork& n, int node,
                          const std::vector<bool>& values) {
  const Cpt& cpt = n.nodes[static_cast<std::size_t>(node)].cpt;
  std::size_t idx = 0;
  for (const NodeId& parent : cpt.parents) {
    idx = (idx << 1) |
          (values[static_cast<std::size_t>(n.index_of(parent))] ? 1u : 0u);
  }
  return idx;
}

void require_valid(const BayesNetwork& n) {
  const ValidationReport report = validate_network(n);
  if (!report.ok())
    throw std::invalid_argument("invalid network: " + report.joined());
}

// Core elimination routine shared by prior and posterior marginals.
double eliminate(const BayesNetwork& n, int target,
                 const std::unordered_map<int, bool>& fixed) {
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const Cpt& cpt = n.nodes[i].cpt;
    Factor f;
    f.vars.push_back(static_cast<int>(i));
    for (const NodeId& parent : cpt.parents)
      f.vars.push_back(n.index_of(parent));
    std::sort(f.vars.begin(), f.vars.end());
    f.table.resize(std::size_t{1} << f.vars.size());
    const std::size_t self_pos = position_of(f.vars, static_cast<int>(i));
    for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
      std::size_t row = 0;
      for (std::size_t j = 0; j < cpt.parents.size(); ++j) {
        const std::size_t pos =
            position_of(f.vars, n.index_of(cpt.parents[j]));
        row = (row << 1) | ((idx >> pos) & 1u);
      }
      const double p_true = cpt.true_probabilities[row];
      f.table[idx] = ((idx >> self_pos) & 1u) ? p_true : 1.0 - p_true;
    }
    for (const auto& [var, value] : fixed)
      if (std::binary_search(f.vars.begin(), f.vars.end(), var))
        f = restrict_var(f, var, value);
    factors.push_back(std::move(f));
  }

  std::set<int> to_eliminate;
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const int v = static_cast<int>(i);
    if (v != target && !fixed.count(v)) to_eliminate.insert(v);
  }

  while (!to_eliminate.empty()) {
    // Greedy: eliminate the variable whose combined factor is smallest.
    int best_var = -1;
    std::size_t best_size = std::numeric_limits<std::size_t>::max();
    for (int v : to_eliminate) {
      std::set<int> scope;
      for (const Factor& f : factors)
        if (std::binary_search(f.vars.begin(), f.vars.end(), v))
          scope.insert(f.vars.begin(), f.vars.end());
      if (scope.size() < best_size) {
        best_size = scope.size();
        best_var = v;
      }
    }
    Factor combined;
    combined.table = {1.0};
    std::vector<Factor> rest;
    for (Factor& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), best_var))
        combined = multiply(combined, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(combined, best_var));
    factors = std::move(rest);
    to_eliminate.erase(best_var);
  }

  Factor result;
  result.table = {1.0};
  for (const Factor& f : factors) result = multiply(result, f);

  if (result.vars.empty()) {
    // Target itself was fixed by evidence; marginal is 0 or 1.
    const double mass = result.table[0];
    if (!(mass > 0.0))
      throw std::invalid_argument("zero-probability evidence");
    return fixed.at(target) ? 1.0 : 0.0;
  }
  const double mass = result.table[0] + result.table[1];
  if (!(mass > 0.0))
    throw std::invalid_argument("zero-probability evidence");
  return result.table[1] / mass;
}

}  // namespace

int BayesNetwork::index_of(const NodeId& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> BayesNetwork::root_indices() const {
  std::vector<int> roots;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].cpt.parents.empty()) roots.push_back(static_cast<int>(i));
  return roots;
}

std::string ValidationReport::joined() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) out << "; ";
    out << violations[i];
  }
  return out.str();
}

ValidationReport validate_network(const BayesNetwork& n) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };

  if (n.nodes.empty()) {
    fail("network has no nodes");
    return report;
  }
  std::set<NodeId> names;
  for (const Node& node : n.nodes) {
    if (node.name.empty()) fail("empty node name");
    if (!names.insert(node.name).second)
      fail("duplicate node name: " + node.name);
  }
  bool refs_ok = true;
  for (const Node& node : n.nodes) {
    std::set<NodeId> seen;
    for (const NodeId& parent : node.cpt.parents) {
      if (n.index_of(parent) < 0) {
        fail("unresolved parent '" + parent + "' of node '" + node.name + "'");
        refs_ok = false;
      }
      if (!seen.insert(parent).second) {
        fail("duplicate parent '" + parent + "' of node '" + node.name + "'");
        refs_ok = false;
      }
    }
    const std::size_t expected = std::size_t{1} << node.cpt.parents.size();
    if (node.cpt.true_probabilities.size() != expected)
      fail("CPT length mismatch at node '" + node.name + "'");
    for (double p : node.cpt.true_probabilities)
      if (!(p >= 0.0 && p <= 1.0))
        fail("CPT probability out of range at node '" + node.name + "'");
  }
  if (n.index_of(n.failure_node) < 0)
    fail("failure node '" + n.failure_node + "' is not declared");
  if (!refs_ok || n.index_of(n.failure_node) < 0) return report;

  const std::size_t count = n.nodes.size();
  // Kahn's algorithm over child counts for acyclicity.
  std::vector<int> unmet(count, 0);
  std::vector<std::vector<int>> children(count);
  std::size_t edges = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (const NodeId& parent : n.nodes[i].cpt.parents) {
      const int p = n.index_of(parent);
      children[static_cast<std::size_t>(p)].push_back(static_cast<int>(i));
      ++unmet[i];
      ++edges;
    }
  }
  std::vector<int> queue;
  for (std::size_t i = 0; i < count; ++i)
    if (unmet[i] == 0) queue.push_back(static_cast<int>(i));
  std::size_t visited = 0;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    ++visited;
    for (int c : children[static_cast<std::size_t>(v)])
      if (--unmet[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
  }
  if (visited != count) fail("cycle in network");

  // Polytree: the undirected graph must be a connected tree.
  if (edges != count - 1) {
    fail(edges >= count ? "not singly connected" : "network is disconnected");
  } else {
    std::vector<std::vector<int>> adjacent(count);
    for (std::size_t i = 0; i < count; ++i)
      for (int c : children[i]) {
        adjacent[i].push_back(c);
        adjacent[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
      }
    std::vector<bool> seen(count, false);
    std::vector<int> stack = {0};
    seen[0] = true;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++reached;
      for (int w : adjacent[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = true;
          stack.push_back(w);
        }
    }
    if (reached != count) fail("not singly connected");
  }

  const int failure = n.index_of(n.failure_node);
  if (!children[static_cast<std::size_t>(failure)].empty())
    fail("failure node has children");
  for (std::size_t i = 0; i < count; ++i) {
    if (static_cast<int>(i) == failure) continue;
    if (children[i].empty())
      fail("multiple leaves: node '" + n.nodes[i].name + "' has no child");
  }
  return report;
}

double joint_probability(const BayesNetwork& n,
                         const std::map<NodeId, bool>& assignment) {
  require_valid(n);
  std::vector<bool> values(n.nodes.size());
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const auto it = assignment.find(n.nodes[i].name);
    if (it == assignment.end())
      throw std::invalid_argument("assignment missing node '" +
                                  n.nodes[i].name + "'");
    values[i] = it->second;
  }
  double product = 1.0;
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const double p_true =
        n.nodes[i]
            .cpt.true_probabilities[cpt_row_index(n, static_cast<int>(i), values)];
    product *= values[i] ? p_true : 1.0 - p_true;
  }
  return product;
}

double prior_marginal(const BayesNetwork& n, const NodeId& target) {
  require_valid(n);
  const int t = n.index_of(target);
  if (t < 0) throw std::invalid_argument("unknown target '" + target + "'");
  return eliminate(n, t, {});
}

double posterior_marginal(const BayesNetwork& n, const NodeId& target,
                          const Evidence& evidence) {
  require_valid(n);
  const int t = n.index_of(target);
  if (t < 0) throw std::invalid_argument("unknown target '" + target + "'");
  std::unordered_map<int, bool> fixed;
  for (const auto& [name, value] : evidence) {
    const int idx = n.index_of(name);
    if (idx < 0) throw std::invalid_argument("unknown evidence node '" + name + "'");
    if (!n.is_root(idx))
      throw std::invalid_argument("evidence on non-root node '" + name + "'");
    fixed.emplace(idx, value);
  }
  return eliminate(n, t, fixed);
}

double enumerate_joint_oracle(const BayesNetwork& n, const NodeId& target,
                              const Evidence& evidence) {
  require_valid(n);
  if (n.nodes.size() > kOracleNodeLimit)
    throw std::invalid_argument("network too large for enumeration");
  const int t = n.index_of(target);
  if (t < 0) throw std::invalid_argument("unknown target '" + target + "'");
  std::vector<int> fixed(n.nodes.size(), -1);
  for (const auto& [name, value] : evidence) {
    const int idx = n.index_of(name);
    if (idx < 0) throw std::invalid_argument("unknown evidence node '" + name + "'");
    fixed[static_cast<std::size_t>(idx)] = value ? 1 : 0;
  }
  const std::size_t count = n.nodes.size();
  double mass = 0.0;
  double mass_target_true = 0.0;
  std::vector<bool> values(count);
  for (std::size_t code = 0; code < (std::size_t{1} << count); ++code) {
    bool consistent = true;
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = (code >> i) & 1u;
      if (fixed[i] >= 0 && values[i] != (fixed[i] == 1)) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    double product = 1.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double p_true =
          n.nodes[i].cpt.true_probabilities[cpt_row_index(
              n, static_cast<int>(i), values)];
      product *= values[i] ? p_true : 1.0 - p_true;
    }
    mass += product;
    if (values[static_cast<std::size_t>(t)]) mass_target_true += product;
  }
  if (!(mass > 0.0)) throw std::invalid_argument("zero-probability evidence");
  return mass_target_true / mass;
}

ComponentRanking rank_components(const BayesNetwork& n) {
  require_valid(n);
  ComponentRanking ranking;
  ranking.baseline = prior_marginal(n, n.failure_node);

  Evidence evidence;
  std::vector<int> remaining = n.root_indices();
  double current = ranking.baseline;
  while (!remaining.empty()) {
    std::size_t best = 0;
    double best_effect = -1.0;
    std::vector<double> conditioned(remaining.size());
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      Evidence trial = evidence;
      trial[n.nodes[static_cast<std::size_t>(remaining[j])].name] = false;
      conditioned[j] = posterior_marginal(n, n.failure_node, trial);
      const double effect = std::max(current - conditioned[j], 0.0);
      if (effect > best_effect) {  // ties keep the earliest declared root
        best_effect = effect;
        best = j;
      }
    }
    const NodeId& chosen = n.nodes[static_cast<std::size_t>(remaining[best])].name;
    ranking.entries.push_back({chosen, best_effect});
    evidence[chosen] = false;
    current = conditioned[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return ranking;
}

}  // namespace resil::bayes
