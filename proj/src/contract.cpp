#include "resilience/contract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace resil::contract {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct CiCurves {
  std::vector<double> v_f;
  std::vector<double> theta;
  std::vector<double> benefit;
  std::vector<bayes::NodeId> secured_order;
  double v_f_min = 0.0;
};

CiCurves compute_curves(const bayes::BayesNetwork& net,
                        const markov::ChainParams& chain) {
  const bayes::ComponentRanking ranking = bayes::rank_components(net);
  const double pwf0 = ranking.baseline;
  if (1.0 - chain.epsilon - pwf0 < 0.0)
    throw std::invalid_argument(
        "derived p_ws negative: prior failure probability exceeds 1 - epsilon");

  CiCurves curves;
  curves.v_f_min =
      markov::stationary_closed_form(chain.with_pws(1.0 - chain.epsilon)).v_f;

  bayes::Evidence evidence;
  double pwf = pwf0;
  for (int k = 0;; ++k) {
    const double pws = 1.0 - chain.epsilon - pwf;
    const double v_f = markov::stationary_closed_form(chain.with_pws(pws)).v_f;
    curves.v_f.push_back(v_f);
    curves.theta.push_back(curves.v_f_min / v_f);
    curves.benefit.push_back(curves.v_f.front() - v_f);
    if (k == static_cast<int>(ranking.entries.size())) break;
    const bayes::NodeId& root = ranking.entries[static_cast<std::size_t>(k)].root;
    curves.secured_order.push_back(root);
    evidence[root] = false;
    pwf = bayes::posterior_marginal(net, net.failure_node, evidence);
  }
  return curves;
}

void check_units(const BenefitSequence& b, int k) {
  if (k < 0 || k > b.max_units())
    throw std::invalid_argument("resource count outside 0..K");
}

void check_instance(const std::vector<CiEvaluation>& cis, int total, bool full) {
  if (total < 0) throw std::invalid_argument("negative resource pool");
  int sum_min = 0, sum_max = 0;
  for (const CiEvaluation& ci : cis) {
    sum_min += ci.range.r_min;
    sum_max += ci.range.r_max;
  }
  if (total < sum_min)
    throw std::invalid_argument("infeasible: fewer resources than the combined minimum");
  if (full && sum_max < total)
    throw std::invalid_argument("infeasible: resource pool exceeds the combined maximum");
}

AllocationResult finalize(const std::vector<CiEvaluation>& cis,
                          std::vector<int> allocation) {
  AllocationResult result;
  result.allocation = std::move(allocation);
  for (std::size_t i = 0; i < cis.size(); ++i) {
    const int k = result.allocation[i];
    result.total_allocated += k;
    result.ci_utility.push_back(dam_utility(cis[i].benefit, cis[i].econ, k));
    result.theta_before.push_back(cis[i].theta.front());
    result.theta_after.push_back(cis[i].theta[static_cast<std::size_t>(k)]);
    result.principal_utility += principal_term(cis[i].benefit, cis[i].econ, k);
  }
  return result;
}

}  // namespace

BenefitSequence benefit_sequence(const bayes::BayesNetwork& net,
                                 const markov::ChainParams& chain) {
  return BenefitSequence{compute_curves(net, chain).benefit};
}

double dam_utility(const BenefitSequence& b, const EconomicParams& e, int k) {
  check_units(b, k);
  return e.alpha_d * b.values[static_cast<std::size_t>(k)] * e.n_hours *
             e.power_mw -
         e.unit_cost_c * k;
}

double principal_term(const BenefitSequence& b, const EconomicParams& e, int k) {
  check_units(b, k);
  return e.unit_cost_c * k - (e.alpha_f - e.alpha_r) *
                                 b.values[static_cast<std::size_t>(k)] *
                                 e.n_hours * e.power_mw;
}

FeasibleRange feasible_range(const BenefitSequence& b, const EconomicParams& e) {
  FeasibleRange range;
  for (int k = b.max_units(); k >= 0; --k) {
    if (dam_utility(b, e, k) >= 0.0) {
      range.r_max = k;
      break;
    }
  }
  // Smallest k from which the principal term stays non-negative up to r_max.
  range.r_min = 0;
  if (principal_term(b, e, range.r_max) >= 0.0) {
    int k = range.r_max;
    while (k > 0 && principal_term(b, e, k - 1) >= 0.0) --k;
    range.r_min = k;
  }
  return range;
}

CiEvaluation evaluate_ci(const std::string& name,
                         const markov::ChainParams& chain,
                         const bayes::BayesNetwork& net,
                         const EconomicParams& econ) {
  CiCurves curves = compute_curves(net, chain);
  CiEvaluation ci;
  ci.name = name;
  ci.benefit = BenefitSequence{std::move(curves.benefit)};
  ci.econ = econ;
  ci.range = feasible_range(ci.benefit, econ);
  ci.v_f = std::move(curves.v_f);
  ci.theta = std::move(curves.theta);
  ci.v_f_min = curves.v_f_min;
  ci.secured_order = std::move(curves.secured_order);
  return ci;
}

AllocationResult allocate_exchange(const std::vector<CiEvaluation>& cis,
                                   int total_resources) {
  check_instance(cis, total_resources, /*full=*/true);
  const std::size_t count = cis.size();
  auto term = [&](std::size_t i, int k) {
    return principal_term(cis[i].benefit, cis[i].econ, k);
  };

  std::vector<int> alloc(count);
  int remaining = total_resources;
  for (std::size_t i = 0; i < count; ++i) {
    alloc[i] = cis[i].range.r_min;
    remaining -= alloc[i];
  }

  // Initial stage: the dam with the highest objective value at its maximum
  // feasible amount takes that amount; the remainder goes to the next best
  // dams until the pool is spent.
  while (remaining > 0) {
    std::size_t pick = count;
    int pick_level = 0;
    double pick_value = kNegInf;
    for (std::size_t j = 0; j < count; ++j) {
      const int level = std::min(cis[j].range.r_max, alloc[j] + remaining);
      if (level <= alloc[j]) continue;
      const double value = term(j, level);
      if (pick == count || value > pick_value) {
        pick = j;
        pick_level = level;
        pick_value = value;
      }
    }
    remaining -= pick_level - alloc[pick];
    alloc[pick] = pick_level;
  }

  // Exchange stage: move batches away from the most-resourced dam while
  // another dam values them more.
  for (;;) {
    std::size_t donor = 0;
    for (std::size_t j = 1; j < count; ++j)
      if (alloc[j] > alloc[donor]) donor = j;

    bool moved = false;
    for (int batch = 1; batch <= alloc[donor] - cis[donor].range.r_min; ++batch) {
      const double donor_loss = term(donor, alloc[donor]) - term(donor, alloc[donor] - batch);
      std::size_t best = count;
      double best_gain = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        if (j == donor || alloc[j] + batch > cis[j].range.r_max) continue;
        const double gain = term(j, alloc[j] + batch) - term(j, alloc[j]) - donor_loss;
        if (gain > best_gain) {
          best_gain = gain;
          best = j;
        }
      }
      if (best != count) {
        alloc[donor] -= batch;
        alloc[best] += batch;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return finalize(cis, std::move(alloc));
}

AllocationResult allocate_exact(const std::vector<CiEvaluation>& cis,
                                int total_resources, AllocMode mode) {
  check_instance(cis, total_resources, mode == AllocMode::full);
  const std::size_t count = cis.size();
  const std::size_t budget = static_cast<std::size_t>(total_resources);
  auto term = [&](std::size_t i, int k) {
    return principal_term(cis[i].benefit, cis[i].econ, k);
  };

  // best[i][r]: optimal (utility, resources used) over dams i..N-1 with a
  // budget of r; full mode must use the budget exactly.
  struct Cell {
    double util = kNegInf;
    int used = 0;
  };
  std::vector<std::vector<Cell>> best(count + 1,
                                      std::vector<Cell>(budget + 1));
  for (std::size_t r = 0; r <= budget; ++r) {
    if (mode == AllocMode::partial || r == 0) best[count][r] = {0.0, 0};
  }
  for (std::size_t i = count; i-- > 0;) {
    for (std::size_t r = 0; r <= budget; ++r) {
      Cell cell;
      const int hi = std::min(cis[i].range.r_max, static_cast<int>(r));
      for (int k = cis[i].range.r_min; k <= hi; ++k) {
        const Cell& tail = best[i + 1][r - static_cast<std::size_t>(k)];
        if (tail.util == kNegInf) continue;
        const double util = term(i, k) + tail.util;
        const int used = k + tail.used;
        if (util > cell.util || (util == cell.util && used < cell.used))
          cell = {util, used};
      }
      best[i][r] = cell;
    }
  }
  if (best[0][budget].util == kNegInf)
    throw std::invalid_argument("infeasible allocation instance");

  // Reconstruct the lexicographically smallest optimal allocation.
  std::vector<int> alloc(count);
  std::size_t r = budget;
  for (std::size_t i = 0; i < count; ++i) {
    const Cell target = best[i][r];
    const int hi = std::min(cis[i].range.r_max, static_cast<int>(r));
    for (int k = cis[i].range.r_min; k <= hi; ++k) {
      const Cell& tail = best[i + 1][r - static_cast<std::size_t>(k)];
      if (tail.util == kNegInf) continue;
      if (term(i, k) + tail.util == target.util && k + tail.used == target.used) {
        alloc[i] = k;
        r -= static_cast<std::size_t>(k);
        break;
      }
    }
  }
  return finalize(cis, std::move(alloc));
}

double principal_utility(const AllocationResult& result,
                         const std::vector<CiEvaluation>& cis) {
  double total = 0.0;
  for (std::size_t i = 0; i < cis.size(); ++i)
    total += principal_term(cis[i].benefit, cis[i].econ, result.allocation[i]);
  return total;
}

double average_resilience_utility(const AllocationResult& result,
                                  const std::vector<CiEvaluation>& cis) {
  const double mean_theta =
      std::accumulate(result.theta_after.begin(), result.theta_after.end(), 0.0) /
      static_cast<double>(result.theta_after.size());
  return mean_theta * principal_utility(result, cis);
}

std::vector<SweepPoint> reward_sweep(const std::vector<CiEvaluation>& cis,
                                     int total_resources,
                                     const std::vector<double>& c_values) {
  if (c_values.empty()) throw std::invalid_argument("empty cost list");
  std::vector<SweepPoint> points;
  for (double c : c_values) {
    std::vector<CiEvaluation> priced = cis;
    int sum_min = 0, sum_max = 0;
    for (CiEvaluation& ci : priced) {
      ci.econ.unit_cost_c = c;
      ci.range = feasible_range(ci.benefit, ci.econ);
      sum_min += ci.range.r_min;
      sum_max += ci.range.r_max;
    }
    SweepPoint point;
    point.cost = c;
    point.full_feasible =
        sum_min <= total_resources && total_resources <= sum_max;
    if (point.full_feasible)
      point.full = allocate_exact(priced, total_resources, AllocMode::full);
    point.partial = allocate_exact(priced, total_resources, AllocMode::partial);
    for (std::size_t i = 0; i < priced.size(); ++i) {
      std::vector<int> alloc(priced.size(), 0);
      for (std::size_t j = 0; j < priced.size(); ++j)
        alloc[j] = priced[j].range.r_min;
      alloc[i] = std::min(priced[i].range.r_max,
                          priced[i].range.r_min + total_resources);
      point.single.push_back(finalize(priced, std::move(alloc)));
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace resil::contract
