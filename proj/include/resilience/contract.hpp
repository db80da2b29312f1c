#pragma once

#include "resilience/bayes.hpp"
#include "resilience/markov.hpp"

#include <string>
#include <vector>

namespace resil::contract {

struct EconomicParams {
  double alpha_d = 0.0;      // day-ahead energy price, $/MWh
  double alpha_f = 0.0;      // failure-time real-time price, $/MWh
  double alpha_r = 0.0;      // normal real-time price, $/MWh
  double n_hours = 0.0;      // expected hours out of service
  double power_mw = 0.0;     // contracted power
  double unit_cost_c = 0.0;  // reward per resource unit
};

/// Per-CI resilience improvement B(0..K); B(k) is the reduction of the
/// long-run failure probability after securing the k top-ranked components.
struct BenefitSequence {
  std::vector<double> values;
  int max_units() const { return static_cast<int>(values.size()) - 1; }
};

struct FeasibleRange {
  int r_min = 0;
  int r_max = 0;
};

/// Everything the allocators need to know about one CI.
struct CiEvaluation {
  std::string name;
  BenefitSequence benefit;
  EconomicParams econ;
  FeasibleRange range;
  std::vector<double> v_f;    // stationary failure probability per k
  std::vector<double> theta;  // resilience index per k
  double v_f_min = 0.0;
  std::vector<bayes::NodeId> secured_order;  // ranked components
};

struct AllocationResult {
  std::vector<int> allocation;
  double principal_utility = 0.0;
  std::vector<double> ci_utility;
  std::vector<double> theta_before;
  std::vector<double> theta_after;
  int total_allocated = 0;
};

enum class AllocMode { full, partial };
enum class AllocMethod { exact, exchange };

struct SweepPoint {
  double cost = 0.0;
  bool full_feasible = false;
  AllocationResult full;
  AllocationResult partial;
  std::vector<AllocationResult> single;  // all resources to one CI
};

/// Benefit sequence from the component ranking: fix the top-k roots as
/// false evidence, rebuild the chain with the updated warning row, and
/// take the drop in the stationary failure probability.
BenefitSequence benefit_sequence(const bayes::BayesNetwork& net,
                                 const markov::ChainParams& chain);

/// Dam-side contract utility for k units.
double dam_utility(const BenefitSequence& b, const EconomicParams& e, int k);

/// Principal's per-dam objective term for k units.
double principal_term(const BenefitSequence& b, const EconomicParams& e, int k);

FeasibleRange feasible_range(const BenefitSequence& b, const EconomicParams& e);

CiEvaluation evaluate_ci(const std::string& name,
                         const markov::ChainParams& chain,
                         const bayes::BayesNetwork& net,
                         const EconomicParams& econ);

/// Staged exchange procedure: grant the best dam its maximum feasible
/// amount, park the remainder, then shift batches between dams while a
/// marginal gain exists.
AllocationResult allocate_exchange(const std::vector<CiEvaluation>& cis, int total_resources);

/// Exact optimum via a stage-by-dam resources-used table.
AllocationResult allocate_exact(const std::vector<CiEvaluation>& cis, int total_resources,
                                AllocMode mode);

double principal_utility(const AllocationResult& result,
                         const std::vector<CiEvaluation>& cis);

/// Mean post-allocation resilience index times the principal utility.
double average_resilience_utility(const AllocationResult& result,
                                  const std::vector<CiEvaluation>& cis);

/// Re-solve full, partial and single-dam allocations for each unit cost.
std::vector<SweepPoint> reward_sweep(const std::vector<CiEvaluation>& cis,
                                     int total_resources,
                                     const std::vector<double>& c_values);

}  // namespace resil::contract
