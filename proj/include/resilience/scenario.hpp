#pragma once

#include "resilience/bayes.hpp"
#include "resilience/contract.hpp"
#include "resilience/markov.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace resil::scenario {

struct SystemParams {
  double alpha_r = 0.0;
  double unit_cost_c = 0.0;
  int total_resources = 0;
};

/// Chain parameters as stored in a scenario. The warning row is never
/// stored; p_ws is derived from the network's prior failure probability.
struct MarkovParams {
  double p_ss = 0.0;
  double p_sw = 0.0;
  double p_sf = 0.0;
  double p_fs = 0.0;
  double epsilon = 0.1;

  markov::ChainParams chain() const { return {p_ss, p_sw, p_fs, epsilon}; }
};

struct CiEconomics {
  double alpha_d = 0.0;
  double alpha_f = 0.0;
  double n_hours = 0.0;
  double power_mw = 0.0;
};

struct CiSpec {
  std::string name;
  MarkovParams markov;
  bayes::BayesNetwork network;
  CiEconomics economics;
};

struct Scenario {
  SystemParams system;
  std::vector<CiSpec> cis;
};

/// Carries every validation finding, each prefixed with the path of the
/// offending field.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

/// Serialize a scenario; load_scenario(emit_scenario(s)) is the identity
/// on all numeric fields.
std::string emit_scenario(const Scenario& s);

/// Full pipeline from scenario to per-CI contract inputs.
std::vector<contract::CiEvaluation> evaluate(const Scenario& s);

contract::EconomicParams economic_params(const Scenario& s, const CiSpec& ci);

enum class ReportFormat { table, tree };

std::string emit_report(const contract::AllocationResult& result,
                        const std::vector<contract::CiEvaluation>& cis,
                        ReportFormat format);

struct SeriesOptions {
  std::vector<double> costs;  // reward-sweep only
  int resources = -1;         // overrides the scenario pool when >= 0
};

/// Figure-series tables: comma-separated, one header line, monotonic x.
std::string emit_series(const std::string& kind, const Scenario& s,
                        const SeriesOptions& options = {});

}  // namespace resil::scenario
