#include "resilience/scenario.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace resil::scenario {

namespace {

using nlohmann::json;

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << "scenario validation failed:";
  for (const std::string& issue : issues) out << "\n  " << issue;
  return out.str();
}

// Shortest round-trip decimal rendering.
std::string full_precision(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

// 9 significant digits for series output.
std::string series_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

  const json* object(const json& parent, const std::string& path,
                     const char* key) {
    if (!parent.contains(key)) {
      issues_.push_back(path + "." + key + ": missing");
      return nullptr;
    }
    return &parent.at(key);
  }

  double number(const json& parent, const std::string& path, const char* key,
                double fallback = 0.0) {
    if (!parent.contains(key)) {
      issues_.push_back(path + "." + key + ": missing");
      return fallback;
    }
    const json& value = parent.at(key);
    if (!value.is_number()) {
      issues_.push_back(path + "." + key + ": not a number");
      return fallback;
    }
    return value.get<double>();
  }

  std::string text(const json& parent, const std::string& path, const char* key) {
    if (!parent.contains(key) || !parent.at(key).is_string()) {
      issues_.push_back(path + "." + key + ": missing or not a string");
      return {};
    }
    return parent.at(key).get<std::string>();
  }

 private:
  std::vector<std::string>& issues_;
};

bayes::BayesNetwork read_network(const json& spec, const std::string& path,
                                 Reader& reader,
                                 std::vector<std::string>& issues) {
  bayes::BayesNetwork net;
  net.failure_node = reader.text(spec, path, "failure_node");
  if (!spec.contains("nodes") || !spec.at("nodes").is_array()) {
    issues.push_back(path + ".nodes: missing or not an array");
    return net;
  }
  std::size_t index = 0;
  for (const json& entry : spec.at("nodes")) {
    const std::string node_path = path + ".nodes[" + std::to_string(index++) + "]";
    bayes::Node node;
    node.name = reader.text(entry, node_path, "name");
    if (entry.contains("parents")) {
      if (!entry.at("parents").is_array()) {
        issues.push_back(node_path + ".parents: not an array");
      } else {
        for (const json& parent : entry.at("parents")) {
          if (!parent.is_string())
            issues.push_back(node_path + ".parents: entry is not a string");
          else
            node.cpt.parents.push_back(parent.get<std::string>());
        }
      }
    }
    if (!entry.contains("p_true") || !entry.at("p_true").is_array()) {
      issues.push_back(node_path + ".p_true: missing or not an array");
    } else {
      for (const json& p : entry.at("p_true")) {
        if (!p.is_number())
          issues.push_back(node_path + ".p_true: entry is not a number");
        else
          node.cpt.true_probabilities.push_back(p.get<double>());
      }
    }
    net.nodes.push_back(std::move(node));
  }
  return net;
}

void validate_ci(const CiSpec& ci, const std::string& path,
                 std::vector<std::string>& issues) {
  if (ci.name.empty()) issues.push_back(path + ".name: empty");
  const MarkovParams& m = ci.markov;
  const std::string mpath = path + ".markov";
  for (const auto& [label, value] :
       {std::pair{"p_ss", m.p_ss}, {"p_sw", m.p_sw}, {"p_sf", m.p_sf},
        std::pair{"p_fs", m.p_fs}}) {
    if (!(value >= 0.0 && value <= 1.0))
      issues.push_back(mpath + "." + label + ": outside [0,1]");
  }
  if (std::abs(m.p_ss + m.p_sw + m.p_sf - 1.0) > markov::kRowSumTol)
    issues.push_back(mpath + ": success row does not sum to 1");
  if (!(m.p_sw > 0.0)) issues.push_back(mpath + ".p_sw: must be positive");
  if (!(m.p_fs > 0.0)) issues.push_back(mpath + ".p_fs: must be positive");
  if (!(m.epsilon > 0.0 && m.epsilon < 1.0))
    issues.push_back(mpath + ".epsilon: outside (0,1)");

  const CiEconomics& e = ci.economics;
  const std::string epath = path + ".economics";
  for (const auto& [label, value] :
       {std::pair{"alpha_d", e.alpha_d}, {"alpha_f", e.alpha_f},
        {"n_hours", e.n_hours}, std::pair{"power_mw", e.power_mw}}) {
    if (!(value >= 0.0)) issues.push_back(epath + "." + label + ": negative");
  }

  const bayes::ValidationReport net_report = bayes::validate_network(ci.network);
  for (const std::string& violation : net_report.violations)
    issues.push_back(path + ".network: " + violation);
  if (net_report.ok() && m.epsilon > 0.0 && m.epsilon < 1.0) {
    const double prior = bayes::prior_marginal(ci.network, ci.network.failure_node);
    if (1.0 - m.epsilon - prior < 0.0)
      issues.push_back(path + ": derived P_WS negative (prior failure " +
                       series_number(prior) + " exceeds 1 - epsilon)");
  }
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

Scenario load_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, /*allow_exceptions=*/true,
                      /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError({std::string("parse error: ") + e.what()});
  }

  std::vector<std::string> issues;
  Reader reader(issues);
  Scenario s;

  if (const json* system = reader.object(doc, "$", "system")) {
    s.system.alpha_r = reader.number(*system, "system", "alpha_r");
    s.system.unit_cost_c = reader.number(*system, "system", "unit_cost_c");
    const double r = reader.number(*system, "system", "total_resources");
    if (r < 0.0 || r != std::floor(r))
      issues.push_back("system.total_resources: not a non-negative integer");
    else
      s.system.total_resources = static_cast<int>(r);
    if (s.system.alpha_r < 0.0) issues.push_back("system.alpha_r: negative");
    if (s.system.unit_cost_c < 0.0)
      issues.push_back("system.unit_cost_c: negative");
  }

  if (!doc.contains("cis") || !doc.at("cis").is_array() || doc.at("cis").empty()) {
    issues.push_back("cis: at least one CI is required");
  } else {
    std::size_t index = 0;
    for (const json& entry : doc.at("cis")) {
      const std::string path = "cis[" + std::to_string(index++) + "]";
      const std::size_t issues_before = issues.size();
      CiSpec ci;
      ci.name = reader.text(entry, path, "name");
      if (const json* m = reader.object(entry, path, "markov")) {
        const std::string mpath = path + ".markov";
        ci.markov.p_ss = reader.number(*m, mpath, "p_ss");
        ci.markov.p_sw = reader.number(*m, mpath, "p_sw");
        ci.markov.p_sf = reader.number(*m, mpath, "p_sf");
        ci.markov.p_fs = reader.number(*m, mpath, "p_fs");
        ci.markov.epsilon = reader.number(*m, mpath, "epsilon", 0.1);
      }
      if (const json* e = reader.object(entry, path, "economics")) {
        const std::string epath = path + ".economics";
        ci.economics.alpha_d = reader.number(*e, epath, "alpha_d");
        ci.economics.alpha_f = reader.number(*e, epath, "alpha_f");
        ci.economics.n_hours = reader.number(*e, epath, "n_hours");
        ci.economics.power_mw = reader.number(*e, epath, "power_mw");
      }
      if (const json* n = reader.object(entry, path, "network"))
        ci.network = read_network(*n, path + ".network", reader, issues);
      // Semantic checks only make sense once this CI's fields all read.
      if (issues.size() == issues_before) validate_ci(ci, path, issues);
      s.cis.push_back(std::move(ci));
    }
  }

  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({"cannot open scenario file: " + path});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

std::string emit_scenario(const Scenario& s) {
  json doc;
  doc["system"] = {{"alpha_r", s.system.alpha_r},
                   {"unit_cost_c", s.system.unit_cost_c},
                   {"total_resources", s.system.total_resources}};
  doc["cis"] = json::array();
  for (const CiSpec& ci : s.cis) {
    json entry;
    entry["name"] = ci.name;
    entry["markov"] = {{"p_ss", ci.markov.p_ss}, {"p_sw", ci.markov.p_sw},
                       {"p_sf", ci.markov.p_sf}, {"p_fs", ci.markov.p_fs},
                       {"epsilon", ci.markov.epsilon}};
    entry["economics"] = {{"alpha_d", ci.economics.alpha_d},
                          {"alpha_f", ci.economics.alpha_f},
                          {"n_hours", ci.economics.n_hours},
                          {"power_mw", ci.economics.power_mw}};
    json nodes = json::array();
    for (const bayes::Node& node : ci.network.nodes) {
      nodes.push_back({{"name", node.name},
                       {"parents", node.cpt.parents},
                       {"p_true", node.cpt.true_probabilities}});
    }
    entry["network"] = {{"failure_node", ci.network.failure_node},
                        {"nodes", std::move(nodes)}};
    doc["cis"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

contract::EconomicParams economic_params(const Scenario& s, const CiSpec& ci) {
  contract::EconomicParams e;
  e.alpha_d = ci.economics.alpha_d;
  e.alpha_f = ci.economics.alpha_f;
  e.alpha_r = s.system.alpha_r;
  e.n_hours = ci.economics.n_hours;
  e.power_mw = ci.economics.power_mw;
  e.unit_cost_c = s.system.unit_cost_c;
  return e;
}

std::vector<contract::CiEvaluation> evaluate(const Scenario& s) {
  std::vector<contract::CiEvaluation> evaluations;
  for (const CiSpec& ci : s.cis)
    evaluations.push_back(contract::evaluate_ci(
        ci.name, ci.markov.chain(), ci.network, economic_params(s, ci)));
  return evaluations;
}

std::string emit_report(const contract::AllocationResult& result,
                        const std::vector<contract::CiEvaluation>& cis,
                        ReportFormat format) {
  double mean_before = 0.0, mean_after = 0.0;
  for (std::size_t i = 0; i < cis.size(); ++i) {
    mean_before += result.theta_before[i];
    mean_after += result.theta_after[i];
  }
  mean_before /= static_cast<double>(cis.size());
  mean_after /= static_cast<double>(cis.size());
  const double resilience_utility =
      contract::average_resilience_utility(result, cis);

  if (format == ReportFormat::table) {
    std::ostringstream out;
    out << "name,allocated,r_min,r_max,utility,theta_before,theta_after\n";
    for (std::size_t i = 0; i < cis.size(); ++i) {
      out << cis[i].name << ',' << result.allocation[i] << ','
          << cis[i].range.r_min << ',' << cis[i].range.r_max << ','
          << full_precision(result.ci_utility[i]) << ','
          << full_precision(result.theta_before[i]) << ','
          << full_precision(result.theta_after[i]) << '\n';
    }
    int sum_min = 0, sum_max = 0;
    for (const contract::CiEvaluation& ci : cis) {
      sum_min += ci.range.r_min;
      sum_max += ci.range.r_max;
    }
    out << "system," << result.total_allocated << ',' << sum_min << ','
        << sum_max << ',' << full_precision(result.principal_utility) << ','
        << full_precision(mean_before) << ',' << full_precision(mean_after)
        << '\n';
    return out.str();
  }
  if (format == ReportFormat::tree) {
    json doc;
    doc["cis"] = json::array();
    for (std::size_t i = 0; i < cis.size(); ++i) {
      doc["cis"].push_back({{"name", cis[i].name},
                            {"allocated", result.allocation[i]},
                            {"r_min", cis[i].range.r_min},
                            {"r_max", cis[i].range.r_max},
                            {"utility", result.ci_utility[i]},
                            {"theta_before", result.theta_before[i]},
                            {"theta_after", result.theta_after[i]}});
    }
    doc["system"] = {{"total_allocated", result.total_allocated},
                     {"principal_utility", result.principal_utility},
                     {"average_theta_before", mean_before},
                     {"average_theta_after", mean_after},
                     {"average_resilience_utility", resilience_utility}};
    return doc.dump(2) + "\n";
  }
  throw std::invalid_argument("unsupported report format");
}

namespace {

// k-indexed curve columns, clamped at each CI's component count.
std::string curve_series(
    const std::vector<contract::CiEvaluation>& evaluations,
    const std::string& column_prefix,
    const std::function<double(const contract::CiEvaluation&, int)>& value,
    bool with_cost = false, double unit_cost = 0.0) {
  int max_units = 0;
  for (const contract::CiEvaluation& ci : evaluations)
    max_units = std::max(max_units, ci.benefit.max_units());
  std::ostringstream out;
  out << "k";
  if (with_cost) out << ",cost";
  for (const contract::CiEvaluation& ci : evaluations)
    out << ',' << column_prefix << '_' << ci.name;
  out << '\n';
  for (int k = 0; k <= max_units; ++k) {
    out << k;
    if (with_cost) out << ',' << series_number(unit_cost * k);
    for (const contract::CiEvaluation& ci : evaluations)
      out << ',' << series_number(value(ci, std::min(k, ci.benefit.max_units())));
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string emit_series(const std::string& kind, const Scenario& s,
                        const SeriesOptions& options) {
  if (kind == "theta-vs-pws") {
    constexpr int kPoints = 50;
    std::ostringstream out;
    out << "pws_over_max";
    for (const CiSpec& ci : s.cis) out << ",theta_" << ci.name;
    out << '\n';
    for (int i = 1; i <= kPoints; ++i) {
      const double x = static_cast<double>(i) / kPoints;
      out << series_number(x);
      for (const CiSpec& ci : s.cis) {
        const markov::ChainParams chain = ci.markov.chain();
        const double pws = x * (1.0 - chain.epsilon);
        out << ',' << series_number(
                          markov::resilience_index(chain.with_pws(pws)).theta);
      }
      out << '\n';
    }
    return out.str();
  }
  if (kind == "convergence") {
    std::ostringstream out;
    out << "ci_index,name,iterations,v_s,v_w,v_f\n";
    int index = 1;
    for (const CiSpec& ci : s.cis) {
      const double prior =
          bayes::prior_marginal(ci.network, ci.network.failure_node);
      const markov::TransitionMatrix m =
          ci.markov.chain().with_pws(1.0 - ci.markov.epsilon - prior);
      const markov::PowerIterationResult r =
          markov::stationary_power_iteration(m, 1e-3);
      out << index++ << ',' << ci.name << ',' << r.iterations << ','
          << series_number(r.dist.v_s) << ',' << series_number(r.dist.v_w)
          << ',' << series_number(r.dist.v_f) << '\n';
    }
    return out.str();
  }

  const std::vector<contract::CiEvaluation> evaluations = evaluate(s);
  if (kind == "failure-improvement")
    return curve_series(evaluations, "v_f", [](const auto& ci, int k) {
      return ci.v_f[static_cast<std::size_t>(k)];
    });
  if (kind == "benefit-vs-cost")
    return curve_series(
        evaluations, "benefit",
        [](const auto& ci, int k) {
          return ci.econ.alpha_d * ci.benefit.values[static_cast<std::size_t>(k)] *
                 ci.econ.n_hours * ci.econ.power_mw;
        },
        /*with_cost=*/true, s.system.unit_cost_c);
  if (kind == "dam-utility")
    return curve_series(evaluations, "utility", [](const auto& ci, int k) {
      return contract::dam_utility(ci.benefit, ci.econ, k);
    });
  if (kind == "principal-per-dam")
    return curve_series(evaluations, "z", [](const auto& ci, int k) {
      return contract::principal_term(ci.benefit, ci.econ, k);
    });
  if (kind == "resilience-vs-resources")
    return curve_series(evaluations, "theta", [](const auto& ci, int k) {
      return ci.theta[static_cast<std::size_t>(k)];
    });
  if (kind == "reward-sweep") {
    if (options.costs.empty())
      throw std::invalid_argument("reward-sweep requires a cost list");
    const int pool = options.resources >= 0 ? options.resources
                                            : s.system.total_resources;
    const std::vector<contract::SweepPoint> points =
        contract::reward_sweep(evaluations, pool, options.costs);
    std::ostringstream out;
    out << "cost,full_utility,full_avg_theta,full_resilience_utility";
    for (const auto& ci : evaluations) out << ",full_alloc_" << ci.name;
    out << ",partial_utility,partial_avg_theta,partial_resilience_utility";
    for (const auto& ci : evaluations) out << ",partial_alloc_" << ci.name;
    for (const auto& ci : evaluations) out << ",single_utility_" << ci.name;
    out << '\n';
    for (const contract::SweepPoint& point : points) {
      out << series_number(point.cost);
      auto mean = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return sum / static_cast<double>(v.size());
      };
      if (point.full_feasible) {
        out << ',' << series_number(point.full.principal_utility) << ','
            << series_number(mean(point.full.theta_after)) << ','
            << series_number(mean(point.full.theta_after) *
                             point.full.principal_utility);
        for (int k : point.full.allocation) out << ',' << k;
      } else {
        out << ",nan,nan,nan";
        for (std::size_t i = 0; i < evaluations.size(); ++i) out << ",nan";
      }
      out << ',' << series_number(point.partial.principal_utility) << ','
          << series_number(mean(point.partial.theta_after)) << ','
          << series_number(mean(point.partial.theta_after) *
                           point.partial.principal_utility);
      for (int k : point.partial.allocation) out << ',' << k;
      for (const contract::AllocationResult& single : point.single)
        out << ',' << series_number(single.principal_utility);
      out << '\n';
    }
    return out.str();
  }
  throw std::invalid_argument("unknown series kind: " + kind);
}

}  // namespace resil::scenario
