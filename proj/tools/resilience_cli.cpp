// Command-line front end: validate scenarios, analyze chains, rank
// components, allocate resources, run reward sweeps, emit figure series.
#include "resilience/bayes.hpp"
#include "resilience/contract.hpp"
#include "resilience/markov.hpp"
#include "resilience/scenario.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace resil;

bool debug_enabled() {
  const char* level = std::getenv("RESIL_LOG");
  return level != nullptr && std::string(level) == "debug";
}

void debug(const std::string& message) {
  if (debug_enabled()) std::cerr << "[resilience] " << message << "\n";
}

std::string fmt(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_output(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + output_path);
  out << text;
}

std::string analyze_text(const scenario::Scenario& s, bool tree) {
  std::ostringstream table;
  table << "name,p_wf_prior,p_ws,v_s,v_w,v_f,gamma,gamma_max,v_f_min,theta,"
           "sensitivity\n";
  std::ostringstream json_rows;
  for (const scenario::CiSpec& ci : s.cis) {
    const double prior =
        bayes::prior_marginal(ci.network, ci.network.failure_node);
    const double p_ws = 1.0 - ci.markov.epsilon - prior;
    const markov::TransitionMatrix m = ci.markov.chain().with_pws(p_ws);
    const markov::StationaryDistribution v = markov::stationary_closed_form(m);
    const markov::ResilienceProfile profile = markov::resilience_index(m);
    const double sensitivity = markov::failure_sensitivity(m);
    if (tree) {
      if (json_rows.tellp() > 0) json_rows << ",\n";
      json_rows << "    {\"name\": \"" << ci.name << "\", \"p_wf_prior\": "
                << fmt(prior) << ", \"p_ws\": " << fmt(p_ws)
                << ", \"v_s\": " << fmt(v.v_s) << ", \"v_w\": " << fmt(v.v_w)
                << ", \"v_f\": " << fmt(v.v_f)
                << ", \"gamma\": " << fmt(profile.gamma)
                << ", \"gamma_max\": " << fmt(profile.gamma_max)
                << ", \"v_f_min\": " << fmt(profile.v_f_min)
                << ", \"theta\": " << fmt(profile.theta)
                << ", \"sensitivity\": " << fmt(sensitivity) << "}";
    } else {
      table << ci.name << ',' << fmt(prior) << ',' << fmt(p_ws) << ','
            << fmt(v.v_s) << ',' << fmt(v.v_w) << ',' << fmt(v.v_f) << ','
            << fmt(profile.gamma) << ',' << fmt(profile.gamma_max) << ','
            << fmt(profile.v_f_min) << ',' << fmt(profile.theta) << ','
            << fmt(sensitivity) << '\n';
    }
  }
  if (tree) return "{\n  \"cis\": [\n" + json_rows.str() + "\n  ]\n}\n";
  return table.str();
}

std::string rank_text(const scenario::Scenario& s) {
  std::ostringstream out;
  out << "ci,position,component,effect,baseline\n";
  for (const scenario::CiSpec& ci : s.cis) {
    const bayes::ComponentRanking ranking = bayes::rank_components(ci.network);
    char effect[64], baseline[64];
    std::snprintf(baseline, sizeof baseline, "%.9g", ranking.baseline);
    int position = 1;
    for (const auto& entry : ranking.entries) {
      std::snprintf(effect, sizeof effect, "%.9g", entry.effect);
      out << ci.name << ',' << position++ << ',' << entry.root << ',' << effect
          << ',' << baseline << '\n';
    }
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical-infrastructure resilience analysis and resource allocation"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string output_path;
  std::string format = "table";
  int resources = -1;
  std::string mode = "full";
  std::string method = "exact";
  std::string kind;
  std::vector<double> costs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "Scenario file")->required();
    cmd->add_option("--output", output_path, "Write output to a file");
  };

  CLI::App* validate = app.add_subcommand("validate", "Validate a scenario file");
  add_common(validate);

  CLI::App* analyze = app.add_subcommand("analyze", "Per-CI chain analysis");
  add_common(analyze);
  analyze->add_option("--format", format)
      ->check(CLI::IsMember({"table", "tree"}));

  CLI::App* rank = app.add_subcommand("rank", "Rank components per CI");
  add_common(rank);

  CLI::App* allocate = app.add_subcommand("allocate", "Allocate resources");
  add_common(allocate);
  allocate->add_option("--resources", resources, "Resource pool override");
  allocate->add_option("--mode", mode)->check(CLI::IsMember({"full", "partial"}));
  allocate->add_option("--method", method)
      ->check(CLI::IsMember({"exact", "exchange"}));
  allocate->add_option("--format", format)
      ->check(CLI::IsMember({"table", "tree"}));

  CLI::App* sweep = app.add_subcommand("sweep", "Reward sweep over unit costs");
  add_common(sweep);
  sweep->add_option("--costs", costs, "Unit costs to sweep")
      ->required()
      ->delimiter(',');
  sweep->add_option("--resources", resources, "Resource pool override");

  CLI::App* series = app.add_subcommand("series", "Emit a figure series");
  add_common(series);
  series->add_option("--kind", kind, "Series kind")
      ->required()
      ->check(CLI::IsMember({"theta-vs-pws", "convergence", "failure-improvement",
                             "benefit-vs-cost", "dam-utility", "principal-per-dam",
                             "resilience-vs-resources", "reward-sweep"}));
  series->add_option("--costs", costs, "Unit costs (reward-sweep)")
      ->delimiter(',');
  series->add_option("--resources", resources, "Resource pool override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    const scenario::Scenario s = scenario::load_scenario_file(scenario_path);
    debug("loaded scenario with " + std::to_string(s.cis.size()) + " CIs");

    if (app.got_subcommand(validate)) {
      write_output("ok: " + std::to_string(s.cis.size()) + " CIs\n", output_path);
      return 0;
    }
    if (app.got_subcommand(analyze)) {
      write_output(analyze_text(s, format == "tree"), output_path);
      return 0;
    }
    if (app.got_subcommand(rank)) {
      write_output(rank_text(s), output_path);
      return 0;
    }
    if (app.got_subcommand(allocate)) {
      const std::vector<contract::CiEvaluation> evals = scenario::evaluate(s);
      const int pool = resources >= 0 ? resources : s.system.total_resources;
      contract::AllocationResult result;
      if (method == "exchange") {
        result = contract::allocate_exchange(evals, pool);
      } else {
        result = contract::allocate_exact(evals, pool,
                                          mode == "partial"
                                              ? contract::AllocMode::partial
                                              : contract::AllocMode::full);
      }
      write_output(scenario::emit_report(result, evals,
                                         format == "tree"
                                             ? scenario::ReportFormat::tree
                                             : scenario::ReportFormat::table),
                   output_path);
      return 0;
    }
    if (app.got_subcommand(sweep)) {
      scenario::SeriesOptions options;
      options.costs = costs;
      options.resources = resources;
      write_output(scenario::emit_series("reward-sweep", s, options), output_path);
      return 0;
    }
    if (app.got_subcommand(series)) {
      scenario::SeriesOptions options;
      options.costs = costs;
      options.resources = resources;
      write_output(scenario::emit_series(kind, s, options), output_path);
      return 0;
    }
  } catch (const scenario::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
