#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace resil::markov {

/// Three-state CI performance chain (success / warning / failure).
/// The failure->warning transition is structurally zero and therefore
/// not represented.
struct TransitionMatrix {
  double p_ss = 0.0, p_sw = 0.0, p_sf = 0.0;
  double p_ws = 0.0, p_ww = 0.0, p_wf = 0.0;
  double p_fs = 0.0, p_ff = 0.0;
  double epsilon = 0.1;  // configured value of p_ww

  Eigen::Matrix3d matrix() const;
};

/// Base chain parameters with the warning row left open; the warning row
/// is closed as p_wf = 1 - epsilon - p_ws once p_ws is known.
struct ChainParams {
  double p_ss = 0.0;
  double p_sw = 0.0;
  double p_fs = 0.0;
  double epsilon = 0.1;

  TransitionMatrix with_pws(double p_ws) const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string joined() const;
};

struct StationaryDistribution {
  double v_s = 0.0, v_w = 0.0, v_f = 0.0;
};

struct PowerIterationResult {
  StationaryDistribution dist;
  int iterations = 0;
};

struct ResilienceProfile {
  double gamma = 0.0;
  double gamma_max = 0.0;
  double v_f_min = 0.0;
  double theta = 0.0;
};

inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kDefaultPowerTol = 1e-12;
inline constexpr int kDefaultMaxIter = 10000;

ValidationReport validate_chain(const TransitionMatrix& m);

/// Distribution after n steps: u0 * P^n.
Eigen::Vector3d n_step_distribution(const Eigen::Vector3d& u0,
                                    const TransitionMatrix& m, int n);

/// Closed-form stationary distribution of a valid chain.
StationaryDistribution stationary_closed_form(const TransitionMatrix& m);

/// Repeated squaring-free power iteration on P until the rows of P^n agree
/// within tol. Serves as the independent oracle for the closed form.
PowerIterationResult stationary_power_iteration(
    const TransitionMatrix& m, double tol = kDefaultPowerTol,
    int max_iter = kDefaultMaxIter);

/// Resilience gamma = 1 / v_f.
double resilience(const TransitionMatrix& m);

/// Resilience index theta = v_f_min / v_f where v_f_min is reached at
/// p_ws = 1 - epsilon.
ResilienceProfile resilience_index(const TransitionMatrix& m);

/// d(v_f)/d(p_ws); strictly negative on valid chains.
double failure_sensitivity(const TransitionMatrix& m);

}  // namespace resil::markov
