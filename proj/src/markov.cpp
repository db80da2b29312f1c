#include "resilience/markov.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace resil::markov {

namespace {

// Denominator shared by the stationary closed form and the sensitivity.
double stationary_denominator(const TransitionMatrix& m) {
  const double e = m.epsilon;
  return m.p_fs * (1.0 - e + m.p_sw) + (1.0 - e) * (1.0 - m.p_ss) -
         m.p_ws * m.p_sw;
}

void require_valid(const TransitionMatrix& m) {
  const ValidationReport report = validate_chain(m);
  if (!report.ok()) {
    throw std::invalid_argument("invalid transition matrix: " +
                                report.joined());
  }
}

}  // namespace

Eigen::Matrix3d TransitionMatrix::matrix() const {
  Eigen::Matrix3d p;
  p << p_ss, p_sw, p_sf,
       p_ws, p_ww, p_wf,
       p_fs, 0.0, p_ff;
  return p;
}

TransitionMatrix ChainParams::with_pws(double p_ws) const {
  TransitionMatrix m;
  m.p_ss = p_ss;
  m.p_sw = p_sw;
  m.p_sf = 1.0 - p_ss - p_sw;
  m.p_ws = p_ws;
  m.p_ww = epsilon;
  m.p_wf = 1.0 - epsilon - p_ws;
  m.p_fs = p_fs;
  m.p_ff = 1.0 - p_fs;
  m.epsilon = epsilon;
  return m;
}

std::string ValidationReport::joined() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) out << "; ";
    out << violations[i];
  }
  return out.str();
}

ValidationReport validate_chain(const TransitionMatrix& m) {
  ValidationReport report;
  const double entries[] = {m.p_ss, m.p_sw, m.p_sf, m.p_ws,
                            m.p_ww, m.p_wf, m.p_fs, m.p_ff};
  for (double p : entries) {
    if (!(p >= 0.0 && p <= 1.0)) {
      report.violations.push_back("probability out of [0,1]");
      break;
    }
  }
  if (std::abs(m.p_ss + m.p_sw + m.p_sf - 1.0) > kRowSumTol)
    report.violations.push_back("success row does not sum to 1");
  if (std::abs(m.p_ws + m.p_ww + m.p_wf - 1.0) > kRowSumTol)
    report.violations.push_back("warning row does not sum to 1");
  if (std::abs(m.p_fs + m.p_ff - 1.0) > kRowSumTol)
    report.violations.push_back("failure row does not sum to 1");
  if (std::abs(m.p_ww - m.epsilon) > kRowSumTol)
    report.violations.push_back("p_ww differs from configured epsilon");
  if (!(m.p_sw > 0.0))
    report.violations.push_back("warning state isolated (p_sw = 0)");
  if (!(m.p_fs > 0.0))
    report.violations.push_back("not recoverable (p_fs = 0)");
  return report;
}

Eigen::Vector3d n_step_distribution(const Eigen::Vector3d& u0,
                                    const TransitionMatrix& m, int n) {
  if (n < 0) throw std::invalid_argument("step count must be non-negative");
  if (u0.minCoeff() < 0.0 || std::abs(u0.sum() - 1.0) > kRowSumTol)
    throw std::invalid_argument("initial distribution is not a probability vector");
  require_valid(m);
  Eigen::RowVector3d u = u0.transpose();
  const Eigen::Matrix3d p = m.matrix();
  for (int i = 0; i < n; ++i) u = u * p;
  return u.transpose();
}

StationaryDistribution stationary_closed_form(const TransitionMatrix& m) {
  require_valid(m);
  const double e = m.epsilon;
  const double d = stationary_denominator(m);
  if (!(d > 0.0))
    throw std::runtime_error("internal inconsistency: degenerate stationary denominator");
  StationaryDistribution v;
  v.v_s = (1.0 - e) * m.p_fs / d;
  v.v_w = m.p_fs * m.p_sw / d;
  v.v_f = 1.0 - m.p_fs * (1.0 - e + m.p_sw) / d;
  return v;
}

PowerIterationResult stationary_power_iteration(const TransitionMatrix& m,
                                                double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  require_valid(m);
  const Eigen::Matrix3d p = m.matrix();
  Eigen::Matrix3d power = p;
  for (int n = 1; n <= max_iter; ++n) {
    const double spread =
        (power.colwise().maxCoeff() - power.colwise().minCoeff()).maxCoeff();
    if (spread < tol) {
      PowerIterationResult result;
      const Eigen::RowVector3d row = power.colwise().mean();
      result.dist = {row(0), row(1), row(2)};
      result.iterations = n;
      return result;
    }
    power = power * p;
  }
  throw std::runtime_error("power iteration did not converge (irregular matrix?)");
}

double resilience(const TransitionMatrix& m) {
  return 1.0 / stationary_closed_form(m).v_f;
}

ResilienceProfile resilience_index(const TransitionMatrix& m) {
  const StationaryDistribution v = stationary_closed_form(m);
  TransitionMatrix best = m;
  best.p_ws = 1.0 - m.epsilon;
  best.p_wf = 0.0;
  const StationaryDistribution v_best = stationary_closed_form(best);
  ResilienceProfile profile;
  profile.gamma = 1.0 / v.v_f;
  profile.v_f_min = v_best.v_f;
  profile.gamma_max = 1.0 / v_best.v_f;
  profile.theta = v_best.v_f / v.v_f;
  return profile;
}

double failure_sensitivity(const TransitionMatrix& m) {
  require_valid(m);
  const double e = m.epsilon;
  const double d = stationary_denominator(m);
  return -m.p_fs * m.p_sw * (1.0 - e + m.p_sw) / (d * d);
}

}  // namespace resil::markov
