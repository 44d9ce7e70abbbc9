#pragma once

// Closed-form secrecy quantities: Pr(R_ef) as a function of correlation,
// the distribution and mean of the degrees of freedom D, the boundary
// cases at the correlation extremes, and the threshold finder.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "wiretap/channel.hpp"

namespace wiretap::analysis {

// Probability that Eve obtains a given packet error-free across all of
// its (re)transmissions:
//   (1 - eps) / (1 - eps*delta - rho*sqrt(delta eps (1-delta)(1-eps))).
inline double pr_ref(double delta, double epsilon, double rho) {
  if (delta >= 1.0) {
    throw std::invalid_argument("pr_ref: delta = 1 never terminates ARQ");
  }
  if (epsilon >= 1.0) return 0.0;
  if (delta <= 0.0 || epsilon <= 0.0) {
    // Zero variance in one channel: only rho = 0 is meaningful, and the
    // formula degenerates to the independent case.
    return (1.0 - epsilon) / (1.0 - epsilon * delta);
  }
  auto bounds = channel::correlation_bounds(delta, epsilon);
  const double slack = 1e-12;
  if (rho < bounds.rho_min - slack || rho > bounds.rho_max + slack) {
    throw channel::InfeasibleCorrelation(
        "pr_ref: rho outside the feasible interval");
  }
  const double denom =
      1.0 - epsilon * delta - rho * channel::rho_denominator(delta, epsilon);
  return (1.0 - epsilon) / denom;
}

// Pr(R_ef) at the correlation lower bound: (1-eps)/(2-delta-eps) when
// delta + eps > 1, else exactly 1-eps.
inline double pr_ref_at_rho_min(double delta, double epsilon) {
  if (delta + epsilon > 1.0) {
    return (1.0 - epsilon) / (2.0 - delta - epsilon);
  }
  return 1.0 - epsilon;
}

// Pr(R_ef) at the correlation upper bound: (1-eps)/(1-min(delta,eps)).
// Equals 1 when delta >= eps; strictly below 1 when Bob keeps a channel
// advantage.
inline double pr_ref_at_rho_max(double delta, double epsilon) {
  return (1.0 - epsilon) / (1.0 - std::min(delta, epsilon));
}

// E[D] = H(X|Z) = (1 - Pr(R_ef)) k.
inline double expected_d(std::size_t k, double p_ref) {
  return (1.0 - p_ref) * static_cast<double>(k);
}

namespace detail {

inline double log_binom(std::size_t n, std::size_t i) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(i) + 1.0) -
         std::lgamma(static_cast<double>(n - i) + 1.0);
}

}  // namespace detail

// Pr(D >= beta) = 1 - sum_{i=0}^{ceil(beta/alpha)-1} C(eta,i) q^i p^(eta-i)
// with q = 1 - Pr(R_ef). Terms are evaluated in the log domain and
// accumulated with Kahan compensation so eta up to 1e6 stays stable.
inline double pr_d_geq(std::size_t beta, std::size_t eta, std::size_t alpha,
                       double p_ref) {
  if (beta < 1 || beta > alpha * eta) {
    throw std::invalid_argument("pr_d_geq: beta out of [1, alpha*eta]");
  }
  if (p_ref < 0.0 || p_ref > 1.0) {
    throw std::invalid_argument("pr_d_geq: pr_ref out of [0,1]");
  }
  const std::size_t terms = (beta + alpha - 1) / alpha;  // ceil(beta/alpha)
  if (p_ref == 1.0) return 0.0;
  if (p_ref == 0.0) return terms <= eta ? 1.0 : 0.0;

  const double log_q = std::log1p(-p_ref);
  const double log_p = std::log(p_ref);
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < terms; ++i) {
    const double log_term = detail::log_binom(eta, i) +
                            static_cast<double>(i) * log_q +
                            static_cast<double>(eta - i) * log_p;
    const double term = std::exp(log_term);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  if (sum > 1.0) sum = 1.0;
  return 1.0 - sum;
}

struct SecrecyPoint {
  channel::ChannelParams params;
  std::size_t eta;
  std::size_t alpha;
  std::size_t k;
  std::size_t beta;
  double p_ref;
  double expected_dof;
  double pr_d_geq_beta;
};

inline SecrecyPoint evaluate_point(const channel::ChannelParams& params,
                                   std::size_t eta, std::size_t alpha,
                                   std::size_t k, std::size_t beta) {
  SecrecyPoint pt;
  pt.params = params;
  pt.eta = eta;
  pt.alpha = alpha;
  pt.k = k;
  pt.beta = beta;
  pt.p_ref = pr_ref(params.delta, params.epsilon, params.rho);
  pt.expected_dof = expected_d(k, pt.p_ref);
  pt.pr_d_geq_beta = pr_d_geq(beta, eta, alpha, pt.p_ref);
  return pt;
}

inline constexpr double kThresholdTolerance = 1e-6;
inline constexpr int kThresholdMaxIters = 200;

// Correlation threshold: the rho where Pr(D >= beta) crosses `target`.
// Pr(R_ef) is increasing in rho, so Pr(D >= beta) is nonincreasing in
// rho; bisection applies. No crossing over the feasible interval means
// no threshold.
inline std::optional<double> rho_threshold(std::size_t beta, std::size_t eta,
                                           std::size_t alpha, double delta,
                                           double epsilon, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw std::invalid_argument("rho_threshold: target must be in (0,1)");
  }
  auto bounds = channel::correlation_bounds(delta, epsilon);
  auto value = [&](double rho) {
    return pr_d_geq(beta, eta, alpha, pr_ref(delta, epsilon, rho));
  };
  const double at_min = value(bounds.rho_min);
  const double at_max = value(bounds.rho_max);
  if (bounds.rho_max - bounds.rho_min < kThresholdTolerance) {
    return std::nullopt;
  }
  if ((at_min - target) * (at_max - target) > 0.0) return std::nullopt;

  double lo = bounds.rho_min;
  double hi = bounds.rho_max;
  for (int it = 0; it < kThresholdMaxIters && hi - lo > kThresholdTolerance;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace wiretap::analysis
