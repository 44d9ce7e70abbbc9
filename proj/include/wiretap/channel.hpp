#pragma once

// Correlated Bernoulli erasure pair (E_m, E_w) for one packet transmission:
// feasible correlation range, joint law construction, and sampling.

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace wiretap::channel {

struct DegenerateMarginal : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InfeasibleCorrelation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ChannelParams {
  double delta;    // Pr(E_m = 1), main-channel erasure probability
  double epsilon;  // Pr(E_w = 1), wiretap-channel erasure probability
  double rho;      // Pearson correlation between E_m and E_w
};

struct CorrelationBounds {
  double rho_min;
  double rho_max;
};

// Joint law of (E_m, E_w); p_ij = Pr(E_m = i, E_w = j).
struct JointErasureDist {
  double p00;
  double p01;
  double p10;
  double p11;

  double delta() const { return p10 + p11; }
  double epsilon() const { return p01 + p11; }
};

namespace detail {

// Probabilities may leave [0,1] by this much at the exact feasibility
// bounds; they are clamped after the check.
inline constexpr double kFeasibilityTol = 1e-9;

inline double clamp01(double p) {
  if (p < 0.0) return 0.0;
  if (p > 1.0) return 1.0;
  return p;
}

inline void require_open_unit(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DegenerateMarginal(std::string(name) +
                             " must lie strictly inside (0,1)");
  }
}

}  // namespace detail

inline double rho_denominator(double delta, double epsilon) {
  return std::sqrt(delta * epsilon * (1.0 - delta) * (1.0 - epsilon));
}

// Feasible correlation interval implied by the p11 bounds
// max(delta+epsilon-1, 0) <= p11 <= min(delta, epsilon).
inline CorrelationBounds correlation_bounds(double delta, double epsilon) {
  detail::require_open_unit(delta, "delta");
  detail::require_open_unit(epsilon, "epsilon");
  const double denom = rho_denominator(delta, epsilon);
  const double p11_lo = std::max(delta + epsilon - 1.0, 0.0);
  const double p11_hi = std::min(delta, epsilon);
  return {(p11_lo - delta * epsilon) / denom,
          (p11_hi - delta * epsilon) / denom};
}

// Builds the joint law from (delta, epsilon, rho) via
// p11 = rho * sqrt(delta eps (1-delta)(1-eps)) + delta eps.
inline JointErasureDist joint_from_rho(const ChannelParams& params) {
  detail::require_open_unit(params.delta, "delta");
  detail::require_open_unit(params.epsilon, "epsilon");
  const double d = params.delta;
  const double e = params.epsilon;
  const double p11 = params.rho * rho_denominator(d, e) + d * e;
  const double p10 = d - p11;
  const double p01 = e - p11;
  const double p00 = 1.0 - p01 - p10 - p11;
  const double tol = detail::kFeasibilityTol;
  for (double p : {p11, p10, p01, p00}) {
    if (p < -tol || p > 1.0 + tol) {
      throw InfeasibleCorrelation(
          "rho lies outside the feasible interval for (delta, epsilon)");
    }
  }
  return {detail::clamp01(p00), detail::clamp01(p01), detail::clamp01(p10),
          detail::clamp01(p11)};
}

// Joint law for independent erasures; accepts boundary marginals so that
// degenerate edge experiments can still run.
inline JointErasureDist joint_independent(double delta, double epsilon) {
  if (!(delta >= 0.0 && delta <= 1.0 && epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("marginals must lie in [0,1]");
  }
  return {(1.0 - delta) * (1.0 - epsilon), (1.0 - delta) * epsilon,
          delta * (1.0 - epsilon), delta * epsilon};
}

// Recovers the Pearson correlation from a joint law.
inline double rho_from_joint(const JointErasureDist& dist) {
  const double d = dist.delta();
  const double e = dist.epsilon();
  return (dist.p11 - d * e) / rho_denominator(d, e);
}

struct ErasurePair {
  bool main_erased;
  bool wiretap_erased;
};

// One draw from the joint law. One uniform variate per call, mapped
// through the CDF in outcome order (0,0),(0,1),(1,0),(1,1).
inline ErasurePair sample_pair(const JointErasureDist& dist,
                               std::mt19937_64& rng) {
  const double u =
      std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < dist.p00) return {false, false};
  if (u < dist.p00 + dist.p01) return {false, true};
  if (u < dist.p00 + dist.p01 + dist.p10) return {true, false};
  return {true, true};
}

}  // namespace wiretap::channel
