#include "spikemf/prob.hpp"

#include <cmath>
#include <stdexcept>

namespace spikemf {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Tail probability of Normal(mu*y, phi^2*y) above a (possibly shifted)
// threshold.  Shared by the mean-aware and floor-clamped variants so the
// degenerate cases resolve identically everywhere.
double tail_over(double theta_eff, double y, const WeightModel& m) {
  if (y == 0.0) return 0.0;  // theta_eff > 0 in every caller
  if (m.phi == 0.0) {
    const double drive = m.mu * y;
    if (drive > theta_eff) return 1.0;
    if (drive == theta_eff) return 0.5;
    return 0.0;
  }
  return gaussian_tail((theta_eff - m.mu * y) / (std::sqrt(y) * m.phi));
}

void require_charge(double y) {
  if (!(y >= 0.0))
    throw std::invalid_argument("charge fraction must be >= 0");
}

}  // namespace

void WeightModel::validate() const {
  if (!(phi >= 0.0) || !std::isfinite(phi))
    throw std::invalid_argument("phi must be finite and >= 0");
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("theta must be finite and > 0");
  if (!(sparsity_p >= 0.0 && sparsity_p <= 1.0))
    throw std::invalid_argument("sparsity_p must lie in [0,1]");
  if (!std::isfinite(mu))
    throw std::invalid_argument("mu must be finite");
}

double gaussian_tail(double z) {
  if (std::isnan(z)) throw std::invalid_argument("gaussian_tail: z is NaN");
  if (std::isinf(z)) return z > 0.0 ? 0.0 : 1.0;
  return 0.5 * std::erfc(z * kInvSqrt2);
}

double fire_prob_centered(double y, const WeightModel& m) {
  require_charge(y);
  if (y == 0.0 || m.phi == 0.0) return 0.0;
  return gaussian_tail(m.theta / (std::sqrt(y) * m.phi));
}

double fire_prob_mean(double y, const WeightModel& m) {
  require_charge(y);
  return tail_over(m.theta, y, m);
}

double fire_prob(double y, const WeightModel& m) {
  require_charge(y);
  return tail_over(m.theta, (1.0 - m.sparsity_p) * y, m);
}

double fire_prob_centered_deriv(double y, const WeightModel& m) {
  if (!(y > 0.0)) throw std::invalid_argument("derivative needs y > 0");
  if (!(m.phi > 0.0)) throw std::invalid_argument("derivative needs phi > 0");
  const double y32 = y * std::sqrt(y);
  return m.theta / (2.0 * kSqrt2Pi * m.phi * y32) *
         std::exp(-m.theta * m.theta / (2.0 * y * m.phi * m.phi));
}

double clamped_fire_prob(double prior, double fresh, double v_min,
                         const WeightModel& m) {
  require_charge(prior);
  require_charge(fresh);
  if (!(v_min <= 0.0)) throw std::invalid_argument("v_min must be <= 0");

  const double thin = 1.0 - m.sparsity_p;
  double below_floor;  // P(prior potential < v_min)
  if (prior == 0.0 || std::isinf(v_min)) {
    below_floor = 0.0;
  } else if (v_min == 0.0) {
    below_floor = 0.5;  // centered prior mass splits evenly at zero
  } else {
    below_floor = gaussian_tail(-v_min / (m.phi * std::sqrt(thin * prior)));
  }

  const double shift = below_floor == 0.0 ? 0.0 : below_floor * v_min;
  const double y_eff = thin * ((1.0 - below_floor) * prior + fresh);
  return tail_over(m.theta - shift, y_eff, m);
}

}  // namespace spikemf
