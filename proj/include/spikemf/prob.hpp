#pragma once

namespace spikemf {

/// Synaptic weight law for an N-neuron network.  An entry is zero with
/// probability sparsity_p and otherwise drawn from Normal(mu/N, (phi/sqrt(N))^2),
/// so the summed input from a fraction y of firing neurons has mean mu*y and
/// variance phi^2*y in potential units, independent of N.
struct WeightModel {
  double phi = 1.0;         ///< coupling factor, sigma * sqrt(N), >= 0
  double mu = 0.0;          ///< scaled mean; the per-weight mean is mu/N
  double sparsity_p = 0.0;  ///< probability that a weight is exactly zero, in [0,1]
  double theta = 1.0;       ///< firing threshold, > 0

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Upper tail of the standard normal law,
///   (1/sqrt(2*pi)) * integral_z^inf exp(-x^2/2) dx,
/// accurate to better than 1e-12 relative error over the normal range.
/// Underflows to exactly 0 (z large positive) / rounds to 1 (z large negative).
double gaussian_tail(double z);

/// Probability that the summed charge from a fraction y >= 0 of firing
/// neurons crosses the threshold, for the centered law (mu and sparsity
/// ignored).  Exactly 0 at y = 0 or phi = 0.
double fire_prob_centered(double y, const WeightModel& m);

/// Same with the weight mean folded in: the charge is Normal(mu*y, phi^2*y).
/// For phi == 0 this degenerates to the step function 0 / 1/2 / 1 according
/// to the sign of mu*y - theta.
double fire_prob_mean(double y, const WeightModel& m);

/// Full model-aware charge probability.  Sparsity thins the effective charge
/// fraction: a charge y behaves like a dense charge (1 - sparsity_p) * y.
double fire_prob(double y, const WeightModel& m);

/// d/dy of fire_prob_centered.  Requires y > 0 and phi > 0; always positive.
double fire_prob_centered_deriv(double y, const WeightModel& m);

/// Threshold-crossing probability when the membrane potential is floored at
/// v_min <= 0.  `prior` is the charge fraction accumulated before this step,
/// `fresh` the incoming one.  The prior potential sits below the floor with
/// probability p, in which case only the fresh charge rides on v_min;
/// otherwise the full prior + fresh charge counts.  With v_min = 0, p = 1/2
/// exactly and the result equals fire_prob(prior/2 + fresh, m).
double clamped_fire_prob(double prior, double fresh, double v_min,
                         const WeightModel& m);

}  // namespace spikemf
