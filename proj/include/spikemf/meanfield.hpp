#pragma once

#include <optional>
#include <vector>

#include "spikemf/prob.hpp"

namespace spikemf {

// Chooses the recursion flavour.  With the potential floored at zero, half
// of the accumulated charge mass is clamped away every step, so the charge
// accumulator decays with gamma/2 instead of gamma.
enum class VminMode { kClampAtZero, kUnclamped };

struct MeanFieldParams {
  WeightModel model;
  double gamma = 0.0;  ///< leak in [0,1]
  double x0 = 0.15;    ///< initially stimulated fraction in [0,1]
  VminMode vmin_mode = VminMode::kClampAtZero;
  int horizon = 50;    ///< number of steps T >= 1

  void validate() const;
  double effective_decay() const {
    return vmin_mode == VminMode::kClampAtZero ? 0.5 * gamma : gamma;
  }
};

// One cohort of neurons that last fired (were reset) at `reset_step`.
struct SurvivalBranch {
  int reset_step;       ///< k
  double charge;        ///< discounted charge fraction accumulated since reset
  double log_survival;  ///< log prod of (1 - fire prob) over steps since reset
};

// x_t plus the live table of first-firing probabilities.
// fire_rows[t][k] is the probability that a neuron reset at step k stays
// subthreshold afterwards and fires exactly at step t (k < t).
struct MeanFieldTrace {
  std::vector<double> activity;                // x_t for t = 0..current
  std::vector<std::vector<double>> fire_rows;  // row t has entries k = 0..t-1
  std::vector<SurvivalBranch> branches;        // live cohorts, reset_step ascending
  std::optional<int> converged_at;

  int current_step() const { return static_cast<int>(activity.size()) - 1; }
};

MeanFieldTrace init_trace(const MeanFieldParams& params);

/// Appends x_{t+1} and the firing-probability row for step t+1.
/// Throws std::runtime_error if a probability leaves [0,1] by more than 1e-9.
void step_meanfield(MeanFieldTrace& trace, const MeanFieldParams& params);

/// Iterates to the horizon; converged_at is the first step opening a window
/// of five consecutive activity increments below 1e-10.
MeanFieldTrace run_meanfield(const MeanFieldParams& params);

/// Memoryless map x -> fire_prob(x): the exact recursion for gamma = 0.
double step_simple(double x, const WeightModel& m);

// Expectation and variance of the firing count for a population of n
// neurons, from the same firing-probability table as the activity recursion.
struct MomentTrace {
  std::vector<double> expectation;  // E(X_t), neuron counts
  std::vector<double> variance;     // Var(X_t), counts squared
  double n = 0.0;
};

MomentTrace moments(const MeanFieldParams& params, double n_neurons);

/// Probability generating function G_{X_t}(s), evaluated by the product
/// recursion over first-firing cohorts.  The recursion tree is exponential
/// in t, so t is capped at 20.  Requires 1 <= t, 0 <= s <= 1.
double pgf_eval(int t, double s, const MeanFieldParams& params, double n_neurons);

struct FixedPoint {
  double x;
  bool stable;
};

struct FixedPointReport {
  std::vector<FixedPoint> fixed_points;  // always includes x = 0
  bool death_only = false;               // no positive fixed point
  std::optional<double> asymptote;       // forward-iteration limit, if computed
  std::optional<double> predicted_frequency;  // fire_prob at the live state
};

/// Roots of fire_prob(x) = x on (0,1] for the centered (mu = 0) memoryless
/// map: sign-change bracketing on a 10^4-point grid refined by bisection to
/// |fire_prob(x) - x| < 1e-12, stability from the map derivative.
FixedPointReport fixed_points_simple(const WeightModel& m);

/// Critical coupling (2e/3)^(3/4) * pi^(1/4) * theta below which zero is the
/// only fixed point of the centered memoryless map.
double death_threshold(double theta);

/// Converged activity by forward iteration of the full recursion.
double forward_asymptote(MeanFieldParams params, int horizon = 400);

struct IsiPrediction {
  double geometric_param;  // per-step firing hazard at the steady state
  double frequency;        // predicted network frequency f*
};

/// Steady-state interspike-interval law: geometric with parameter
/// fire_prob(x*).  Throws std::runtime_error when only the death state
/// exists.  A violation of fire_prob(x*) <= x* is logged, not fatal.
IsiPrediction predict_isi(const FixedPointReport& report, const WeightModel& m);

}  // namespace spikemf
