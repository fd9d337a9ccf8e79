#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "spikemf/meanfield.hpp"
#include "spikemf/simulator.hpp"

namespace spikemf {

struct EnsembleStats {
  int runs = 0;
  int window_start = 20;  // steady-state window is [window_start, T]
  std::vector<double> mean_activity;  // mean of X_t/N across networks
  std::vector<double> std_activity;   // population std across networks
  std::vector<std::vector<double>> run_activity;  // per run, X_t/N
  std::map<int, std::uint64_t> isi_histogram;     // pooled over the window
  double mean_frequency = 0.0;  // window average of mean activity
};

/// Simulates network indices 0..runs-1 and aggregates.  The reduction order
/// is fixed by network index, so results are bit-reproducible regardless of
/// the thread schedule.  An interspike interval is pooled when the spike
/// opening it falls inside the window (initial stimulation counts as a spike).
EnsembleStats ensemble(const SimConfig& cfg, int runs, int window_start = 20,
                       Kernel kernel = Kernel::kParallel);

/// Total-variation distance between the pooled empirical interspike-interval
/// law and a geometric law with the given parameter, both restricted and
/// renormalized to the observed support [1, max ISI].  Throws on an empty
/// histogram (death regime) or a parameter outside (0,1].
double isi_geometric_fit(const EnsembleStats& stats, double geometric_param);

struct AsymptoteRow {
  double phi = 0.0, gamma = 0.0;
  double predicted = 0.0;        // tail mean of the predicted activity
  double simulated_mean = 0.0;   // mean over networks of the per-network tail mean
  double simulated_std = 0.0;    // std over networks of the same
  double abs_error = 0.0;
  bool failure_band = false;     // phi in (1.5, 2.0): prediction known to fail
  std::optional<double> isi_param, isi_tv;
};

struct TransientRow {
  double phi = 0.0, gamma = 0.0;
  int t = 0;
  double x_pred = 0.0, x_sim_mean = 0.0, x_sim_std = 0.0;
};

struct ComparisonReport {
  std::vector<AsymptoteRow> asymptotes;
  std::vector<TransientRow> transients;
};

/// Cross-product sweep over phi and gamma.  Every cell runs the predictor
/// and a fresh ensemble (same seed: common random numbers across cells).
/// The prediction uses the halved-decay recursion when v_min == 0 and the
/// raw recursion otherwise.  Asymptotes are tail means over the last
/// min(20, T/2) steps.
ComparisonReport sweep(const std::vector<double>& phi_grid,
                       const std::vector<double>& gamma_grid,
                       const SimConfig& base, int runs,
                       Kernel kernel = Kernel::kParallel);

struct RandomSumRow {
  int n = 0;
  double abs_error = 0.0;  // | mean f(X) - f(E X) |, X ~ Binomial(n, x0)
};

/// Validates the random-sum approximation behind the charge law: the gap
/// between E f(X) and f(E X) for f(k) = fire_prob_centered(k/n) must shrink
/// as n grows.
std::vector<RandomSumRow> randomsum_approx_check(const std::vector<int>& n_list,
                                                 double x0, const WeightModel& m,
                                                 int reps = 100000,
                                                 std::uint64_t seed = 0);

}  // namespace spikemf
