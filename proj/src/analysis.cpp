#include "spikemf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spikemf/rng.hpp"

namespace spikemf {

namespace {

double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i <= to; ++i) s += v[i];
  return s / static_cast<double>(to - from + 1);
}

}  // namespace

EnsembleStats ensemble(const SimConfig& cfg, int runs, int window_start,
                       Kernel kernel) {
  cfg.validate();
  if (runs < 1) throw std::invalid_argument("ensemble: runs must be >= 1");
  if (window_start < 0) throw std::invalid_argument("ensemble: window_start must be >= 0");

  const int T = cfg.horizon;
  std::vector<SimTrace> traces(runs);
  const bool par = kernel == Kernel::kParallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int r = 0; r < runs; ++r)
    traces[r] = run_simulation(cfg, static_cast<std::uint64_t>(r), Kernel::kSerial);

  EnsembleStats stats;
  stats.runs = runs;
  stats.window_start = window_start;
  stats.mean_activity.assign(T + 1, 0.0);
  stats.std_activity.assign(T + 1, 0.0);
  stats.run_activity.resize(runs);

  const double inv_n = 1.0 / cfg.n;
  for (int r = 0; r < runs; ++r) {
    stats.run_activity[r].resize(T + 1);
    for (int t = 0; t <= T; ++t)
      stats.run_activity[r][t] = traces[r].spike_counts[t] * inv_n;
  }
  for (int t = 0; t <= T; ++t) {
    double s = 0.0;
    for (int r = 0; r < runs; ++r) s += stats.run_activity[r][t];
    const double mean = s / runs;
    double sq = 0.0;
    for (int r = 0; r < runs; ++r) {
      const double d = stats.run_activity[r][t] - mean;
      sq += d * d;
    }
    stats.mean_activity[t] = mean;
    stats.std_activity[t] = std::sqrt(sq / runs);
  }

  const int ws = std::min(window_start, T);
  for (int r = 0; r < runs; ++r)
    for (const std::vector<int>& times : traces[r].raster)
      for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k - 1] >= ws)
          ++stats.isi_histogram[times[k] - times[k - 1]];

  stats.mean_frequency = mean_of(stats.mean_activity, ws, T);
  return stats;
}

double isi_geometric_fit(const EnsembleStats& stats, double geometric_param) {
  if (stats.isi_histogram.empty())
    throw std::runtime_error("isi_geometric_fit: empty histogram (death regime)");
  if (!(geometric_param > 0.0 && geometric_param <= 1.0))
    throw std::invalid_argument("isi_geometric_fit: parameter must lie in (0,1]");

  const int u_max = stats.isi_histogram.rbegin()->first;
  double total = 0.0;
  for (const auto& [u, c] : stats.isi_histogram) total += static_cast<double>(c);

  const double p = geometric_param;
  const double tail_norm = 1.0 - std::pow(1.0 - p, u_max);
  double tv = 0.0;
  double geom_u = p;  // p (1-p)^(u-1)
  for (int u = 1; u <= u_max; ++u) {
    const auto it = stats.isi_histogram.find(u);
    const double emp = it == stats.isi_histogram.end()
                           ? 0.0
                           : static_cast<double>(it->second) / total;
    tv += std::abs(emp - geom_u / tail_norm);
    geom_u *= 1.0 - p;
  }
  return 0.5 * tv;
}

ComparisonReport sweep(const std::vector<double>& phi_grid,
                       const std::vector<double>& gamma_grid,
                       const SimConfig& base, int runs, Kernel kernel) {
  if (phi_grid.empty() || gamma_grid.empty())
    throw std::invalid_argument("sweep: grids must be non-empty");

  ComparisonReport report;
  const int T = base.horizon;
  const int tail = std::max(1, std::min(20, T / 2));
  const std::size_t tail_from = static_cast<std::size_t>(T - tail + 1);

  for (double gamma : gamma_grid) {
    for (double phi : phi_grid) {
      SimConfig cfg = base;
      cfg.model.phi = phi;
      cfg.gamma = gamma;

      MeanFieldParams mf;
      mf.model = cfg.model;
      mf.gamma = gamma;
      mf.x0 = cfg.x0;
      mf.vmin_mode =
          cfg.v_min == 0.0 ? VminMode::kClampAtZero : VminMode::kUnclamped;
      mf.horizon = T;
      const MeanFieldTrace pred = run_meanfield(mf);

      const EnsembleStats stats = ensemble(cfg, runs, 20, kernel);

      AsymptoteRow row;
      row.phi = phi;
      row.gamma = gamma;
      row.predicted = mean_of(pred.activity, tail_from, T);
      std::vector<double> run_tails(runs);
      for (int r = 0; r < runs; ++r)
        run_tails[r] = mean_of(stats.run_activity[r], tail_from, T);
      double s = 0.0;
      for (double v : run_tails) s += v;
      row.simulated_mean = s / runs;
      double sq = 0.0;
      for (double v : run_tails) sq += (v - row.simulated_mean) * (v - row.simulated_mean);
      row.simulated_std = std::sqrt(sq / runs);
      row.abs_error = std::abs(row.predicted - row.simulated_mean);
      row.failure_band = phi > 1.5 && phi < 2.0;
      if (row.predicted > 1e-6 && !stats.isi_histogram.empty()) {
        row.isi_param = fire_prob(row.predicted, cfg.model);
        row.isi_tv = isi_geometric_fit(stats, *row.isi_param);
      }
      report.asymptotes.push_back(row);

      for (int t = 0; t <= T; ++t)
        report.transients.push_back({phi, gamma, t, pred.activity[t],
                                     stats.mean_activity[t],
                                     stats.std_activity[t]});
    }
  }
  return report;
}

std::vector<RandomSumRow> randomsum_approx_check(const std::vector<int>& n_list,
                                                 double x0, const WeightModel& m,
                                                 int reps, std::uint64_t seed) {
  if (!(x0 >= 0.0 && x0 <= 1.0))
    throw std::invalid_argument("randomsum_approx_check: x0 must lie in [0,1]");
  if (reps < 1) throw std::invalid_argument("randomsum_approx_check: reps must be >= 1");

  std::vector<RandomSumRow> rows;
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("randomsum_approx_check: n must be >= 1");
    // Fixed-size partials keep the sum independent of the thread count.
    const int chunk = 1024;
    const int nchunks = (reps + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < nchunks; ++c) {
      double acc = 0.0;
      const int r1 = std::min(reps, (c + 1) * chunk);
      for (int r = c * chunk; r < r1; ++r) {
        CounterRng rng(seed, static_cast<std::uint64_t>(r), kStreamTrials);
        int x = 0;
        for (int i = 0; i < n; ++i) x += rng.next_uniform() < x0;
        acc += fire_prob_centered(static_cast<double>(x) / n, m);
      }
      partial[c] = acc;
    }
    double mean_f = 0.0;
    for (double v : partial) mean_f += v;
    mean_f /= reps;
    rows.push_back({n, std::abs(mean_f - fire_prob_centered(x0, m))});
  }
  return rows;
}

}  // namespace spikemf
