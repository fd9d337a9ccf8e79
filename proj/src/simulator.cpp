#include "spikemf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "spikemf/rng.hpp"

namespace spikemf {

namespace {

constexpr int kRowBlock = 512;  // rows per OpenMP work item

void rebuild_fired_index(NetworkState& s) {
  s.fired_idx.clear();
  for (int i = 0; i < static_cast<int>(s.fired.size()); ++i)
    if (s.fired[i]) s.fired_idx.push_back(i);
}

// Core update for rows [i0, i1): identical arithmetic in both kernels.
void update_rows(NetworkState& s, const NetworkRealization& net,
                 const SimConfig& cfg, int i0, int i1) {
  double* charge = s.charge.data();
  for (int i = i0; i < i1; ++i) charge[i] = 0.0;
  for (int j : s.fired_idx) {
    const double* col = net.w.data() + static_cast<std::size_t>(j) * cfg.n;
    for (int i = i0; i < i1; ++i) charge[i] += col[i];
  }
  for (int i = i0; i < i1; ++i) {
    const double base = s.fired[i] ? 0.0 : s.v[i];
    double v = cfg.gamma * base + charge[i];
    if (v < cfg.v_min) v = cfg.v_min;
    s.v[i] = v;
    s.fired[i] = v >= cfg.model.theta;
  }
}

}  // namespace

void SimConfig::validate() const {
  model.validate();
  if (n < 1) throw std::invalid_argument("N must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gamma must lie in [0,1]");
  if (!(x0 >= 0.0 && x0 <= 1.0))
    throw std::invalid_argument("x0 must lie in [0,1]");
  if (!(v_min <= 0.0) || !std::isfinite(v_min))
    throw std::invalid_argument("v_min must be finite and <= 0");
  if (horizon < 1) throw std::invalid_argument("T must be >= 1");
}

NetworkRealization realize_network(const SimConfig& cfg,
                                   std::uint64_t network_index, Kernel kernel) {
  cfg.validate();
  const int n = cfg.n;
  const std::size_t entries = static_cast<std::size_t>(n) * n;
  NetworkRealization net{n, std::vector<double>(entries)};

  const double mean = cfg.model.mu / n;
  const double sigma = cfg.model.phi / std::sqrt(static_cast<double>(n));
  const std::int64_t blocks = static_cast<std::int64_t>((entries + 3) / 4);
  const bool par = kernel == Kernel::kParallel;

#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t b = 0; b < blocks; ++b) {
    double g[4];
    gaussian_block(cfg.seed, network_index, kStreamWeights,
                   static_cast<std::uint64_t>(b), g);
    const std::size_t e0 = static_cast<std::size_t>(b) * 4;
    const std::size_t e1 = std::min(e0 + 4, entries);
    for (std::size_t e = e0; e < e1; ++e) net.w[e] = mean + sigma * g[e - e0];
  }

  if (cfg.model.sparsity_p > 0.0) {
    const double p = cfg.model.sparsity_p;
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t b = 0; b < blocks; ++b) {
      const auto mask = Philox4x64::generate(
          cfg.seed, network_index, {static_cast<std::uint64_t>(b), kStreamSparsityMask, 0, 0});
      const std::size_t e0 = static_cast<std::size_t>(b) * 4;
      const std::size_t e1 = std::min(e0 + 4, entries);
      for (std::size_t e = e0; e < e1; ++e)
        if (to_unit_interval(mask[e - e0]) < p) net.w[e] = 0.0;
    }
  }

  if (!cfg.self_connections)
    for (int i = 0; i < n; ++i)
      net.w[static_cast<std::size_t>(i) * n + i] = 0.0;

  return net;
}

void init_state(NetworkState& s, const SimConfig& cfg,
                std::uint64_t network_index) {
  const int n = cfg.n;
  s.v.assign(n, 0.0);
  s.fired.assign(n, 0);
  s.charge.assign(n, 0.0);

  CounterRng rng(cfg.seed, network_index, kStreamStimulus);
  if (cfg.stim_mode == StimMode::kBernoulli) {
    for (int i = 0; i < n; ++i) s.fired[i] = rng.next_uniform() < cfg.x0;
  } else {
    const int count = static_cast<int>(std::lround(cfg.x0 * n));
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    for (int t = 0; t < count; ++t) {  // partial Fisher-Yates
      const int pick = t + static_cast<int>(rng.next_below(n - t));
      std::swap(ids[t], ids[pick]);
      s.fired[ids[t]] = 1;
    }
  }
  rebuild_fired_index(s);
}

void step_network(NetworkState& s, const NetworkRealization& net,
                  const SimConfig& cfg, Kernel kernel) {
  const int n = cfg.n;
  if (kernel == Kernel::kSerial) {
    update_rows(s, net, cfg, 0, n);
  } else {
    const int nblocks = (n + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nblocks; ++b)
      update_rows(s, net, cfg, b * kRowBlock, std::min(n, (b + 1) * kRowBlock));
  }
  rebuild_fired_index(s);
}

SimTrace run_simulation(const SimConfig& cfg, std::uint64_t network_index,
                        Kernel kernel) {
  cfg.validate();
  const NetworkRealization net = realize_network(cfg, network_index, kernel);

  NetworkState s;
  init_state(s, cfg, network_index);

  SimTrace trace;
  trace.raster.resize(cfg.n);
  trace.spike_counts.reserve(cfg.horizon + 1);
  trace.spike_counts.push_back(static_cast<int>(s.fired_idx.size()));
  for (int i : s.fired_idx) trace.raster[i].push_back(0);

  for (int t = 1; t <= cfg.horizon; ++t) {
    step_network(s, net, cfg, kernel);
    trace.spike_counts.push_back(static_cast<int>(s.fired_idx.size()));
    for (int i : s.fired_idx) trace.raster[i].push_back(t);
  }
  trace.final_potentials = s.v;
  return trace;
}

void write_raster(const SimTrace& trace, const char* path) {
  std::FILE* f = std::fopen(path, "w");
  if (!f) throw std::runtime_error(std::string("cannot open ") + path);
  for (const std::vector<int>& times : trace.raster) {
    for (std::size_t k = 0; k < times.size(); ++k)
      std::fprintf(f, k ? " %d" : "%d", times[k]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace spikemf
