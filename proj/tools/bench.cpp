// Timing comparison between the serial reference kernels and the OpenMP
// ones, with a bitwise equality check on every compared result.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "spikemf/analysis.hpp"
#include "spikemf/simulator.hpp"

using namespace spikemf;

namespace {

SimConfig make_config(int n) {
  SimConfig cfg;
  cfg.n = n;
  cfg.model = WeightModel{5.0, 0.0, 0.0, 1.0};
  cfg.gamma = 0.5;
  cfg.x0 = 0.3;
  cfg.seed = 1;
  return cfg;
}

template <typename F>
double time_s(F&& fn, int reps) {
  const double t0 = omp_get_wtime();
  for (int r = 0; r < reps; ++r) fn();
  return (omp_get_wtime() - t0) / reps;
}

void bench_realize(int n) {
  const SimConfig cfg = make_config(n);
  NetworkRealization serial, parallel;
  const double ts = time_s([&] { serial = realize_network(cfg, 0, Kernel::kSerial); }, 3);
  const double tp = time_s([&] { parallel = realize_network(cfg, 0, Kernel::kParallel); }, 3);
  std::printf("realize   N=%-5d  serial %8.2f ms  omp %8.2f ms  speedup %.2fx  identical=%s\n",
              n, ts * 1e3, tp * 1e3, ts / tp, serial.w == parallel.w ? "yes" : "NO");
}

void bench_step(int n, int reps) {
  const SimConfig cfg = make_config(n);
  const NetworkRealization net = realize_network(cfg, 0);
  NetworkState a, b;
  init_state(a, cfg, 0);
  init_state(b, cfg, 0);
  const double ts = time_s([&] { step_network(a, net, cfg, Kernel::kSerial); }, reps);
  const double tp = time_s([&] { step_network(b, net, cfg, Kernel::kParallel); }, reps);
  std::printf("step      N=%-5d  serial %8.3f ms  omp %8.3f ms  speedup %.2fx  identical=%s\n",
              n, ts * 1e3, tp * 1e3, ts / tp,
              (a.v == b.v && a.fired_idx == b.fired_idx) ? "yes" : "NO");
}

void bench_ensemble(int n, int runs) {
  SimConfig cfg = make_config(n);
  cfg.horizon = 50;
  EnsembleStats serial, parallel;
  const double ts = time_s([&] { serial = ensemble(cfg, runs, 20, Kernel::kSerial); }, 1);
  const double tp = time_s([&] { parallel = ensemble(cfg, runs, 20, Kernel::kParallel); }, 1);
  std::printf("ensemble  N=%-5d  runs=%-3d serial %7.2f ms  omp %7.2f ms  speedup %.2fx  identical=%s\n",
              n, runs, ts * 1e3, tp * 1e3, ts / tp,
              (serial.mean_activity == parallel.mean_activity &&
               serial.isi_histogram == parallel.isi_histogram)
                  ? "yes"
                  : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  int scale = 1;
  if (argc > 1) scale = std::max(1, std::atoi(argv[1]));
  std::printf("threads: %d (pass a scale factor as the only argument)\n",
              omp_get_max_threads());
  bench_realize(1000 * scale);
  bench_step(1000, 200);
  bench_step(4000, 50);
  bench_ensemble(1000, 16 * scale);
  return 0;
}
