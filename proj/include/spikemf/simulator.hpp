#pragma once

#include <cstdint>
#include <vector>

#include "spikemf/prob.hpp"

namespace spikemf {

// Serial is the reference implementation; Parallel runs the same arithmetic
// in OpenMP row blocks and must produce bit-identical results.
enum class Kernel { kSerial, kParallel };

// How the initial stimulation is drawn: each neuron independently with
// probability x0 (the standard protocol), or a uniformly chosen subset of
// exactly round(x0 * N) neurons (keeps the stimulated count deterministic,
// which the moment identities assume).
enum class StimMode { kBernoulli, kFixedCount };

struct SimConfig {
  int n = 1000;  ///< neuron count N
  WeightModel model;
  double gamma = 0.0;   ///< leak in [0,1]
  double x0 = 0.15;     ///< stimulation probability in [0,1]
  double v_min = 0.0;   ///< potential floor, <= 0
  int horizon = 50;     ///< steps T >= 1
  std::uint64_t seed = 0;
  bool self_connections = true;
  StimMode stim_mode = StimMode::kBernoulli;

  void validate() const;
};

// Dense realized coupling matrix.  Column-major: w[j*n + i] is the weight
// from neuron j to neuron i, so accumulating the charge of every neuron from
// one firing neuron is a contiguous column sweep.
struct NetworkRealization {
  int n = 0;
  std::vector<double> w;

  double weight(int i, int j) const {
    return w[static_cast<std::size_t>(j) * n + i];
  }
};

struct NetworkState {
  std::vector<double> v;            // membrane potentials
  std::vector<std::uint8_t> fired;  // fired at the current step
  std::vector<int> fired_idx;       // ascending indices of fired neurons
  std::vector<double> charge;       // scratch for the incoming charge
};

struct SimTrace {
  std::vector<int> spike_counts;         // X_t for t = 0..T
  std::vector<std::vector<int>> raster;  // firing times per neuron
  std::vector<double> final_potentials;
};

/// Deterministic function of (seed, network_index): entry (i,j) is draw
/// j*n + i of the weight stream, zeroed by the sparsity-mask stream.
NetworkRealization realize_network(const SimConfig& cfg,
                                   std::uint64_t network_index,
                                   Kernel kernel = Kernel::kParallel);

/// Potentials to zero, initial firing from the stimulus stream.
void init_state(NetworkState& state, const SimConfig& cfg,
                std::uint64_t network_index);

/// One synchronous update: leak (a neuron that fired last step leaks from
/// zero), charge gather over the fired columns, floor clamp, threshold test
/// with V >= theta.  Charges emitted at t arrive at t+1.
void step_network(NetworkState& state, const NetworkRealization& net,
                  const SimConfig& cfg, Kernel kernel = Kernel::kParallel);

SimTrace run_simulation(const SimConfig& cfg, std::uint64_t network_index,
                        Kernel kernel = Kernel::kParallel);

/// Writes the raster as plain text, one neuron per line, whitespace-separated
/// firing times.
void write_raster(const SimTrace& trace, const char* path);

}  // namespace spikemf
