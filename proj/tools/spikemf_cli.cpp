// Command-line front end: prediction, simulation, comparison sweeps and
// fixed-point reports, all emitting self-describing CSV (every output file
// carries the fully resolved configuration in '#'-prefixed header lines).

#include <omp.h>

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "spikemf/analysis.hpp"
#include "spikemf/meanfield.hpp"
#include "spikemf/simulator.hpp"

using namespace spikemf;

namespace {

struct Options {
  int N = 1000;
  double theta = 1.0;
  std::vector<double> gamma{0.0};
  std::vector<double> phi{5.0};
  double mu = 0.0;
  double sparsity_p = 0.0;
  double x0 = 0.15;
  double v_min = 0.0;
  int T = 50;
  int runs = 100;
  std::uint64_t seed = 0;
  std::string output_path = "-";
  int threads = 0;
  int window_start = 20;
  std::string raster_out;
  std::string counts_out;
  int raster_index = 0;
};

double scalar_of(const std::vector<double>& grid, const char* name) {
  if (grid.size() != 1)
    throw std::invalid_argument(std::string(name) + ": this command needs a single value");
  return grid[0];
}

std::string fmt(double v);

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt(values[i]);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip
  return std::string(buf, res.ptr);
}

WeightModel make_model(const Options& o, double phi) {
  WeightModel m{phi, o.mu, o.sparsity_p, o.theta};
  m.validate();
  return m;
}

SimConfig make_sim_config(const Options& o, double phi, double gamma) {
  SimConfig cfg;
  cfg.n = o.N;
  cfg.model = make_model(o, phi);
  cfg.gamma = gamma;
  cfg.x0 = o.x0;
  cfg.v_min = o.v_min;
  cfg.horizon = o.T;
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

MeanFieldParams make_mf_params(const Options& o, double phi, double gamma) {
  MeanFieldParams p;
  p.model = make_model(o, phi);
  p.gamma = gamma;
  p.x0 = o.x0;
  // the clamped (halved-decay) recursion is exact for a floor at zero; any
  // deeper floor is predicted by the raw recursion
  p.vmin_mode = o.v_min == 0.0 ? VminMode::kClampAtZero : VminMode::kUnclamped;
  p.horizon = o.T;
  p.validate();
  return p;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path == "-" || path.empty()) {
      f_ = stdout;
      owned_ = false;
    } else {
      f_ = std::fopen(path.c_str(), "w");
      if (!f_) throw std::runtime_error("cannot open output file " + path);
      owned_ = true;
    }
  }
  ~Output() {
    if (owned_ && f_) std::fclose(f_);
  }
  std::FILE* get() { return f_; }

 private:
  std::FILE* f_ = nullptr;
  bool owned_ = false;
};

void write_header(std::FILE* f, const Options& o, const char* command) {
  std::fprintf(f, "# command=%s\n", command);
  std::fprintf(f, "# N=%d\n", o.N);
  std::fprintf(f, "# theta=%s\n", fmt(o.theta).c_str());
  std::fprintf(f, "# gamma=%s\n", join(o.gamma).c_str());
  std::fprintf(f, "# phi=%s\n", join(o.phi).c_str());
  std::fprintf(f, "# mu=%s\n", fmt(o.mu).c_str());
  std::fprintf(f, "# sparsity_p=%s\n", fmt(o.sparsity_p).c_str());
  std::fprintf(f, "# x0=%s\n", fmt(o.x0).c_str());
  std::fprintf(f, "# v_min=%s\n", fmt(o.v_min).c_str());
  std::fprintf(f, "# T=%d\n", o.T);
  std::fprintf(f, "# runs=%d\n", o.runs);
  std::fprintf(f, "# seed=%llu\n", static_cast<unsigned long long>(o.seed));
}

int cmd_predict(const Options& o) {
  const double phi = scalar_of(o.phi, "phi");
  const double gamma = scalar_of(o.gamma, "gamma");
  const MeanFieldTrace trace = run_meanfield(make_mf_params(o, phi, gamma));
  Output out(o.output_path);
  write_header(out.get(), o, "predict");
  std::fprintf(out.get(), "t,x_pred\n");
  for (int t = 0; t <= o.T; ++t)
    std::fprintf(out.get(), "%d,%s\n", t, fmt(trace.activity[t]).c_str());
  return 0;
}

int cmd_simulate(const Options& o) {
  const double phi = scalar_of(o.phi, "phi");
  const double gamma = scalar_of(o.gamma, "gamma");
  const SimConfig cfg = make_sim_config(o, phi, gamma);
  const EnsembleStats stats = ensemble(cfg, o.runs, o.window_start);

  Output out(o.output_path);
  write_header(out.get(), o, "simulate");
  std::fprintf(out.get(), "t,mean_activity,std_activity\n");
  for (int t = 0; t <= o.T; ++t)
    std::fprintf(out.get(), "%d,%s,%s\n", t, fmt(stats.mean_activity[t]).c_str(),
                 fmt(stats.std_activity[t]).c_str());

  if (!o.raster_out.empty() || !o.counts_out.empty()) {
    if (o.raster_index < 0 || o.raster_index >= o.runs)
      throw std::invalid_argument("raster-index must name one of the simulated networks");
    const SimTrace tr = run_simulation(cfg, static_cast<std::uint64_t>(o.raster_index));
    if (!o.raster_out.empty()) write_raster(tr, o.raster_out.c_str());
    if (!o.counts_out.empty()) {
      Output cf(o.counts_out);
      write_header(cf.get(), o, "simulate");
      std::fprintf(cf.get(), "t,X_t\n");
      for (int t = 0; t <= o.T; ++t)
        std::fprintf(cf.get(), "%d,%d\n", t, tr.spike_counts[t]);
    }
  }
  return 0;
}

int cmd_compare(const Options& o) {
  const std::vector<double>& phis = o.phi;
  const std::vector<double>& gammas = o.gamma;
  const SimConfig base = make_sim_config(o, phis[0], gammas[0]);
  for (double phi : phis) make_model(o, phi);  // validate the whole grid up front
  const ComparisonReport rep = sweep(phis, gammas, base, o.runs);

  Output out(o.output_path);
  write_header(out.get(), o, "compare");
  std::fprintf(out.get(),
               "row,phi,gamma,t,x_pred,x_sim_mean,x_sim_std,abs_error,isi_param,isi_tv,comment\n");
  for (const TransientRow& r : rep.transients)
    std::fprintf(out.get(), "transient,%s,%s,%d,%s,%s,%s,%s,,,%s\n",
                 fmt(r.phi).c_str(), fmt(r.gamma).c_str(), r.t,
                 fmt(r.x_pred).c_str(), fmt(r.x_sim_mean).c_str(),
                 fmt(r.x_sim_std).c_str(),
                 fmt(std::abs(r.x_pred - r.x_sim_mean)).c_str(),
                 (r.phi > 1.5 && r.phi < 2.0) ? "failure_band" : "");
  for (const AsymptoteRow& r : rep.asymptotes)
    std::fprintf(out.get(), "asymptote,%s,%s,,%s,%s,%s,%s,%s,%s,%s\n",
                 fmt(r.phi).c_str(), fmt(r.gamma).c_str(),
                 fmt(r.predicted).c_str(), fmt(r.simulated_mean).c_str(),
                 fmt(r.simulated_std).c_str(), fmt(r.abs_error).c_str(),
                 r.isi_param ? fmt(*r.isi_param).c_str() : "",
                 r.isi_tv ? fmt(*r.isi_tv).c_str() : "",
                 r.failure_band ? "failure_band" : "");
  return 0;
}

int cmd_fixed_point(const Options& o) {
  const double phi = scalar_of(o.phi, "phi");
  const double gamma = scalar_of(o.gamma, "gamma");
  const WeightModel model = make_model(o, phi);

  Output out(o.output_path);
  std::FILE* f = out.get();
  write_header(f, o, "fixed-point");
  std::fprintf(f, "death_threshold(theta=%s) = %s\n", fmt(o.theta).c_str(),
               fmt(death_threshold(o.theta)).c_str());

  FixedPointReport report;
  if (o.mu == 0.0) {
    report = fixed_points_simple(model);
    std::fprintf(f, "memoryless map fixed points:\n");
    for (const FixedPoint& fp : report.fixed_points)
      std::fprintf(f, "  x* = %s  (%s)\n", fmt(fp.x).c_str(),
                   fp.stable ? "stable" : "unstable");
    std::fprintf(f, "death_only = %s\n", report.death_only ? "true" : "false");
  } else {
    std::fprintf(f, "mu != 0: root enumeration skipped, using forward iteration\n");
  }

  MeanFieldParams p = make_mf_params(o, phi, gamma);
  const double asym = forward_asymptote(p);
  report.asymptote = asym;
  std::fprintf(f, "forward asymptote (gamma=%s) = %s\n", fmt(gamma).c_str(),
               fmt(asym).c_str());
  try {
    const IsiPrediction isi = predict_isi(report, model);
    std::fprintf(f, "predicted network frequency f* = %s\n",
                 fmt(isi.frequency).c_str());
    std::fprintf(f, "ISI geometric parameter = %s\n",
                 fmt(isi.geometric_param).c_str());
  } catch (const std::runtime_error&) {
    std::fprintf(f, "no live state: neural death\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field prediction and Monte Carlo simulation of random "
               "recurrent integrate-and-fire networks"};
  app.require_subcommand(1);
  app.fallthrough(true);
  app.set_config("--config", "", "key=value configuration file; flags override");
  app.allow_config_extras(false);

  Options o;
  app.add_option("--N", o.N, "neuron count")->check(CLI::Range(1, 20000));
  app.add_option("--theta", o.theta, "firing threshold (> 0)");
  app.add_option("--gamma", o.gamma, "leak in [0,1]; comma list for compare")
      ->delimiter(',');
  app.add_option("--phi", o.phi, "coupling factor; comma list for compare")
      ->delimiter(',');
  app.add_option("--mu", o.mu, "scaled weight mean (per-weight mean is mu/N)");
  app.add_option("--sparsity_p", o.sparsity_p,
                 "probability for a weight to be exactly zero");
  app.add_option("--x0", o.x0, "initial stimulation probability in [0,1]");
  app.add_option("--v_min", o.v_min, "potential floor (<= 0; 0 selects the clamped recursion)");
  app.add_option("--T", o.T, "horizon steps")->check(CLI::Range(1, 5000));
  app.add_option("--runs", o.runs, "networks per ensemble")->check(CLI::Range(1, 100000));
  app.add_option("--seed", o.seed, "base seed for all streams");
  app.add_option("--output_path", o.output_path, "output file, '-' for stdout");
  app.add_option("--threads", o.threads, "worker threads (0: machine parallelism)");
  app.add_option("--window-start", o.window_start,
                 "first step of the steady-state window");
  app.add_option("--raster-out", o.raster_out, "dump one network's raster here");
  app.add_option("--counts-out", o.counts_out, "dump one network's spike counts here");
  app.add_option("--raster-index", o.raster_index, "which network to dump");

  CLI::App* predict = app.add_subcommand("predict", "mean-field activity trace");
  CLI::App* simulate = app.add_subcommand("simulate", "ensemble Monte Carlo run");
  CLI::App* compare = app.add_subcommand("compare", "prediction vs ensemble sweep");
  CLI::App* fixed_point =
      app.add_subcommand("fixed-point", "fixed points, death threshold, frequency");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (o.threads > 0) omp_set_num_threads(o.threads);
    if (predict->parsed()) return cmd_predict(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (compare->parsed()) return cmd_compare(o);
    if (fixed_point->parsed()) return cmd_fixed_point(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
