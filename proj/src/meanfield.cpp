#include "spikemf/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace spikemf {

namespace {

constexpr double kProbSlack = 1e-9;
constexpr double kConvergeTol = 1e-10;
constexpr int kConvergeStreak = 5;
// A cohort whose survival product has fallen below this contributes less
// than 1e-15 per step and is dropped.
const double kLogSurvivalFloor = std::log(1e-15);

void check_probability(double v, const char* what) {
  if (!(v >= -kProbSlack && v <= 1.0 + kProbSlack))
    throw std::runtime_error(std::string("meanfield: ") + what +
                             " left [0,1]: numerical breakdown");
}

}  // namespace

void MeanFieldParams::validate() const {
  model.validate();
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gamma must lie in [0,1]");
  if (!(x0 >= 0.0 && x0 <= 1.0))
    throw std::invalid_argument("x0 must lie in [0,1]");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
}

MeanFieldTrace init_trace(const MeanFieldParams& params) {
  params.validate();
  MeanFieldTrace trace;
  trace.activity.push_back(params.x0);
  trace.fire_rows.emplace_back();  // row 0 is empty
  // All N neurons start at potential zero, so the whole population forms the
  // step-0 cohort; the charge it faces comes from the stimulated fraction.
  trace.branches.push_back({0, params.x0, 0.0});
  return trace;
}

void step_meanfield(MeanFieldTrace& trace, const MeanFieldParams& params) {
  const int t = trace.current_step();
  const double decay = params.effective_decay();

  std::vector<double> row(static_cast<std::size_t>(t) + 1, 0.0);
  std::vector<double> hazard(trace.branches.size());

  // x_{t+1} = sum_k w_k * P(k, t+1), where the cohort weight w_k is the
  // activity at the reset step (1 for the initial cohort) and
  // P(k, t+1) = p(u_t^k) * prod_{m=k+1}^{t} (1 - p(u_{m-1}^k)).
  double x_next = 0.0;
  for (std::size_t b = 0; b < trace.branches.size(); ++b) {
    const SurvivalBranch& br = trace.branches[b];
    const double p = fire_prob(br.charge, params.model);
    hazard[b] = p;
    const double fire = p * std::exp(br.log_survival);
    check_probability(fire, "first-firing probability");
    row[br.reset_step] = fire;
    const double weight = br.reset_step == 0 ? 1.0 : trace.activity[br.reset_step];
    x_next += weight * fire;
  }
  check_probability(x_next, "activity");
  x_next = std::clamp(x_next, 0.0, 1.0);

  for (std::size_t b = 0; b < trace.branches.size(); ++b) {
    SurvivalBranch& br = trace.branches[b];
    br.log_survival += std::log1p(-hazard[b]);
    br.charge = decay * br.charge + x_next;
  }
  std::erase_if(trace.branches, [](const SurvivalBranch& br) {
    return !(br.log_survival >= kLogSurvivalFloor);
  });
  trace.branches.push_back({t + 1, x_next, 0.0});

  trace.activity.push_back(x_next);
  trace.fire_rows.push_back(std::move(row));
}

MeanFieldTrace run_meanfield(const MeanFieldParams& params) {
  MeanFieldTrace trace = init_trace(params);
  int streak = 0;
  for (int t = 0; t < params.horizon; ++t) {
    step_meanfield(trace, params);
    if (std::abs(trace.activity[t + 1] - trace.activity[t]) < kConvergeTol) {
      if (++streak == kConvergeStreak && !trace.converged_at)
        trace.converged_at = t - kConvergeStreak + 1;
    } else {
      streak = 0;
    }
  }
  return trace;
}

double step_simple(double x, const WeightModel& m) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("step_simple: x must lie in [0,1]");
  return fire_prob(x, m);
}

MomentTrace moments(const MeanFieldParams& params, double n_neurons) {
  if (!(n_neurons >= 1.0))
    throw std::invalid_argument("moments: population size must be >= 1");
  const MeanFieldTrace trace = run_meanfield(params);
  const int T = trace.current_step();

  MomentTrace mt;
  mt.n = n_neurons;
  mt.expectation.resize(T + 1);
  mt.variance.assign(T + 1, 0.0);
  for (int t = 0; t <= T; ++t) mt.expectation[t] = n_neurons * trace.activity[t];

  // Var(X_t) = sum_k [ E(Xhat_k) P(k,t)(1 - P(k,t)) + Var(Xhat_k) P(k,t)^2 ]
  // with the step-0 cohort deterministic: E = n, Var = 0.
  for (int t = 1; t <= T; ++t) {
    const std::vector<double>& row = trace.fire_rows[t];
    double var = 0.0;
    for (int k = 0; k < t; ++k) {
      const double pkt = row[k];
      if (pkt == 0.0) continue;
      const double e_hat = k == 0 ? n_neurons : mt.expectation[k];
      const double v_hat = k == 0 ? 0.0 : mt.variance[k];
      var += e_hat * pkt * (1.0 - pkt) + v_hat * pkt * pkt;
    }
    mt.variance[t] = var;
  }
  return mt;
}

namespace {

double pgf_recurse(int t, double s, const MeanFieldTrace& trace, double n) {
  if (t == 0) return std::pow(s, n);  // deterministic initial cohort
  const std::vector<double>& row = trace.fire_rows[t];
  double prod = 1.0;
  for (int k = 0; k < t; ++k) {
    const double arg = row[k] * s + (1.0 - row[k]);
    prod *= pgf_recurse(k, arg, trace, n);
  }
  return prod;
}

}  // namespace

double pgf_eval(int t, double s, const MeanFieldParams& params, double n_neurons) {
  if (t < 1 || t > 20)
    throw std::invalid_argument("pgf_eval: t must lie in [1,20] (recursion tree is exponential in t)");
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("pgf_eval: s must lie in [0,1]");
  MeanFieldParams p = params;
  p.horizon = t;
  const MeanFieldTrace trace = run_meanfield(p);
  return pgf_recurse(t, s, trace, n_neurons);
}

double death_threshold(double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  constexpr double kE = 2.71828182845904523536;
  constexpr double kPi = 3.14159265358979323846;
  return std::pow(2.0 * kE / 3.0, 0.75) * std::pow(kPi, 0.25) * theta;
}

FixedPointReport fixed_points_simple(const WeightModel& m) {
  m.validate();
  if (m.mu != 0.0)
    throw std::invalid_argument(
        "fixed_points_simple: needs the centered law (mu = 0); use forward iteration instead");

  const auto map = [&m](double x) { return fire_prob(x, m); };
  const auto h = [&](double x) { return map(x) - x; };
  const double thin = 1.0 - m.sparsity_p;
  const auto map_deriv = [&](double x) {
    return thin == 0.0 ? 0.0 : thin * fire_prob_centered_deriv(thin * x, m);
  };

  FixedPointReport report;
  report.fixed_points.push_back({0.0, true});  // the map has zero slope at 0

  constexpr int kGrid = 10000;
  std::vector<double> roots;
  double a = 1e-12;
  double ha = h(a);
  for (int i = 1; i <= kGrid; ++i) {
    const double b = static_cast<double>(i) / kGrid;
    const double hb = h(b);
    if (ha == 0.0) roots.push_back(a);
    if ((ha < 0.0 && hb > 0.0) || (ha > 0.0 && hb < 0.0)) {
      double lo = a, hi = b, flo = ha;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = h(mid);
        if (std::abs(fmid) < 1e-12 || hi - lo < 1e-16) {
          lo = hi = mid;
          break;
        }
        if ((flo < 0.0) == (fmid < 0.0)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    ha = hb;
  }

  for (double r : roots) report.fixed_points.push_back({r, map_deriv(r) < 1.0});
  report.death_only = roots.empty();

  for (auto it = report.fixed_points.rbegin(); it != report.fixed_points.rend(); ++it) {
    if (it->x > 0.0 && it->stable) {
      report.predicted_frequency = map(it->x);
      break;
    }
  }
  return report;
}

double forward_asymptote(MeanFieldParams params, int horizon) {
  params.horizon = horizon;
  const MeanFieldTrace trace = run_meanfield(params);
  return trace.activity.back();
}

IsiPrediction predict_isi(const FixedPointReport& report, const WeightModel& m) {
  double live = 0.0;
  for (const FixedPoint& fp : report.fixed_points)
    if (fp.stable && fp.x > live) live = fp.x;
  if (live == 0.0 && report.asymptote && *report.asymptote > 1e-8)
    live = *report.asymptote;
  if (live == 0.0)
    throw std::runtime_error("predict_isi: only the death fixed point exists");

  const double p = fire_prob(live, m);
  if (p > live + 1e-9)
    std::fprintf(stderr,
                 "predict_isi: warning: fire_prob(x*) = %.12g exceeds x* = %.12g\n",
                 p, live);
  return {p, p};
}

}  // namespace spikemf
