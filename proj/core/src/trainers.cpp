#include "shufflebn/trainers.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "shufflebn/error.hpp"
#include "shufflebn/linalg.hpp"
#include "shufflebn/random.hpp"
#include "shufflebn/risks.hpp"

namespace shufflebn {

const char* schedule_mode_name(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::manual: return "manual";
    case ScheduleMode::constant: return "constant";
    case ScheduleMode::ss_theory: return "ss-theory";
    case ScheduleMode::rr_theory: return "rr-theory";
  }
  return "?";
}

ScheduleMode parse_schedule_mode(const std::string& name) {
  if (name == "manual") return ScheduleMode::manual;
  if (name == "constant") return ScheduleMode::constant;
  if (name == "ss-theory") return ScheduleMode::ss_theory;
  if (name == "rr-theory") return ScheduleMode::rr_theory;
  fail(Errc::config_error, "unknown schedule '" + name + "'");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::undetermined: return "undetermined";
    case Verdict::converging: return "converging";
    case Verdict::plateaued: return "plateaued";
    case Verdict::diverging: return "diverging";
    case Verdict::blow_up: return "blow-up";
  }
  return "?";
}

StepsizeSchedule StepsizeSchedule::manual(double c, double beta) {
  StepsizeSchedule s;
  s.c = c;
  s.beta = beta;
  s.mode = ScheduleMode::manual;
  s.validate();
  return s;
}

StepsizeSchedule StepsizeSchedule::constant(double eta) {
  StepsizeSchedule s;
  s.c = eta;
  s.beta = 0.0;
  s.mode = ScheduleMode::constant;
  s.validate();
  return s;
}

StepsizeSchedule StepsizeSchedule::theory(ScheduleMode mode, double beta, double multiplier) {
  StepsizeSchedule s;
  s.mode = mode;
  s.beta = beta;
  s.multiplier = multiplier;
  s.c = 0.0;
  s.validate();
  return s;
}

void StepsizeSchedule::validate() const {
  if (!(multiplier > 0.0) || !std::isfinite(multiplier))
    fail(Errc::config_error, "lr-scale must be positive");
  bool theory = mode == ScheduleMode::ss_theory || mode == ScheduleMode::rr_theory;
  if (!theory && !(c > 0.0)) fail(Errc::config_error, "stepsize constant c must be positive");
  if (mode != ScheduleMode::constant && !(beta > 0.5 && beta < 1.0))
    fail(Errc::config_error, "beta must lie in (1/2, 1)");
}

double StepsizeSchedule::eta(Index k) const {
  if (mode == ScheduleMode::constant) return multiplier * c;
  return multiplier * c / std::pow(static_cast<double>(k), beta);
}

BatchPlan canonical_plan(const BatchPlan& plan) {
  BatchPlan out = plan;
  for (Index j = 0; j < plan.num_batches(); ++j) {
    auto first = out.perm.begin() + j * plan.batch_size;
    std::sort(first, first + plan.batch_size);
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fill_norms(EpochRecord& r, const ModelParams& p) {
  r.normD = invariance_norm(p);
  r.normW = spectral_norm(p.W);
  r.normG = p.gamma.size() ? p.gamma.cwiseAbs().maxCoeff() : 0.0;
  r.normM = spectral_norm(p.M());
}

struct Velocity {
  Matrix W;
  Vector gamma;
};

// Applies one (momentum) SGD step in place.
void sgd_step(ModelParams& p, const Gradients& g, double eta, double momentum, Velocity& v) {
  if (momentum == 0.0) {
    p.W -= eta * g.gW;
    p.gamma -= eta * g.gGamma;
    return;
  }
  if (v.W.size() == 0) {
    v.W = Matrix::Zero(p.W.rows(), p.W.cols());
    v.gamma = Vector::Zero(p.gamma.size());
  }
  v.W = momentum * v.W + g.gW;
  v.gamma = momentum * v.gamma + g.gGamma;
  p.W -= eta * v.W;
  p.gamma -= eta * v.gamma;
}

using EpochData = std::function<const NormalizedDataset&(Index)>;
using Evaluator = std::function<double(const ModelParams&)>;

void finish_trace(TrainTrace& trace, const TrainOptions& opt) {
  if (trace.verdict == Verdict::blow_up) return;
  if (static_cast<Index>(trace.epochs.size()) >= 2 * opt.monitor_window)
    trace.verdict = divergence_monitor(trace, opt.monitor_window, opt.monitor_factor);
}

ShallowResult run_shallow(ModelParams params, const StepsizeSchedule& schedule,
                          const TrainOptions& opt, const EpochData& epoch_data,
                          const Evaluator& eval_dist, const Evaluator& eval_gd) {
  if (opt.epochs < 0) fail(Errc::config_error, "epochs must be >= 0");
  ShallowResult res;
  res.trace.schedule = schedule;
  auto record = [&](Index k, double eta) {
    EpochRecord r;
    r.epoch = k;
    r.eta = eta;
    r.L_dist = eval_dist(params);
    r.L_gd = eval_gd(params);
    fill_norms(r, params);
    res.trace.max_normM = std::max(res.trace.max_normM, r.normM);
    return r;
  };
  res.trace.initial = record(0, 0.0);
  Velocity vel;
  for (Index k = 1; k <= opt.epochs; ++k) {
    double eta = schedule.eta(k);
    const NormalizedDataset& nds = epoch_data(k);
    bool blown = false;
    for (std::size_t j = 0; j < nds.batches.size(); ++j) {
      const auto& b = nds.batches[j];
      Matrix xb = nds.Xbar.middleCols(b.begin, b.size);
      Matrix yb = nds.Y.middleCols(b.begin, b.size);
      Gradients g = grad_minibatch(opt.loss, params, xb, yb);
      if (opt.observer) {
        ModelParams before = params;
        sgd_step(params, g, eta, opt.momentum, vel);
        opt.observer(StepInfo{k, static_cast<Index>(j), eta, before, params, xb, yb});
      } else {
        sgd_step(params, g, eta, opt.momentum, vel);
      }
      if (!params.finite()) {
        blown = true;
        break;
      }
    }
    if (blown) {
      res.trace.verdict = Verdict::blow_up;
      break;
    }
    EpochRecord r = record(k, eta);
    res.trace.epochs.push_back(r);
    if (!std::isfinite(r.L_dist) || !std::isfinite(r.L_gd)) {
      res.trace.verdict = Verdict::blow_up;
      break;
    }
  }
  finish_trace(res.trace, opt);
  res.params = std::move(params);
  return res;
}

Evaluator make_evaluator(const NormalizedDataset& nds, Loss loss) {
  if (loss == Loss::squared && nds.cols() > 16 * std::max<Index>(nds.d(), 1)) {
    auto cache = std::make_shared<SquaredRiskCache>(nds);
    return [cache](const ModelParams& p) { return cache->value(p.M()); };
  }
  return [&nds, loss](const ModelParams& p) { return risk_value(p.M(), nds, loss); };
}

double theory_formula(double beta, double alpha, double frob, double C_L, double C_w) {
  double c = 0.5;
  if (alpha > 0) c = std::min(c, 2.0 / alpha);
  double b = 2.0 * beta - 1.0;
  double denom = 4.0 * (1.0 + 1.0 / b) * C_w * C_w * C_L * frob;
  if (denom > 0) c = std::min(c, std::sqrt(b / denom));
  return c;
}

// Runs one epoch with constant stepsize eta over nds and measures the
// largest loss and weight norm among its iterates.
void first_epoch_constants(const ModelParams& init, const NormalizedDataset& nds,
                           const Evaluator& eval, double eta, const TrainOptions& opt,
                           double& C_L, double& C_w) {
  ModelParams p = init;
  Velocity vel;
  auto measure = [&] {
    double L = eval(p);
    double w = std::max(spectral_norm(p.W), p.gamma.size() ? p.gamma.cwiseAbs().maxCoeff() : 0.0);
    C_L = std::max(C_L, std::isfinite(L) ? L : kInf);
    C_w = std::max(C_w, std::isfinite(w) ? w : kInf);
  };
  C_L = 0.0;
  C_w = 0.0;
  measure();
  for (const auto& b : nds.batches) {
    Gradients g = grad_minibatch(opt.loss, p, nds.Xbar.middleCols(b.begin, b.size),
                                 nds.Y.middleCols(b.begin, b.size));
    sgd_step(p, g, eta, opt.momentum, vel);
    measure();
  }
}

TheoryConstants solve_theory_constant(const ModelParams& init, const NormalizedDataset& first,
                                      double alpha, double frob, double beta,
                                      const TrainOptions& opt) {
  TheoryConstants tc;
  tc.alpha = alpha;
  tc.frobenius_sq = frob;
  Evaluator eval = make_evaluator(first, opt.loss);
  auto f = [&](double c, double& C_L, double& C_w) {
    first_epoch_constants(init, first, eval, c, opt, C_L, C_w);
    return theory_formula(beta, alpha, frob, C_L, C_w);
  };
  double hi = theory_formula(beta, alpha, frob, 0.0, 0.0);
  double C_L = 0, C_w = 0;
  tc.iterations = 1;
  if (f(hi, C_L, C_w) >= hi) {
    tc.c = hi;
  } else {
    // Largest c with c <= f(c); f is nonincreasing in c, so bisect in log space.
    double lo = hi;
    double lo_CL = 0, lo_Cw = 0;
    while (f(lo, lo_CL, lo_Cw) < lo && lo > 1e-300) {
      lo *= 0.01;
      ++tc.iterations;
    }
    double a = lo, b = hi;
    for (int it = 0; it < 60; ++it, ++tc.iterations) {
      double mid = std::sqrt(a * b);
      double cl, cw;
      if (f(mid, cl, cw) >= mid) a = mid;
      else b = mid;
      if (b / a - 1.0 < 1e-10) break;
    }
    tc.c = a;
  }
  f(tc.c, tc.C_L, tc.C_w);
  return tc;
}

void resolve_ss(StepsizeSchedule& schedule, TrainTrace& trace, const Dataset& ds,
                const BatchPlan& plan, const ModelParams& init, const TrainOptions& opt) {
  schedule.validate();
  if (schedule.mode == ScheduleMode::ss_theory || schedule.mode == ScheduleMode::rr_theory) {
    TheoryConstants tc = schedule.mode == ScheduleMode::ss_theory
                             ? ss_theory_constant(ds, plan, init, schedule.beta, opt)
                             : rr_theory_constant(ds, plan.batch_size, init, schedule.beta, opt);
    schedule.c = tc.c;
    trace.theory = tc;
  }
  trace.schedule = schedule;
}

std::vector<Index> epoch_permutation(Rng& rng, Index n) { return random_permutation(n, rng); }

}  // namespace

TheoryConstants ss_theory_constant(const Dataset& ds, const BatchPlan& plan,
                                   const ModelParams& init, double beta, const TrainOptions& opt) {
  auto nds = normalize_ss(ds, canonical_plan(plan), opt.epsilon);
  return solve_theory_constant(init, nds, strong_convexity_constant(nds), nds.Xbar.squaredNorm(),
                               beta, opt);
}

TheoryConstants rr_theory_constant(const Dataset& ds, Index batch_size, const ModelParams& init,
                                   double beta, const TrainOptions& opt) {
  auto sample = normalize_rr_sampled(ds, batch_size, std::max<Index>(opt.rr_eval_perms, 1),
                                     split_seed(opt.seed, 1), opt.epsilon);
  double frob = sample.Xbar.squaredNorm() / static_cast<double>(sample.perms.size());
  Rng rng(split_seed(opt.seed, 0));
  auto first = normalize_ss(
      ds, canonical_plan(BatchPlan::make(epoch_permutation(rng, ds.n()), batch_size)), opt.epsilon);
  return solve_theory_constant(init, first, strong_convexity_constant(sample), frob, beta, opt);
}

ShallowResult train_ss(const Dataset& ds, const BatchPlan& plan, ModelParams init,
                       StepsizeSchedule schedule, const TrainOptions& opt) {
  TrainTrace pre;
  resolve_ss(schedule, pre, ds, plan, init, opt);
  auto nds = normalize_ss(ds, canonical_plan(plan), opt.epsilon);
  auto gd = normalize_gd(ds, opt.epsilon);
  auto res = run_shallow(std::move(init), schedule, opt,
                         [&](Index) -> const NormalizedDataset& { return nds; },
                         make_evaluator(nds, opt.loss), make_evaluator(gd, opt.loss));
  res.trace.theory = pre.theory;
  return res;
}

ShallowResult train_rr(const Dataset& ds, Index batch_size, ModelParams init,
                       StepsizeSchedule schedule, const TrainOptions& opt) {
  TrainTrace pre;
  BatchPlan probe = BatchPlan::identity(ds.n(), batch_size);
  resolve_ss(schedule, pre, ds, probe, init, opt);
  auto eval_set = normalize_rr_sampled(ds, batch_size, std::max<Index>(opt.rr_eval_perms, 1),
                                       split_seed(opt.seed, 1), opt.epsilon);
  auto gd = normalize_gd(ds, opt.epsilon);
  Rng rng(split_seed(opt.seed, 0));
  NormalizedDataset current;
  auto res = run_shallow(
      std::move(init), schedule, opt,
      [&](Index) -> const NormalizedDataset& {
        auto plan = BatchPlan::make(epoch_permutation(rng, ds.n()), batch_size);
        current = normalize_ss(ds, canonical_plan(plan), opt.epsilon);
        return current;
      },
      make_evaluator(eval_set, opt.loss), make_evaluator(gd, opt.loss));
  res.trace.theory = pre.theory;
  return res;
}

ShallowResult train_gd(const Dataset& ds, ModelParams init, StepsizeSchedule schedule,
                       const TrainOptions& opt) {
  TrainTrace pre;
  resolve_ss(schedule, pre, ds, BatchPlan::identity(ds.n(), ds.n()), init, opt);
  auto gd = normalize_gd(ds, opt.epsilon);
  auto eval = make_evaluator(gd, opt.loss);
  auto res = run_shallow(std::move(init), schedule, opt,
                         [&](Index) -> const NormalizedDataset& { return gd; }, eval, eval);
  res.trace.theory = pre.theory;
  return res;
}

namespace {

struct DeepVelocity {
  std::optional<Matrix> input;
  std::vector<Velocity> layers;
};

void deep_step(DeepLinearParams& p, const DeepGradients& g, double eta, double momentum,
               DeepVelocity& v) {
  if (momentum == 0.0) {
    if (p.input) *p.input -= eta * *g.input;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      p.layers[l].W -= eta * g.layers[l].gW;
      p.layers[l].gamma -= eta * g.layers[l].gGamma;
    }
    return;
  }
  if (p.input) {
    if (!v.input) v.input = Matrix::Zero(p.input->rows(), p.input->cols());
    *v.input = momentum * *v.input + *g.input;
    *p.input -= eta * *v.input;
  }
  v.layers.resize(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) sgd_step(p.layers[l], g.layers[l], eta, momentum, v.layers[l]);
}

// Raw features and targets arranged in batch order.
struct DeepEpoch {
  Matrix X;
  Matrix Y;
};

DeepEpoch arrange(const Dataset& ds, const BatchPlan& plan) {
  Dataset sel = ds.select(canonical_plan(plan).perm);
  return {std::move(sel.X), std::move(sel.Y)};
}

using DeepEpochData = std::function<const DeepEpoch&(Index)>;
using DeepEvaluator = std::function<double(const DeepLinearParams&)>;

DeepResult run_deep(DeepLinearParams params, const StepsizeSchedule& schedule,
                    const TrainOptions& opt, Index batch_size, const DeepEpochData& epoch_data,
                    const DeepEvaluator& eval_dist, const DeepEvaluator& eval_gd) {
  if (opt.epochs < 0) fail(Errc::config_error, "epochs must be >= 0");
  if (schedule.mode == ScheduleMode::ss_theory || schedule.mode == ScheduleMode::rr_theory)
    fail(Errc::config_error, "theory schedules apply to the shallow model only");
  schedule.validate();
  DeepResult res;
  res.trace.schedule = schedule;
  auto record = [&](Index k, double eta) {
    EpochRecord r;
    r.epoch = k;
    r.eta = eta;
    r.L_dist = eval_dist(params);
    r.L_gd = eval_gd(params);
    fill_norms(r, params.layers.back());
    res.trace.max_normM = std::max(res.trace.max_normM, r.normM);
    return r;
  };
  res.trace.initial = record(0, 0.0);
  DeepVelocity vel;
  for (Index k = 1; k <= opt.epochs; ++k) {
    double eta = schedule.eta(k);
    const DeepEpoch& data = epoch_data(k);
    bool blown = false;
    for (Index c = 0; c < data.X.cols(); c += batch_size) {
      Matrix xb = data.X.middleCols(c, batch_size);
      Matrix yb = data.Y.middleCols(c, batch_size);
      DeepGradients g = deep_grad(opt.loss, params, xb, yb, single_batch(batch_size), opt.epsilon);
      deep_step(params, g, eta, opt.momentum, vel);
      if (!params.finite()) {
        blown = true;
        break;
      }
    }
    if (blown) {
      res.trace.verdict = Verdict::blow_up;
      break;
    }
    EpochRecord r = record(k, eta);
    res.trace.epochs.push_back(r);
    if (!std::isfinite(r.L_dist) || !std::isfinite(r.L_gd)) {
      res.trace.verdict = Verdict::blow_up;
      break;
    }
  }
  finish_trace(res.trace, opt);
  res.params = std::move(params);
  return res;
}

DeepEvaluator deep_evaluator(const DeepEpoch& data, Index batch_size, Loss loss, double eps) {
  auto batches = uniform_batches(data.X.cols(), batch_size);
  return [&data, batches, loss, eps](const DeepLinearParams& p) {
    return deep_loss(loss, p, data.X, data.Y, batches, eps);
  };
}

}  // namespace

DeepResult train_ss_deep(const Dataset& ds, const BatchPlan& plan, DeepLinearParams init,
                         StepsizeSchedule schedule, const TrainOptions& opt) {
  DeepEpoch data = arrange(ds, plan);
  DeepEpoch full{ds.X, ds.Y};
  return run_deep(std::move(init), schedule, opt, plan.batch_size,
                  [&](Index) -> const DeepEpoch& { return data; },
                  deep_evaluator(data, plan.batch_size, opt.loss, opt.epsilon),
                  deep_evaluator(full, ds.n(), opt.loss, opt.epsilon));
}

DeepResult train_rr_deep(const Dataset& ds, Index batch_size, DeepLinearParams init,
                         StepsizeSchedule schedule, const TrainOptions& opt) {
  Index perms = std::max<Index>(opt.rr_eval_perms, 1);
  DeepEpoch eval;
  eval.X.resize(ds.d(), ds.n() * perms);
  eval.Y.resize(ds.p(), ds.n() * perms);
  for (Index i = 0; i < perms; ++i) {
    DeepEpoch e = arrange(ds, BatchPlan::make(sampled_permutation(ds.n(), split_seed(opt.seed, 1), i),
                                              batch_size));
    eval.X.middleCols(i * ds.n(), ds.n()) = e.X;
    eval.Y.middleCols(i * ds.n(), ds.n()) = e.Y;
  }
  DeepEpoch full{ds.X, ds.Y};
  Rng rng(split_seed(opt.seed, 0));
  DeepEpoch current;
  auto eval_batches = deep_evaluator(eval, batch_size, opt.loss, opt.epsilon);
  double scale = 1.0 / static_cast<double>(perms);
  return run_deep(
      std::move(init), schedule, opt, batch_size,
      [&](Index) -> const DeepEpoch& {
        current = arrange(ds, BatchPlan::make(epoch_permutation(rng, ds.n()), batch_size));
        return current;
      },
      [&](const DeepLinearParams& p) { return scale * eval_batches(p); },
      deep_evaluator(full, ds.n(), opt.loss, opt.epsilon));
}

DeepResult train_gd_deep(const Dataset& ds, DeepLinearParams init, StepsizeSchedule schedule,
                         const TrainOptions& opt) {
  DeepEpoch full{ds.X, ds.Y};
  auto eval = deep_evaluator(full, ds.n(), opt.loss, opt.epsilon);
  return run_deep(std::move(init), schedule, opt, ds.n(),
                  [&](Index) -> const DeepEpoch& { return full; }, eval, eval);
}

EpochInequality check_epoch_inequality(const TrainTrace& trace, double alpha, double L_star,
                                       double C) {
  EpochInequality out;
  std::vector<double> slack;
  double prev = trace.initial.L_dist - L_star;
  double fitted = 0.0;
  for (const auto& r : trace.epochs) {
    double gap = r.L_dist - L_star;
    double base = gap - (1.0 - alpha * r.eta / 2.0) * prev;
    slack.push_back(base);
    if (r.eta > 0) fitted = std::max(fitted, base / (r.eta * r.eta));
    prev = gap;
  }
  out.C = C >= 0.0 ? C : fitted;
  out.max_residual = -kInf;
  for (std::size_t i = 0; i < slack.size(); ++i) {
    double eta = trace.epochs[i].eta;
    double res = slack[i] - out.C * eta * eta;
    out.residuals.push_back(res);
    out.max_residual = std::max(out.max_residual, res);
  }
  if (out.residuals.empty()) out.max_residual = 0.0;
  return out;
}

std::vector<double> window_means(const TrainTrace& trace, Index window, bool use_gd) {
  std::vector<double> out;
  if (window < 1) fail(Errc::config_error, "window must be >= 1");
  Index count = static_cast<Index>(trace.epochs.size()) / window;
  for (Index w = 0; w < count; ++w) {
    double s = 0.0;
    for (Index i = w * window; i < (w + 1) * window; ++i) {
      const auto& r = trace.epochs[static_cast<std::size_t>(i)];
      s += use_gd ? r.L_gd : r.L_dist;
    }
    out.push_back(s / static_cast<double>(window));
  }
  return out;
}

Verdict divergence_monitor(const TrainTrace& trace, Index window, double factor) {
  if (trace.verdict == Verdict::blow_up) return Verdict::blow_up;
  if (window < 2) fail(Errc::config_error, "window must be >= 2");
  Index E = static_cast<Index>(trace.epochs.size());
  if (E < 2 * window)
    fail(Errc::trace_too_short, "trace has " + std::to_string(E) + " epochs, need " +
                                    std::to_string(2 * window));
  for (const auto& r : trace.epochs)
    if (!std::isfinite(r.L_gd)) return Verdict::blow_up;
  double first = 0.0, last = 0.0;
  for (Index i = 0; i < window; ++i) {
    first += trace.epochs[static_cast<std::size_t>(i)].L_gd;
    last += trace.epochs[static_cast<std::size_t>(E - window + i)].L_gd;
  }
  first /= static_cast<double>(window);
  last /= static_cast<double>(window);
  // Least-squares slope over the last window.
  double tbar = 0.5 * static_cast<double>(window - 1);
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < window; ++i) {
    double t = static_cast<double>(i) - tbar;
    num += t * (trace.epochs[static_cast<std::size_t>(E - window + i)].L_gd - last);
    den += t * t;
  }
  double slope = num / den;
  if (last >= factor * first && slope >= 0.0) return Verdict::diverging;
  if (last < first && slope <= 0.0) return Verdict::converging;
  return Verdict::plateaued;
}

}  // namespace shufflebn
