// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "shufflebn/shufflebn.hpp"

using namespace shufflebn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix vec_to_matrix(const Vector& v) { return Matrix(v); }

// Criterion 1 -----------------------------------------------------------------

Outcome gradient_identity() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 8), cols(2, 8);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Index p = dim(rng), d = dim(rng), q = cols(rng);
    Matrix Xbar = oracle::bn_loops(oracle::gaussian(d, q, rng), 1e-5);
    ModelParams params{oracle::gaussian(p, d, rng), oracle::gaussian(d, 1, rng)};
    Matrix Y = oracle::gaussian(p, q, rng);
    worst = std::max(worst, check_gradient_identity(params, Xbar, Y));

    ModelParams one{oracle::gaussian(1, d, rng), oracle::gaussian(d, 1, rng)};
    Matrix y = oracle::random_labels(q, rng);
    Gradients g = grad_minibatch_logistic(one, Xbar, y);
    Vector lhs = (one.W.transpose() * g.gW).diagonal();
    Vector rhs = g.gGamma.cwiseProduct(one.gamma);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, fmt("max elementwise residual %.3e over 100 squared + 100 logistic", worst)};
}

// Criterion 2 -----------------------------------------------------------------

double shallow_fd_error(Loss loss, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 4), cols(3, 8);
  Index d = dim(rng), q = cols(rng);
  Index p = loss == Loss::logistic ? 1 : dim(rng);
  Matrix Xbar = oracle::bn_loops(oracle::gaussian(d, q, rng), 1e-5);
  Matrix Y = loss == Loss::logistic ? Matrix(oracle::random_labels(q, rng)) : oracle::gaussian(p, q, rng);
  ModelParams params{oracle::gaussian(p, d, rng, 0.7), oracle::gaussian(d, 1, rng, 0.7)};
  Gradients g = grad_minibatch(loss, params, Xbar, Y);
  auto value = [&](const Matrix& W, const Vector& gamma) {
    return loss_value(loss, W * gamma.asDiagonal(), Xbar, Y);
  };
  Matrix fdW = oracle::central_difference([&](const Matrix& W) { return value(W, params.gamma); }, params.W);
  Matrix fdG = oracle::central_difference([&](const Matrix& G) { return value(params.W, Vector(G)); },
                                          vec_to_matrix(params.gamma));
  Matrix fdM = oracle::central_difference([&](const Matrix& M) { return loss_value(loss, M, Xbar, Y); },
                                          params.M());
  return std::max({oracle::relative_error(g.gW, fdW), oracle::relative_error(vec_to_matrix(g.gGamma), fdG),
                   oracle::relative_error(g.gM, fdM)});
}

double deep_fd_error(Loss loss, Index depth, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> width(1, 3);
  const Index n = 8, B = 4;
  std::vector<Index> widths{width(rng) + 1};
  for (Index l = 1; l < depth; ++l) widths.push_back(width(rng) + 1);
  widths.push_back(loss == Loss::logistic ? 1 : width(rng));
  DeepLinearParams params = DeepLinearParams::default_init(widths, rng());
  for (auto& layer : params.layers) layer.gamma = Vector::Ones(layer.d()) + oracle::gaussian(layer.d(), 1, rng, 0.3);
  Matrix X = oracle::gaussian(widths.front(), n, rng);
  Matrix Y = loss == Loss::logistic ? Matrix(oracle::random_labels(n, rng)) : oracle::gaussian(widths.back(), n, rng);
  auto batches = uniform_batches(n, B);
  const double eps = kDefaultTrainingEpsilon;
  DeepGradients g = deep_grad(loss, params, X, Y, batches, eps);
  auto at = [&](const DeepLinearParams& p) { return deep_loss(loss, p, X, Y, batches, eps); };

  double worst = 0.0;
  if (params.input) {
    Matrix fd = oracle::central_difference(
        [&](const Matrix& W1) {
          DeepLinearParams p = params;
          p.input = W1;
          return at(p);
        },
        *params.input);
    worst = std::max(worst, oracle::relative_error(*g.input, fd));
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Matrix fdW = oracle::central_difference(
        [&](const Matrix& W) {
          DeepLinearParams p = params;
          p.layers[l].W = W;
          return at(p);
        },
        params.layers[l].W);
    Matrix fdG = oracle::central_difference(
        [&](const Matrix& G) {
          DeepLinearParams p = params;
          p.layers[l].gamma = Vector(G);
          return at(p);
        },
        vec_to_matrix(params.layers[l].gamma));
    worst = std::max({worst, oracle::relative_error(g.layers[l].gW, fdW),
                      oracle::relative_error(vec_to_matrix(g.layers[l].gGamma), fdG)});
  }
  return worst;
}

Outcome finite_differences() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int checks = 0;
  for (int t = 0; t < 50; ++t) {
    Loss loss = t % 2 == 0 ? Loss::squared : Loss::logistic;
    worst = std::max(worst, shallow_fd_error(loss, rng));
    for (Index depth = 1; depth <= 3; ++depth) worst = std::max(worst, deep_fd_error(loss, depth, rng));
    checks += 4;
  }
  return {worst <= 1e-5, fmt("max relative error %.3e over %d gradient sets (shallow + depth 1..3)", worst, checks)};
}

// Criterion 3 -----------------------------------------------------------------

// M_pi^* for d = p = 1 straight from the normal equation, BN by loops.
double scalar_optimum(const Matrix& x, const Matrix& y, const std::vector<Index>& perm, Index B) {
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(B)) {
    Matrix xb(1, B), yb(1, B);
    for (Index i = 0; i < B; ++i) {
      xb(0, i) = x(0, perm[start + static_cast<std::size_t>(i)]);
      yb(0, i) = y(0, perm[start + static_cast<std::size_t>(i)]);
    }
    Matrix z = oracle::bn_loops(xb, 0.0);
    sxy += (z.array() * yb.array()).sum();
    sxx += z.squaredNorm();
  }
  return sxy / sxx;
}

Outcome rr_average() {
  std::mt19937_64 rng(303);
  const std::pair<Index, Index> shapes[] = {{4, 2}, {6, 2}, {6, 3}};
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    auto [n, B] = shapes[t % 3];
    Dataset ds = Dataset::regression(oracle::gaussian(1, n, rng), oracle::gaussian(1, n, rng));
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double sum = 0.0, count = 0.0;
    do {
      sum += scalar_optimum(ds.X, ds.Y, perm, B);
      count += 1.0;
    } while (std::next_permutation(perm.begin(), perm.end()));
    double lhs = optimum(normalize_rr_full(ds, B)).M(0, 0);
    RRAverage lib = rr_average_check(ds, B);
    worst = std::max({worst, std::abs(lhs - sum / count), std::abs(lib.lhs - lib.rhs), std::abs(lib.rhs - sum / count)});
  }
  return {worst <= 1e-10, fmt("max |M_RR - mean M_pi| %.3e over 20 datasets", worst)};
}

// Criteria 4 and 5 ------------------------------------------------------------

constexpr double kBeta = 0.6;
constexpr double kLrScale = 10.0;
constexpr Index kLongEpochs = 20000;

Dataset desk_dataset() { return gen_synthetic_regression(SyntheticOptions{}, 1); }

Outcome ss_convergence() {
  Dataset ds = desk_dataset();
  BatchPlan plan = BatchPlan::random(ds.n(), 10, 1);
  TrainOptions opt;
  opt.epochs = kLongEpochs;
  NormalizedDataset nds = normalize_ss(ds, plan, opt.epsilon);
  double L_star = risk_value(optimum(nds).M, nds, Loss::squared);
  double alpha = strong_convexity_constant(nds);
  auto res = train_ss(ds, plan, ModelParams::paper_init(1, ds.d()),
                      StepsizeSchedule::theory(ScheduleMode::ss_theory, kBeta, kLrScale), opt);
  double gap0 = res.trace.initial.L_dist - L_star;
  double gap = res.trace.epochs.back().L_dist - L_star;
  double maxD = res.trace.initial.normD;
  for (const auto& r : res.trace.epochs) maxD = std::max(maxD, r.normD);
  EpochInequality ineq = check_epoch_inequality(res.trace, alpha, L_star);
  bool ok = gap <= 1e-3 * gap0 && maxD <= 0.5 && ineq.max_residual <= 0.0 && std::isfinite(ineq.C);
  return {ok, fmt("gap ratio %.3e (<= 1e-3), max ||D|| %.3e (<= 0.5), fitted C %.3e, max residual %.3e, c %.3e x %.0f",
                  gap / gap0, maxD, ineq.C, ineq.max_residual, res.trace.schedule.c, kLrScale)};
}

Outcome rr_convergence() {
  Dataset ds = desk_dataset();
  double ratio_sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainOptions opt;
    opt.epochs = kLongEpochs;
    opt.seed = seed;
    NormalizedDataset eval = normalize_rr_sampled(ds, 10, opt.rr_eval_perms, split_seed(seed, 1), opt.epsilon);
    double L_star = risk_value(optimum(eval).M, eval, Loss::squared);
    auto res = train_rr(ds, 10, ModelParams::paper_init(1, ds.d()),
                        StepsizeSchedule::theory(ScheduleMode::rr_theory, kBeta, kLrScale), opt);
    double ratio = (res.trace.epochs.back().L_dist - L_star) / (res.trace.initial.L_dist - L_star);
    ratio_sum += ratio;
    per_seed += fmt(" %.2e", ratio);
  }
  double mean = ratio_sum / 5.0;
  return {mean <= 1e-2, fmt("mean gap ratio %.3e (<= 1e-2); per seed%s", mean, per_seed.c_str())};
}

// Criterion 6 -----------------------------------------------------------------

Index svd_rank(const Matrix& X) {
  Vector s = Eigen::JacobiSVD<Matrix>(X).singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<Index>((s.array() > 1e-8 * s(0)).count());
}

Outcome rank_check() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> Bd(3, 6), md(2, 5);
  int hits = 0;
  for (int t = 0; t < 100; ++t) {
    Index B = Bd(rng), m = md(rng), n = B * m;
    Index cap = (B - 1) * n / B;
    Index d = std::uniform_int_distribution<Index>(1, cap)(rng);
    Dataset ds = Dataset::regression(oracle::gaussian(d, n, rng), oracle::gaussian(1, n, rng));
    NormalizedDataset nds = normalize_ss(ds, BatchPlan::random(n, B, rng()));
    Index expected = std::min(d, cap);
    RankReport r = rank_report(nds);
    hits += svd_rank(nds.Xbar) == expected && r.rank == expected && r.predicted == expected;
  }
  int rr_hits = 0, rr_total = 0;
  // B >= 3 as for SS: with B = 2 every column is a sign pattern and coordinates
  // that order the points alike give identical rows.
  const std::pair<Index, Index> shapes[] = {{5, 5}, {6, 3}, {8, 4}, {8, 8}};
  for (auto [n, B] : shapes)
    for (Index d : {1, 3, 6, 10}) {
      Dataset ds = Dataset::regression(oracle::gaussian(d, n, rng), oracle::gaussian(1, n, rng));
      NormalizedDataset full = normalize_rr_full(ds, B);
      Index slices = static_cast<Index>(full.batches.size());
      Index expected = std::min(d, (B - 1) * slices);
      RankReport r = rank_report(full);
      rr_hits += svd_rank(full.Xbar) == expected && r.rank == expected;
      ++rr_total;
    }
  return {hits == 100 && rr_hits == rr_total,
          fmt("SS rank matches min{d,(B-1)n/B} in %d/100; RR-full in %d/%d", hits, rr_hits, rr_total)};
}

// Criterion 7 -----------------------------------------------------------------

Outcome monochromatic() {
  RowVector four(4);
  four << 1, 1, -1, -1;
  std::vector<Index> perm{0, 1, 2, 3};
  Index total = 0, count = 0;
  do {
    Index T = 0;
    for (std::size_t b = 0; b < 4; b += 2) T += four(perm[b]) == four(perm[b + 1]);
    if (T != count_monochromatic(four, perm, 2)) return {false, "count_monochromatic disagrees with direct count"};
    total += T;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  bool a = total * 3 == 2 * count && std::abs(monochromatic_expectation(2, 2) - 2.0 / 3.0) <= 1e-15;

  const Index per_class = 256;
  RowVector labels(2 * per_class);
  labels.head(per_class).setConstant(1.0);
  labels.tail(per_class).setConstant(-1.0);
  MonochromaticStats s = monochromatic_stats(labels, 2, 10000, 707, 0.01);
  // Pairs: P(same label) = (n - 1) / (2n - 1) for each of the n batches.
  double pn = static_cast<double>(per_class);
  double exact = pn * (pn - 1) / (2 * pn - 1);
  bool b = s.expectation && std::abs(*s.expectation - exact) <= 1e-9 * exact &&
           std::abs(s.empirical_mean - exact) <= s.azuma_halfwidth;

  const Index B = static_cast<Index>(std::ceil(4 * std::log2(static_cast<double>(per_class))));
  MonochromaticStats c = monochromatic_stats(labels, B, 1000, 708);
  double zero_frac = static_cast<double>(std::count(c.counts.begin(), c.counts.end(), 0)) / 1000.0;
  bool cc = zero_frac >= 0.99;
  return {a && b && cc, fmt("(a) E[T] = %lld/%lld; (b) |mean - E| = %.3f vs half-width %.3f; (c) B=%lld zero-mono %.3f",
                            static_cast<long long>(total), static_cast<long long>(count),
                            std::abs(s.empirical_mean - exact), s.azuma_halfwidth, static_cast<long long>(B), zero_frac)};
}

// Criterion 8 -----------------------------------------------------------------

struct Rates {
  double mean = 0, lower = 0, upper = 0;
};

Rates oracle_rates(const std::vector<double>& pop, Index B, Index trials, double delta, std::uint64_t seed) {
  double mu = oracle::mean(pop);
  double var = 0.0;
  for (double v : pop) var += (v - mu) * (v - mu);
  double sigma = std::sqrt(var / static_cast<double>(pop.size()));
  auto [lo, hi] = std::minmax_element(pop.begin(), pop.end());
  double range = *hi - *lo, bd = static_cast<double>(B);
  double tm = range * std::sqrt(std::log(2 / delta) / bd);
  double tl = 3 * range * std::sqrt(std::log(3 / delta) / (2 * bd));
  double tu = range * std::sqrt(std::log(1 / delta) / (2 * bd));
  std::mt19937_64 rng(seed);
  Rates r;
  std::vector<double> sample;
  for (Index t = 0; t < trials; ++t) {
    sample.clear();
    std::sample(pop.begin(), pop.end(), std::back_inserter(sample), B, rng);
    double m = oracle::mean(sample), v = 0.0;
    for (double x : sample) v += (x - m) * (x - m);
    double s = std::sqrt(v / bd);
    r.mean += std::abs(m - mu) > tm;
    r.lower += s < sigma - tl;
    r.upper += s > sigma + tu;
  }
  r.mean /= static_cast<double>(trials);
  r.lower /= static_cast<double>(trials);
  r.upper /= static_cast<double>(trials);
  return r;
}

Outcome concentration() {
  std::vector<double> pop(512);
  for (std::size_t i = 0; i < pop.size(); ++i) pop[i] = static_cast<double>(i) / static_cast<double>(pop.size() - 1);
  bool ok = true;
  double worst = 0.0;
  for (Index B : {8, 32})
    for (double delta : {0.05, 0.01}) {
      ConcentrationRates lib = concentration_check(pop, B, 10000, delta, 800 + static_cast<std::uint64_t>(B));
      Rates ref = oracle_rates(pop, B, 10000, delta, 900 + static_cast<std::uint64_t>(B));
      for (double rate : {lib.mean, lib.var_lower, lib.var_upper, ref.mean, ref.lower, ref.upper}) {
        ok = ok && rate <= delta;
        worst = std::max(worst, rate / delta);
      }
    }
  return {ok, fmt("max violation rate / delta %.3f (library and independent sampler)", worst)};
}

// Criterion 9 -----------------------------------------------------------------

Outcome toy_regression() {
  // Validate the estimator against the exact n = 1 law from all 2,027,025 matchings.
  Dataset one = gen_toy_regression(1);
  std::map<int, double> law;
  double matchings = 0;
  oracle::for_each_matching(16, [&](const std::vector<std::pair<int, int>>& pairs) {
    int k = 0;
    for (auto [a, b] : pairs) k += one.Y(0, one.X(0, a) > one.X(0, b) ? a : b) > 0;
    law[k] += 1;
    matchings += 1;
  });
  for (auto& [k, c] : law) c /= matchings;
  const Index val_perms = 20000;
  ToyRegressionMC small = mc_toy_regression(1, val_perms, 909);
  std::map<int, double> freq;
  for (Index k : small.k_counts) freq[static_cast<int>(k)] += 1.0 / static_cast<double>(val_perms);
  bool validated = true;
  for (auto& [k, p] : law) validated = validated && std::abs(freq[k] - p) <= 4 * std::sqrt(p * (1 - p) / val_perms) + 1e-12;

  const Index n = 50;
  ToyRegressionMC mc = mc_toy_regression(n, 2000, 910);
  double worst_identity = 0.0;
  for (std::size_t i = 0; i < mc.optima.size(); ++i)
    worst_identity = std::max(worst_identity, std::abs(mc.optima[i] - (static_cast<double>(mc.k_counts[i]) - 4.0 * n) / (4.0 * n)));

  // Independent route: pairwise BN by loops and the scalar normal equation.
  Dataset ds = gen_toy_regression(n);
  std::mt19937_64 rng(911);
  double worst_direct = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<Index> perm(static_cast<std::size_t>(ds.n()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    double direct = scalar_optimum(ds.X, ds.Y, perm, 2);
    double lib = optimum(normalize_ss(ds, BatchPlan::make(perm, 2))).M(0, 0);
    int k = 0;
    for (std::size_t b = 0; b < perm.size(); b += 2) {
      Index hi = ds.X(0, perm[b]) > ds.X(0, perm[b + 1]) ? perm[b] : perm[b + 1];
      k += ds.Y(0, hi) > 0;
    }
    worst_direct = std::max({worst_direct, std::abs(direct - lib), std::abs(direct - (k - 4.0 * n) / (4.0 * n))});
  }
  bool a = mc.frac_nonzero >= 0.8;
  bool b = mc.median_abs >= 0.3 / std::sqrt(static_cast<double>(n));
  bool c = std::abs(mc.rr_estimate) <= 0.02;
  bool d = worst_identity <= 1e-12 && worst_direct <= 1e-12;
  return {validated && a && b && c && d,
          fmt("n=1 law %s; (a) frac nonzero %.3f; (b) median |M| %.4f vs %.4f; (c) |M_RR| %.4f; (d) identity %.1e / %.1e",
              validated ? "matched" : "MISMATCH", mc.frac_nonzero, mc.median_abs, 0.3 / std::sqrt(double(n)),
              std::abs(mc.rr_estimate), worst_identity, worst_direct)};
}

// Criterion 10 ----------------------------------------------------------------

Outcome toy_classification() {
  const Index n = 4, perms = 5000;
  const std::uint64_t seed = 1010;
  ToyClassificationMC mc = mc_toy_classification(n, perms, seed);
  const double p = 1.0 / 9.0;
  bool a = mc.frac_pls_good >= p - 3 * std::sqrt(p * (1 - p) / static_cast<double>(perms));

  Dataset ds = gen_toy_classification(n).data;
  TrainOptions opt;
  opt.epochs = 2000;
  opt.loss = Loss::logistic;
  opt.epsilon = kToyClassificationEpsilon;
  auto schedule = StepsizeSchedule::constant(1e-2);
  int triggered = 0, monotone = 0, used = 0, rising = 0;
  double best_ratio = 0.0;
  for (Index i = 0; i < perms && used < 10; ++i) {
    if (!mc.good[static_cast<std::size_t>(i)]) continue;
    ++used;
    BatchPlan plan = BatchPlan::make(sampled_permutation(ds.n(), seed, i), 2);
    auto res = train_ss(ds, plan, ModelParams::paper_init(1, 2), schedule, opt);
    triggered += res.trace.verdict == Verdict::diverging;
    auto w = window_means(res.trace, opt.monitor_window, false);
    monotone += std::adjacent_find(w.begin(), w.end(), std::less_equal<>()) == w.end();
    auto g = window_means(res.trace, opt.monitor_window, true);
    rising += g.back() > *std::min_element(g.begin(), g.end());
    best_ratio = std::max(best_ratio, g.back() / g.front());
  }
  bool b = used == 10 && triggered == 10 && monotone == 10;

  int rr_triggered = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    opt.seed = s;
    auto res = train_rr(ds, 2, ModelParams::paper_init(1, 2), schedule, opt);
    rr_triggered += res.trace.verdict == Verdict::diverging || res.trace.verdict == Verdict::blow_up;
  }
  bool c = mc.rr_full && mc.rr_kind == SepKind::SC && mc.rr_rank == 2 && rr_triggered == 0;
  return {a && b && c,
          fmt("(a) good fraction %.4f; (b) %d/%d diverging, %d/%d monotone L_pi windows, L_GD rising %d/%d, "
              "max last/first L_GD window %.3f vs factor %.1f; (c) RR kind %s rank %lld, %d/10 RR runs triggered",
              mc.frac_pls_good, triggered, used, monotone, used, rising, used, best_ratio, opt.monitor_factor,
              sep_kind_name(mc.rr_kind),
              static_cast<long long>(mc.rr_rank), rr_triggered)};
}

// Criterion 11 ----------------------------------------------------------------

Outcome two_layer_features() {
  const Index n = 64, B = 16;
  int transitions = 0, gd_sc = 0, ss_start_sc = 0;
  std::string kinds;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Dataset ds = gen_crossing_clusters(CrossingClustersOptions{}, split_seed(seed, 0));
    BatchPlan plan = canonical_plan(BatchPlan::random(n, B, split_seed(seed, 1)));
    DeepLinearParams init = DeepLinearParams::default_init({2, 2, 1}, split_seed(seed, 2));
    TrainOptions opt;
    opt.epochs = 10000;
    opt.loss = Loss::logistic;
    opt.epsilon = 1e-5;
    Dataset shuffled = ds.select(plan.perm);
    auto batches = uniform_batches(n, B);
    auto kind_of = [&](const DeepLinearParams& p) {
      SepKind ss = decompose(deep_features(p, shuffled.X, batches, opt.epsilon), shuffled.labels()).kind;
      SepKind gd = decompose(deep_features(p, ds.X, single_batch(n), opt.epsilon), ds.labels()).kind;
      return std::pair{ss, gd};
    };
    auto [ss0, gd0] = kind_of(init);
    auto res = train_ss_deep(ds, plan, init, StepsizeSchedule::constant(1e-2), opt);
    auto [ss1, gd1] = kind_of(res.params);
    gd_sc += gd0 == SepKind::SC && gd1 == SepKind::SC;
    ss_start_sc += ss0 == SepKind::SC;
    transitions += ss0 == SepKind::SC && ss1 != SepKind::SC && gd0 == SepKind::SC && gd1 == SepKind::SC;
    kinds += fmt(" %s->%s", sep_kind_name(ss0), sep_kind_name(ss1));
  }
  return {transitions >= 3 && gd_sc == 10,
          fmt("SS SC->LS/PLS in %d/10 seeds (>= 3); GD SC at start and end in %d/10; SS per seed:%s", transitions,
              gd_sc, kinds.c_str())};
}

// Criterion 12 ----------------------------------------------------------------

Outcome separability_oracle() {
  std::mt19937_64 rng(1212);
  std::uniform_int_distribution<int> qd(2, 8), dd(1, 3), grid(-2, 2);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    Index q = qd(rng), d = dd(rng);
    Matrix X(d, q);
    if (t % 2 == 0) {
      X = oracle::gaussian(d, q, rng);
    } else {
      for (Index j = 0; j < q; ++j)
        for (Index i = 0; i < d; ++i) X(i, j) = grid(rng);
    }
    RowVector y = oracle::random_labels(q, rng);
    auto dec = decompose(X, y);
    std::vector<int> sc(dec.sc_indices.begin(), dec.sc_indices.end());
    agree += sc == oracle::cone_oracle_sc(X, y);
  }
  return {agree == 200, fmt("%d/200 datasets agree with the cone oracle", agree)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments restrict the run to the listed criterion ids.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> criteria{
      {1, "gradient identity", 1, gradient_identity},
      {2, "finite differences", 30, finite_differences},
      {3, "RR optimum is the permutation average", 60, rr_average},
      {4, "SS convergence with theory schedule", 120, ss_convergence},
      {5, "RR convergence", 600, rr_convergence},
      {6, "rank of normalized data", 60, rank_check},
      {7, "monochromatic batches", 60, monochromatic},
      {8, "batch statistic concentration", 60, concentration},
      {9, "toy regression", 60, toy_regression},
      {10, "toy classification", 600, toy_classification},
      {11, "two-layer feature separability", 600, two_layer_features},
      {12, "separability oracle", 60, separability_oracle},
  };
  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass && secs < c.budget_seconds;
    failures += !pass;
    std::printf("%s %2d %s: %s [%.2fs / %.0fs]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
