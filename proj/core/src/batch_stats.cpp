#include "shufflebn/batch_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "shufflebn/dataset.hpp"
#include "shufflebn/error.hpp"
#include "shufflebn/random.hpp"

namespace shufflebn {

Index count_monochromatic(const RowVector& labels, const std::vector<Index>& perm,
                          Index batch_size) {
  Index T = 0;
  Index n = static_cast<Index>(perm.size());
  for (Index start = 0; start + batch_size <= n; start += batch_size) {
    double first = labels(perm[static_cast<std::size_t>(start)]);
    bool mono = true;
    for (Index c = start + 1; c < start + batch_size && mono; ++c)
      mono = labels(perm[static_cast<std::size_t>(c)]) == first;
    T += mono;
  }
  return T;
}

double monochromatic_expectation(Index per_class, Index batch_size) {
  const double K = 2.0;
  // Ratio of binomials via lgamma keeps large n finite.
  auto lchoose = [](double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
  };
  double n = static_cast<double>(per_class), B = static_cast<double>(batch_size);
  if (batch_size > per_class) return 0.0;
  return K * K * n / B * std::exp(lchoose(n, B) - lchoose(K * n, B));
}

double azuma_halfwidth(Index per_class, Index batch_size, double delta) {
  const double K = 2.0;
  return std::sqrt(2.0 * static_cast<double>(per_class) * K * K * K * std::log(2.0 / delta) /
                   static_cast<double>(batch_size));
}

MonochromaticStats monochromatic_stats(const RowVector& labels, Index batch_size, Index num_perms,
                                       std::uint64_t seed, double delta) {
  const Index n = labels.size();
  if (batch_size < 1 || n % batch_size != 0)
    fail(Errc::config_error, "batch size must divide the number of labels");
  if (num_perms < 1) fail(Errc::config_error, "num_perms must be >= 1");
  MonochromaticStats s;
  s.counts.resize(static_cast<std::size_t>(num_perms));
  parallel_for(s.counts.size(), [&](std::size_t i) {
    auto perm = sampled_permutation(n, seed, static_cast<Index>(i));
    s.counts[i] = count_monochromatic(labels, perm, batch_size);
  });
  s.empirical_mean = std::accumulate(s.counts.begin(), s.counts.end(), 0.0) /
                     static_cast<double>(num_perms);
  Index pos = (labels.array() > 0).count();
  if (2 * pos == n) {
    s.per_class = pos;
    s.expectation = monochromatic_expectation(pos, batch_size);
    s.azuma_halfwidth = azuma_halfwidth(pos, batch_size, delta);
  }
  return s;
}

ConcentrationRates concentration_check(const std::vector<double>& values, Index batch_size,
                                       Index num_trials, double delta, std::uint64_t seed) {
  const Index n = static_cast<Index>(values.size());
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  if (n < 2 || sorted.front() == sorted.back())
    fail(Errc::degenerate_values, "population needs at least two distinct values");
  if (batch_size < 2 || batch_size > n) fail(Errc::config_error, "need 2 <= B <= n");
  if (!(delta > 0.0 && delta < 1.0)) fail(Errc::config_error, "delta must lie in (0, 1)");
  if (num_trials < 1) fail(Errc::config_error, "num_trials must be >= 1");

  ConcentrationRates out;
  out.a = sorted.front();
  out.b = sorted.back();
  const double dn = static_cast<double>(n);
  out.mu = std::accumulate(values.begin(), values.end(), 0.0) / dn;
  double var = 0.0;
  for (double v : values) var += (v - out.mu) * (v - out.mu);
  out.sigma = std::sqrt(var / dn);

  const double range = out.b - out.a, dB = static_cast<double>(batch_size);
  const double mean_bound = range * std::sqrt(std::log(2.0 / delta) / dB);
  const double lower = out.sigma - 3.0 * range * std::sqrt(std::log(3.0 / delta) / (2.0 * dB));
  const double upper = out.sigma + range * std::sqrt(std::log(1.0 / delta) / (2.0 * dB));

  std::vector<std::array<char, 3>> hits(static_cast<std::size_t>(num_trials));
  parallel_for(hits.size(), [&](std::size_t t) {
    Rng rng(split_seed(seed, t));
    std::vector<double> pool = values;
    // Partial Fisher-Yates: the first B entries form a uniform sample without replacement.
    for (Index i = 0; i < batch_size; ++i) {
      std::uniform_int_distribution<Index> pick(i, n - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    double m = 0.0;
    for (Index i = 0; i < batch_size; ++i) m += pool[static_cast<std::size_t>(i)];
    m /= dB;
    double v = 0.0;
    for (Index i = 0; i < batch_size; ++i) {
      double e = pool[static_cast<std::size_t>(i)] - m;
      v += e * e;
    }
    double s = std::sqrt(v / dB);
    hits[t] = {static_cast<char>(std::abs(m - out.mu) > mean_bound),
               static_cast<char>(s < lower), static_cast<char>(s > upper)};
  });
  for (const auto& h : hits) {
    out.mean += h[0];
    out.var_lower += h[1];
    out.var_upper += h[2];
  }
  const double dt = static_cast<double>(num_trials);
  out.mean /= dt;
  out.var_lower /= dt;
  out.var_upper /= dt;
  return out;
}

}  // namespace shufflebn
