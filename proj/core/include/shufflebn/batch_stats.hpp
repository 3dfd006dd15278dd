#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shufflebn/types.hpp"

namespace shufflebn {

// Number of batches of the permuted label sequence whose labels all agree.
Index count_monochromatic(const RowVector& labels, const std::vector<Index>& perm, Index batch_size);

struct MonochromaticStats {
  double empirical_mean = 0.0;
  std::vector<Index> counts;          // T for every sampled permutation
  std::optional<double> expectation;  // balanced two-class closed form
  double azuma_halfwidth = 0.0;
  Index per_class = 0;
};

// E[T] = K^2 n / B * C(n, B) / C(Kn, B) with K = 2 classes of n points each;
// half-width sqrt(2 n K^3 log(2/delta) / B).
MonochromaticStats monochromatic_stats(const RowVector& labels, Index batch_size, Index num_perms,
                                       std::uint64_t seed, double delta = 0.01);

double monochromatic_expectation(Index per_class, Index batch_size);
double azuma_halfwidth(Index per_class, Index batch_size, double delta);

struct ConcentrationRates {
  double mean = 0.0;
  double var_lower = 0.0;
  double var_upper = 0.0;
  double mu = 0.0;     // population mean
  double sigma = 0.0;  // population (biased) standard deviation
  double a = 0.0, b = 0.0;
};

// Fraction of size-B samples drawn without replacement that violate
//   |mu_hat - mu| <= (b-a) sqrt(log(2/delta) / B),
//   sigma_hat >= sigma - 3 (b-a) sqrt(log(3/delta) / (2B)),
//   sigma_hat <= sigma + (b-a) sqrt(log(1/delta) / (2B)).
ConcentrationRates concentration_check(const std::vector<double>& values, Index batch_size,
                                       Index num_trials, double delta, std::uint64_t seed);

}  // namespace shufflebn
