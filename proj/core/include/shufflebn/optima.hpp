#pragma once

#include <cstdint>
#include <vector>

#include "shufflebn/dataset.hpp"

namespace shufflebn {

struct Optimum {
  Matrix M;                    // p x d
  bool rank_deficient = false;  // min-norm solution of singular normal equations
};

// argmin_M of the squared distorted risk: M (Xbar Xbar^T) = Y Xbar^T.
Optimum optimum(const NormalizedDataset& nds);

// ||(Y - M Xbar) Xbar^T||_F
double normal_equation_residual(const Matrix& M, const NormalizedDataset& nds);

struct RRAverage {
  double lhs = 0.0;  // optimum of the RR-full dataset
  double rhs = 0.0;  // mean of the SS optima over all n! permutations
};

RRAverage rr_average_check(const Dataset& ds, Index batch_size);

double normalized_distance(const Matrix& M, const Matrix& M_ref);

std::vector<double> distortion_histogram(const Dataset& ds, Index batch_size, Index num_perms,
                                         std::uint64_t seed);

struct DistortionSummary {
  std::vector<double> distances;
  double mean = 0.0;
  double median = 0.0;
  double rr_distance = 0.0;  // distance of the sampled-RR optimum
  Index rr_perms = 0;
};

DistortionSummary distortion_summary(const Dataset& ds, Index batch_size, Index num_perms,
                                     std::uint64_t seed, Index rr_perms = 1000);

double median(std::vector<double> values);

}  // namespace shufflebn
