#pragma once

#include <optional>
#include <vector>

#include "shufflebn/dataset.hpp"
#include "shufflebn/separability.hpp"

namespace shufflebn {

// Smallest translation of conv(P) that leaves it interior-disjoint from
// conv(N): the distance from the origin to the boundary of conv(N - P), or 0
// when the origin is not interior. Exact for point sets in d <= 3.
double penetration_depth(const Matrix& P, const Matrix& N);

struct RobustnessThresholds {
  double min_scale_ratio = 0.1;  // condition (2): sigma_k / (b_k - a_k) floor
  double max_norm_ratio = 3.0;   // condition (3): ||Xbar_GD||_{2,inf} / sqrt(d) ceiling
};

struct RobustnessReport {
  double gamma = 0.0;
  SepKind gd_kind = SepKind::SC;
  std::optional<double> margin;             // LS case
  std::optional<double> penetration_depth;  // SC case
  bool condition1 = false;
  double min_scale_ratio = 0.0;
  bool condition2 = false;
  double norm_ratio = 0.0;
  bool condition3 = false;
  bool robust = false;
};

RobustnessReport gamma_robustness_report(const Dataset& ds, double gamma,
                                         const RobustnessThresholds& thresholds = {});

struct OverparamCheck {
  Vector v;
  double max_mono_abs = 0.0;  // max |v^T x| over monochromatic batches
  double min_mixed_margin = 0.0;  // min y v^T x over mixed batches (+inf if none)
  Index monochromatic_batches = 0;
};

// Builds v with v^T x = 0 on monochromatic batches and sgn(v^T x) = y on the
// rest by a least-norm solve; requires d > (B - 1) m.
OverparamCheck overparam_direction_check(const NormalizedDataset& nds, const RowVector& labels);

}  // namespace shufflebn
