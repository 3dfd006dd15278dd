#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "shufflebn/dataset.hpp"
#include "shufflebn/deep_model.hpp"
#include "shufflebn/model.hpp"

namespace shufflebn {

enum class ScheduleMode { manual, constant, ss_theory, rr_theory };
const char* schedule_mode_name(ScheduleMode mode);
ScheduleMode parse_schedule_mode(const std::string& name);

// eta_k = multiplier * c / k^beta (k >= 1); constant mode ignores beta.
struct StepsizeSchedule {
  double beta = 0.6;
  double c = 1e-3;
  ScheduleMode mode = ScheduleMode::manual;
  double multiplier = 1.0;

  static StepsizeSchedule manual(double c, double beta);
  static StepsizeSchedule constant(double eta);
  static StepsizeSchedule theory(ScheduleMode mode, double beta, double multiplier = 1.0);

  void validate() const;
  double eta(Index k) const;
};

// Measured ingredients of the theory-mode constant.
struct TheoryConstants {
  double alpha = 0.0;
  double frobenius_sq = 0.0;
  double C_L = 0.0;
  double C_w = 0.0;
  double c = 0.0;
  int iterations = 0;
};

enum class Verdict { undetermined, converging, plateaued, diverging, blow_up };
const char* verdict_name(Verdict v);

struct EpochRecord {
  Index epoch = 0;
  double eta = 0.0;
  double L_dist = 0.0;  // L_pi for SS, sampled-RR estimate for RR, L_GD for GD
  double L_gd = 0.0;
  double normD = 0.0;
  double normW = 0.0;
  double normG = 0.0;
  double normM = 0.0;
};

struct TrainTrace {
  EpochRecord initial;               // state before the first epoch (epoch 0)
  std::vector<EpochRecord> epochs;   // one per completed epoch
  Verdict verdict = Verdict::undetermined;
  StepsizeSchedule schedule;         // resolved (theory modes have c filled in)
  std::optional<TheoryConstants> theory;
  double max_normM = 0.0;
};

struct StepInfo {
  Index epoch;
  Index step;
  double eta;
  const ModelParams& before;
  const ModelParams& after;
  const Matrix& features;  // normalized batch
  const Matrix& targets;
};

using StepObserver = std::function<void(const StepInfo&)>;

struct TrainOptions {
  Index epochs = 0;
  Loss loss = Loss::squared;
  double epsilon = kDefaultTrainingEpsilon;
  double momentum = 0.0;
  std::uint64_t seed = 0;        // train_rr permutation stream
  Index rr_eval_perms = 100;     // permutations behind the sampled-RR risk estimate
  Index monitor_window = 50;
  double monitor_factor = 2.0;
  StepObserver observer;         // shallow trainers only
};

template <class Params>
struct TrainResult {
  Params params;
  TrainTrace trace;
};

using ShallowResult = TrainResult<ModelParams>;
using DeepResult = TrainResult<DeepLinearParams>;

ShallowResult train_ss(const Dataset& ds, const BatchPlan& plan, ModelParams init,
                       StepsizeSchedule schedule, const TrainOptions& opt);
ShallowResult train_rr(const Dataset& ds, Index batch_size, ModelParams init,
                       StepsizeSchedule schedule, const TrainOptions& opt);
ShallowResult train_gd(const Dataset& ds, ModelParams init, StepsizeSchedule schedule,
                       const TrainOptions& opt);

// Deep variants renormalize every batch through the live weights.
DeepResult train_ss_deep(const Dataset& ds, const BatchPlan& plan, DeepLinearParams init,
                         StepsizeSchedule schedule, const TrainOptions& opt);
DeepResult train_rr_deep(const Dataset& ds, Index batch_size, DeepLinearParams init,
                         StepsizeSchedule schedule, const TrainOptions& opt);
DeepResult train_gd_deep(const Dataset& ds, DeepLinearParams init, StepsizeSchedule schedule,
                         const TrainOptions& opt);

// c = min{1/2, 2/alpha, sqrt((2b-1) / (4 (1 + 1/(2b-1)) C_w^2 C_L ||Xbar||_F^2))}
// with C_L, C_w measured over the first epoch, iterated to a fixed point.
TheoryConstants ss_theory_constant(const Dataset& ds, const BatchPlan& plan,
                                   const ModelParams& init, double beta, const TrainOptions& opt);
TheoryConstants rr_theory_constant(const Dataset& ds, Index batch_size, const ModelParams& init,
                                   double beta, const TrainOptions& opt);

// Same batch as plan with each batch's members in increasing index order.
// Training is invariant to order inside a batch; sorting makes B = n runs of
// SS, RR and GD perform identical floating-point operations.
BatchPlan canonical_plan(const BatchPlan& plan);

struct EpochInequality {
  std::vector<double> residuals;  // one per epoch; <= 0 means satisfied
  double C = 0.0;                 // fitted (or supplied) slack constant
  double max_residual = 0.0;
};

// L(k+1) - L* <= (1 - alpha eta_k / 2)(L(k) - L*) + C eta_k^2 on L_dist.
// A negative C requests the minimal fitted value.
EpochInequality check_epoch_inequality(const TrainTrace& trace, double alpha, double L_star,
                                       double C = -1.0);

// diverging iff mean L_GD over the last window >= factor * mean over the first
// window and the last window has nondecreasing trend.
Verdict divergence_monitor(const TrainTrace& trace, Index window = 50, double factor = 2.0);

// Mean of L_dist over consecutive windows (used to check monotone decrease).
std::vector<double> window_means(const TrainTrace& trace, Index window, bool use_gd);

}  // namespace shufflebn
