#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shufflebn/dataset.hpp"
#include "shufflebn/model.hpp"

namespace shufflebn {

// X -> W_L G_L BN(... W_2 G_2 BN(W_1 X)) for depth L >= 2 and
// X -> W G BN(X) for depth 1. BN statistics are taken per batch slice.
struct DeepLinearParams {
  std::optional<Matrix> input;     // W_1, absent at depth 1
  std::vector<ModelParams> layers;  // (W_l, Gamma_l) blocks, each preceded by BN

  Index depth() const { return static_cast<Index>(layers.size()) + (input ? 1 : 0); }
  Index input_dim() const { return input ? input->cols() : layers.front().d(); }
  Index output_dim() const { return layers.back().p(); }
  bool finite() const;

  // widths = {d_0, d_1, ..., d_L}; W entries ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), Gamma = I.
  static DeepLinearParams default_init(const std::vector<Index>& widths, std::uint64_t seed);
  static DeepLinearParams from_shallow(const ModelParams& params);
};

struct DeepGradients {
  std::optional<Matrix> input;
  std::vector<Gradients> layers;  // gM left empty
};

// Outputs for raw (unnormalized) columns, normalizing within each batch range.
Matrix deep_forward(const DeepLinearParams& params, const Matrix& X,
                    const std::vector<BatchRange>& batches, double epsilon);

// Input to the last (W, Gamma) block: the normalized features the final
// linear layer sees (BN_pi(W_1 X) at depth 2).
Matrix deep_features(const DeepLinearParams& params, const Matrix& X,
                     const std::vector<BatchRange>& batches, double epsilon);

double deep_loss(Loss loss, const DeepLinearParams& params, const Matrix& X, const Matrix& Y,
                 const std::vector<BatchRange>& batches, double epsilon);

// Reverse-mode gradient of the summed loss, differentiating through the
// batch mean and variance.
DeepGradients deep_grad(Loss loss, const DeepLinearParams& params, const Matrix& X,
                        const Matrix& Y, const std::vector<BatchRange>& batches, double epsilon,
                        double* loss_out = nullptr);

// One batch covering every column.
std::vector<BatchRange> single_batch(Index cols);
// Consecutive batches of size B.
std::vector<BatchRange> uniform_batches(Index cols, Index B);

}  // namespace shufflebn
