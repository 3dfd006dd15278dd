#pragma once

#include <string>

#include "shufflebn/types.hpp"

namespace shufflebn {

enum class Loss { squared, logistic };
const char* loss_name(Loss loss);
Loss parse_loss(const std::string& name);

// f(X) = W * diag(gamma) * Xbar, with Xbar already batch-normalized.
struct ModelParams {
  Matrix W;      // p x d
  Vector gamma;  // d

  static ModelParams paper_init(Index p, Index d);  // (W, Gamma) = (0, I)
  static ModelParams zeros(Index p, Index d);

  Index p() const { return W.rows(); }
  Index d() const { return W.cols(); }
  Matrix M() const { return W * gamma.asDiagonal(); }
  bool finite() const { return W.allFinite() && gamma.allFinite(); }
};

struct Gradients {
  Matrix gW;
  Vector gGamma;
  Matrix gM;
};

Matrix forward(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar);

// Loss values for the collapsed model M on a normalized slice.
double loss_squared(const Matrix& M, const Eigen::Ref<const Matrix>& Xbar,
                    const Eigen::Ref<const Matrix>& Y);
double loss_logistic(const Matrix& M, const Eigen::Ref<const Matrix>& Xbar,
                     const Eigen::Ref<const Matrix>& y);
double loss_value(Loss loss, const Matrix& M, const Eigen::Ref<const Matrix>& Xbar,
                  const Eigen::Ref<const Matrix>& Y);

// Derivative of the loss with respect to the outputs M * Xbar.
Matrix output_gradient(Loss loss, const Matrix& outputs, const Eigen::Ref<const Matrix>& Y);

// Gradients of ||Y - W Gamma Xbar||_F^2 (note the factor 2 of the square).
Gradients grad_minibatch_sq(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                            const Eigen::Ref<const Matrix>& Y);

// Gradients of sum_i log(1 + exp(-y_i yhat_i)).
Gradients grad_minibatch_logistic(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                                  const Eigen::Ref<const Matrix>& y);

Gradients grad_minibatch(Loss loss, const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                         const Eigen::Ref<const Matrix>& Y);

// Parameter gradients from a gradient with respect to M.
Gradients gradients_from_gM(const ModelParams& params, Matrix gM);

// D = I + diag(W^T W - Gamma^2), stored as its diagonal.
Vector invariance(const ModelParams& params);
double invariance_norm(const ModelParams& params);

// max_k |diag(W^T gW)_k - gGamma_k gamma_k| for the squared loss.
double check_gradient_identity(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                               const Eigen::Ref<const Matrix>& Y);

// First-order change of M = W Gamma along (gW, gGamma): gW Gamma + W diag(gGamma).
Matrix collapsed_direction(const ModelParams& params, const Gradients& g);

}  // namespace shufflebn
