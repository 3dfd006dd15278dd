#include "shufflebn/model.hpp"

#include <cmath>
#include <string>

#include "shufflebn/error.hpp"

namespace shufflebn {

namespace {

void check_slice(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar) {
  if (params.gamma.size() != params.W.cols())
    fail(Errc::dimension_mismatch, "gamma has length " + std::to_string(params.gamma.size()) +
                                       ", W has " + std::to_string(params.W.cols()) + " columns");
  if (Xbar.rows() != params.d())
    fail(Errc::dimension_mismatch, "features have d = " + std::to_string(Xbar.rows()) +
                                       ", model expects " + std::to_string(params.d()));
}

void check_targets(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                   const Eigen::Ref<const Matrix>& Y) {
  check_slice(params, Xbar);
  if (Y.rows() != params.p() || Y.cols() != Xbar.cols())
    fail(Errc::dimension_mismatch, "targets are " + std::to_string(Y.rows()) + "x" +
                                       std::to_string(Y.cols()) + ", expected " +
                                       std::to_string(params.p()) + "x" +
                                       std::to_string(Xbar.cols()));
}

void check_labels(const Eigen::Ref<const Matrix>& y) {
  if (y.rows() != 1) fail(Errc::dimension_mismatch, "logistic loss needs p = 1");
  for (Index i = 0; i < y.cols(); ++i)
    if (y(0, i) != 1.0 && y(0, i) != -1.0)
      fail(Errc::non_binary_label, "label at column " + std::to_string(i) + " is not +-1");
}

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
  if (z > 0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

// sigma(-z) = 1 / (1 + exp(z)).
double sigmoid_neg(double z) {
  if (z >= 0) {
    double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

const char* loss_name(Loss loss) { return loss == Loss::squared ? "sq" : "logistic"; }

Loss parse_loss(const std::string& name) {
  if (name == "sq" || name == "squared") return Loss::squared;
  if (name == "logistic") return Loss::logistic;
  fail(Errc::config_error, "unknown loss '" + name + "'");
}

ModelParams ModelParams::paper_init(Index p, Index d) {
  return {Matrix::Zero(p, d), Vector::Ones(d)};
}

ModelParams ModelParams::zeros(Index p, Index d) { return {Matrix::Zero(p, d), Vector::Zero(d)}; }

Matrix forward(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar) {
  check_slice(params, Xbar);
  return params.M() * Xbar;
}

double loss_squared(const Matrix& M, const Eigen::Ref<const Matrix>& Xbar,
                    const Eigen::Ref<const Matrix>& Y) {
  return (Y - M * Xbar).squaredNorm();
}

double loss_logistic(const Matrix& M, const Eigen::Ref<const Matrix>& Xbar,
                     const Eigen::Ref<const Matrix>& y) {
  RowVector out = M * Xbar;
  double total = 0.0;
  for (Index i = 0; i < out.size(); ++i) total += softplus_neg(y(0, i) * out(i));
  return total;
}

double loss_value(Loss loss, const Matrix& M, const Eigen::Ref<const Matrix>& Xbar,
                  const Eigen::Ref<const Matrix>& Y) {
  return loss == Loss::squared ? loss_squared(M, Xbar, Y) : loss_logistic(M, Xbar, Y);
}

Matrix output_gradient(Loss loss, const Matrix& outputs, const Eigen::Ref<const Matrix>& Y) {
  if (loss == Loss::squared) return -2.0 * (Y - outputs);
  Matrix r(1, outputs.cols());
  for (Index i = 0; i < outputs.cols(); ++i) r(0, i) = -Y(0, i) * sigmoid_neg(Y(0, i) * outputs(0, i));
  return r;
}

Gradients gradients_from_gM(const ModelParams& params, Matrix gM) {
  Gradients g;
  g.gW = gM * params.gamma.asDiagonal();
  g.gGamma = (params.W.array() * gM.array()).colwise().sum().transpose();
  g.gM = std::move(gM);
  return g;
}

Gradients grad_minibatch_sq(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                            const Eigen::Ref<const Matrix>& Y) {
  check_targets(params, Xbar, Y);
  Matrix residual = Y - params.M() * Xbar;
  return gradients_from_gM(params, -2.0 * residual * Xbar.transpose());
}

Gradients grad_minibatch_logistic(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                                  const Eigen::Ref<const Matrix>& y) {
  check_targets(params, Xbar, y);
  check_labels(y);
  Matrix r = output_gradient(Loss::logistic, params.M() * Xbar, y);
  return gradients_from_gM(params, r * Xbar.transpose());
}

Gradients grad_minibatch(Loss loss, const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                         const Eigen::Ref<const Matrix>& Y) {
  return loss == Loss::squared ? grad_minibatch_sq(params, Xbar, Y)
                               : grad_minibatch_logistic(params, Xbar, Y);
}

Vector invariance(const ModelParams& params) {
  Vector wsq = params.W.colwise().squaredNorm().transpose();
  return Vector::Ones(params.d()) + wsq - params.gamma.cwiseAbs2();
}

double invariance_norm(const ModelParams& params) {
  return params.d() ? invariance(params).cwiseAbs().maxCoeff() : 0.0;
}

double check_gradient_identity(const ModelParams& params, const Eigen::Ref<const Matrix>& Xbar,
                               const Eigen::Ref<const Matrix>& Y) {
  Gradients g = grad_minibatch_sq(params, Xbar, Y);
  Vector lhs = (params.W.transpose() * g.gW).diagonal();
  Vector rhs = g.gGamma.cwiseProduct(params.gamma);
  return params.d() ? (lhs - rhs).cwiseAbs().maxCoeff() : 0.0;
}

Matrix collapsed_direction(const ModelParams& params, const Gradients& g) {
  return g.gW * params.gamma.asDiagonal() + params.W * g.gGamma.asDiagonal();
}

}  // namespace shufflebn
