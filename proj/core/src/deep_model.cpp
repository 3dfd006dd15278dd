#include "shufflebn/deep_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "shufflebn/error.hpp"
#include "shufflebn/random.hpp"

namespace shufflebn {

namespace {

struct BnCache {
  Matrix xhat;
  Vector inv_std;
};

// BN of one batch, remembering what the backward pass needs.
BnCache bn_forward(const Eigen::Ref<const Matrix>& H, double epsilon, Index batch_index) {
  BnCache c;
  c.xhat = bn_batch(H, epsilon, batch_index);
  Vector mean, var;
  batch_moments(H, mean, var);
  c.inv_std.resize(H.rows());
  for (Index k = 0; k < H.rows(); ++k) {
    double denom = std::sqrt(var(k) + epsilon);
    c.inv_std(k) = denom > 0 ? 1.0 / denom : 0.0;
  }
  return c;
}

Matrix bn_backward(const BnCache& c, const Matrix& g) {
  const double B = static_cast<double>(g.cols());
  Vector gmean = g.rowwise().sum() / B;
  Vector gxmean = (g.array() * c.xhat.array()).rowwise().sum() / B;
  Matrix dh = g;
  dh.colwise() -= gmean;
  dh -= c.xhat.cwiseProduct(gxmean.replicate(1, g.cols()));
  return c.inv_std.asDiagonal() * dh;
}

struct BatchCache {
  std::vector<BnCache> bn;  // one per layer
  Matrix out;
};

BatchCache run_batch(const DeepLinearParams& params, const Eigen::Ref<const Matrix>& Xb,
                     double epsilon, Index batch_index) {
  BatchCache cache;
  Matrix H = params.input ? Matrix(*params.input * Xb) : Matrix(Xb);
  for (const auto& layer : params.layers) {
    cache.bn.push_back(bn_forward(H, epsilon, batch_index));
    H = layer.M() * cache.bn.back().xhat;
  }
  cache.out = std::move(H);
  return cache;
}

void check_params(const DeepLinearParams& params, const Matrix& X) {
  if (params.layers.empty()) fail(Errc::dimension_mismatch, "deep model needs at least one layer");
  Index width = params.input ? params.input->rows() : X.rows();
  if (params.input && params.input->cols() != X.rows())
    fail(Errc::dimension_mismatch, "input layer expects d = " +
                                       std::to_string(params.input->cols()));
  for (const auto& layer : params.layers) {
    if (layer.d() != width || layer.gamma.size() != width)
      fail(Errc::dimension_mismatch, "layer widths are incompatible");
    width = layer.p();
  }
}

}  // namespace

bool DeepLinearParams::finite() const {
  if (input && !input->allFinite()) return false;
  for (const auto& l : layers)
    if (!l.finite()) return false;
  return true;
}

DeepLinearParams DeepLinearParams::default_init(const std::vector<Index>& widths,
                                                std::uint64_t seed) {
  if (widths.size() < 2) fail(Errc::config_error, "need at least input and output widths");
  Rng rng(seed);
  auto uniform = [&](Index rows, Index cols) {
    double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    std::uniform_real_distribution<double> U(-bound, bound);
    Matrix W(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) W(i, j) = U(rng);
    return W;
  };
  DeepLinearParams params;
  std::size_t first = 0;
  if (widths.size() > 2) {
    params.input = uniform(widths[1], widths[0]);
    first = 1;
  }
  for (std::size_t l = first; l + 1 < widths.size(); ++l)
    params.layers.push_back({uniform(widths[l + 1], widths[l]), Vector::Ones(widths[l])});
  return params;
}

DeepLinearParams DeepLinearParams::from_shallow(const ModelParams& params) {
  DeepLinearParams deep;
  deep.layers.push_back(params);
  return deep;
}

std::vector<BatchRange> single_batch(Index cols) { return {{0, cols}}; }

std::vector<BatchRange> uniform_batches(Index cols, Index B) {
  if (B < 2) fail(Errc::batch_too_small, "batch size must be >= 2");
  if (cols % B != 0) fail(Errc::config_error, "batch size does not divide column count");
  std::vector<BatchRange> out;
  for (Index c = 0; c < cols; c += B) out.push_back({c, B});
  return out;
}

Matrix deep_forward(const DeepLinearParams& params, const Matrix& X,
                    const std::vector<BatchRange>& batches, double epsilon) {
  check_params(params, X);
  Matrix out(params.output_dim(), X.cols());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& r = batches[b];
    out.middleCols(r.begin, r.size) =
        run_batch(params, X.middleCols(r.begin, r.size), epsilon, static_cast<Index>(b)).out;
  }
  return out;
}

Matrix deep_features(const DeepLinearParams& params, const Matrix& X,
                     const std::vector<BatchRange>& batches, double epsilon) {
  check_params(params, X);
  Matrix out(params.layers.back().d(), X.cols());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& r = batches[b];
    auto cache = run_batch(params, X.middleCols(r.begin, r.size), epsilon, static_cast<Index>(b));
    out.middleCols(r.begin, r.size) = cache.bn.back().xhat;
  }
  return out;
}

double deep_loss(Loss loss, const DeepLinearParams& params, const Matrix& X, const Matrix& Y,
                 const std::vector<BatchRange>& batches, double epsilon) {
  Matrix out = deep_forward(params, X, batches, epsilon);
  return loss_value(loss, Matrix::Identity(out.rows(), out.rows()), out, Y);
}

DeepGradients deep_grad(Loss loss, const DeepLinearParams& params, const Matrix& X,
                        const Matrix& Y, const std::vector<BatchRange>& batches, double epsilon,
                        double* loss_out) {
  check_params(params, X);
  if (Y.cols() != X.cols() || Y.rows() != params.output_dim())
    fail(Errc::dimension_mismatch, "targets do not match the network output");
  DeepGradients grads;
  if (params.input) grads.input = Matrix::Zero(params.input->rows(), params.input->cols());
  for (const auto& l : params.layers)
    grads.layers.push_back({Matrix::Zero(l.p(), l.d()), Vector::Zero(l.d()), Matrix()});
  double total = 0.0;
  const Index L = static_cast<Index>(params.layers.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& r = batches[b];
    auto Xb = X.middleCols(r.begin, r.size);
    auto Yb = Y.middleCols(r.begin, r.size);
    auto cache = run_batch(params, Xb, epsilon, static_cast<Index>(b));
    total += loss_value(loss, Matrix::Identity(cache.out.rows(), cache.out.rows()), cache.out, Yb);
    Matrix g = output_gradient(loss, cache.out, Yb);
    for (Index l = L - 1; l >= 0; --l) {
      const auto& layer = params.layers[static_cast<std::size_t>(l)];
      const auto& bn = cache.bn[static_cast<std::size_t>(l)];
      Matrix gM = g * bn.xhat.transpose();
      auto& gl = grads.layers[static_cast<std::size_t>(l)];
      gl.gW += gM * layer.gamma.asDiagonal();
      gl.gGamma += (layer.W.array() * gM.array()).colwise().sum().transpose().matrix();
      Matrix gxhat = layer.M().transpose() * g;
      g = bn_backward(bn, gxhat);
    }
    if (params.input) *grads.input += g * Xb.transpose();
  }
  if (loss_out) *loss_out = total;
  return grads;
}

}  // namespace shufflebn
