#include "lbkan/mlp.hpp"

#include <string>

#include "lbkan/errors.hpp"
#include "lbkan/kan.hpp"

namespace lbkan {

MlpShape::MlpShape(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) {
    throw InvalidArgument("mlp: shape needs at least an input and an output width");
  }
  for (int w : widths_) {
    if (w < 1) throw InvalidArgument("mlp: layer widths must be >= 1");
  }
  offsets_.push_back(0);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(offsets_.back() +
                       static_cast<std::size_t>(widths_[l] + 1) * widths_[l + 1]);
  }
}

void mlp_forward(const MlpShape& shape, std::span<const double> theta,
                 std::span<const double> input, MlpCache& cache) {
  if (input.size() != static_cast<std::size_t>(shape.input_dim())) {
    throw InvalidArgument("mlp: input has " + std::to_string(input.size()) +
                          " entries, expected " +
                          std::to_string(shape.input_dim()));
  }
  if (theta.size() != shape.param_count()) {
    throw InvalidArgument("mlp: parameter vector has " +
                          std::to_string(theta.size()) + " entries, expected " +
                          std::to_string(shape.param_count()));
  }
  const int layers = shape.layer_count();
  cache.augmented_inputs.resize(layers);
  cache.pre_activations.resize(layers);

  Eigen::VectorXd& first = cache.augmented_inputs[0];
  first.resize(shape.input_dim() + 1);
  for (int i = 0; i < shape.input_dim(); ++i) first[i] = input[i];
  first[shape.input_dim()] = 1.0;

  for (int l = 0; l < layers; ++l) {
    const Eigen::Map<const Eigen::MatrixXd> weights(
        theta.data() + shape.layer_offset(l), shape.layer_rows(l),
        shape.layer_cols(l));
    cache.pre_activations[l].noalias() = weights * cache.augmented_inputs[l];
    if (l + 1 < layers) {
      Eigen::VectorXd& next = cache.augmented_inputs[l + 1];
      const int width = shape.layer_rows(l);
      next.resize(width + 1);
      next.head(width) = cache.pre_activations[l].array().tanh();
      next[width] = 1.0;
    }
  }
  cache.output = cache.pre_activations[layers - 1];
  cache.params_fingerprint = fingerprint(theta);
}

MlpCache mlp_forward(const MlpShape& shape, std::span<const double> theta,
                     std::span<const double> input) {
  MlpCache cache;
  mlp_forward(shape, theta, input, cache);
  return cache;
}

void mlp_jacobian(const MlpShape& shape, std::span<const double> theta,
                  const MlpCache& cache, Eigen::MatrixXd& out) {
  const int layers = shape.layer_count();
  if (theta.size() != shape.param_count() ||
      cache.pre_activations.size() != static_cast<std::size_t>(layers) ||
      cache.params_fingerprint != fingerprint(theta)) {
    throw ContractViolation(
        "mlp: jacobian called with a cache from different parameters");
  }
  const int n = shape.output_dim();
  out.resize(n, static_cast<Eigen::Index>(shape.param_count()));

  Eigen::MatrixXd prefix = Eigen::MatrixXd::Identity(n, n);
  for (int l = layers - 1; l >= 0; --l) {
    const int rows = shape.layer_rows(l);
    const int cols = shape.layer_cols(l);
    const Eigen::VectorXd& a = cache.augmented_inputs[l];
    const Eigen::Index base = static_cast<Eigen::Index>(shape.layer_offset(l));
    for (int c = 0; c < cols; ++c) {
      out.middleCols(base + static_cast<Eigen::Index>(c) * rows, rows) =
          prefix * a[c];
    }
    if (l == 0) break;
    const Eigen::Map<const Eigen::MatrixXd> weights(
        theta.data() + shape.layer_offset(l), rows, cols);
    // d z_{l+1} / d z_l = W_l[:, :n_l] diag(1 - tanh^2(z_l)).
    const Eigen::VectorXd slope =
        1.0 - cache.pre_activations[l - 1].array().tanh().square();
    prefix = prefix * (weights.leftCols(cols - 1) * slope.asDiagonal());
  }
}

Eigen::MatrixXd mlp_jacobian(const MlpShape& shape,
                             std::span<const double> theta,
                             const MlpCache& cache) {
  Eigen::MatrixXd out;
  mlp_jacobian(shape, theta, cache, out);
  return out;
}

}  // namespace lbkan
