#include "lbkan/kan.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "lbkan/errors.hpp"

namespace lbkan {

namespace {

std::vector<std::size_t> layer_offsets(const std::vector<int>& widths,
                                       int features_per_node) {
  std::vector<std::size_t> offsets{0};
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    offsets.push_back(offsets.back() + static_cast<std::size_t>(widths[l]) *
                                           widths[l + 1] * features_per_node);
  }
  return offsets;
}

}  // namespace

KanShape::KanShape(std::vector<int> widths, SplineGrid grid)
    : widths_(std::move(widths)), grid_(std::move(grid)) {
  if (widths_.size() < 2) {
    throw InvalidArgument("kan: shape needs at least an input and an output width");
  }
  for (int w : widths_) {
    if (w < 1) throw InvalidArgument("kan: layer widths must be >= 1");
  }
  offsets_ = layer_offsets(widths_, features_per_node());
}

std::size_t KanShape::edge_count() const noexcept {
  std::size_t edges = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    edges += static_cast<std::size_t>(widths_[l]) * widths_[l + 1];
  }
  return edges;
}

KanParams::KanParams(const KanShape& shape)
    : KanParams(shape, Eigen::VectorXd::Zero(
                           static_cast<Eigen::Index>(shape.param_count()))) {}

KanParams::KanParams(const KanShape& shape, Eigen::VectorXd flat)
    : features_per_node_(shape.features_per_node()), flat_(std::move(flat)) {
  if (static_cast<std::size_t>(flat_.size()) != shape.param_count()) {
    throw InvalidArgument("kan: parameter vector has " +
                          std::to_string(flat_.size()) + " entries, expected " +
                          std::to_string(shape.param_count()));
  }
  for (int l = 0; l < shape.layer_count(); ++l) {
    offsets_.push_back(shape.layer_offset(l));
    rows_.push_back(shape.layer_rows(l));
    cols_.push_back(shape.layer_cols(l));
  }
}

Eigen::Map<Eigen::MatrixXd> KanParams::layer(int l) {
  return {flat_.data() + offsets_.at(l), rows_.at(l), cols_.at(l)};
}

Eigen::Map<const Eigen::MatrixXd> KanParams::layer(int l) const {
  return {flat_.data() + offsets_.at(l), rows_.at(l), cols_.at(l)};
}

double& KanParams::coeff(int l, int j, int i, int m) {
  return layer(l)(j, i * features_per_node_ + m);
}

double KanParams::coeff(int l, int j, int i, int m) const {
  return layer(l)(j, i * features_per_node_ + m);
}

SiluResult silu(double x) noexcept {
  double sigma;
  if (x >= 0.0) {
    sigma = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double ex = std::exp(x);
    sigma = ex / (1.0 + ex);
  }
  return {x * sigma, sigma + x * sigma * (1.0 - sigma)};
}

std::uint64_t fingerprint(std::span<const double> values) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ values.size();
  for (double v : values) {
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

void forward(const KanShape& shape, std::span<const double> theta,
             std::span<const double> input, KanEval& out) {
  if (input.size() != static_cast<std::size_t>(shape.input_dim())) {
    throw InvalidArgument("kan: input has " + std::to_string(input.size()) +
                          " entries, expected " +
                          std::to_string(shape.input_dim()));
  }
  if (theta.size() != shape.param_count()) {
    throw InvalidArgument("kan: parameter vector has " +
                          std::to_string(theta.size()) + " entries, expected " +
                          std::to_string(shape.param_count()));
  }
  const int layers = shape.layer_count();
  const int fpn = shape.features_per_node();
  const int basis = shape.grid().basis_count();

  out.layer_inputs.resize(layers + 1);
  out.features.resize(layers);
  out.feature_derivs.resize(layers);
  out.layer_inputs[0] = Eigen::Map<const Eigen::VectorXd>(
      input.data(), static_cast<Eigen::Index>(input.size()));

  for (int l = 0; l < layers; ++l) {
    const Eigen::VectorXd& eta = out.layer_inputs[l];
    const int width = shape.widths()[l];
    Eigen::VectorXd& x = out.features[l];
    Eigen::VectorXd& dx = out.feature_derivs[l];
    x.resize(width * fpn);
    dx.resize(width * fpn);
    for (int i = 0; i < width; ++i) {
      const SiluResult b = silu(eta[i]);
      x[i * fpn] = b.value;
      dx[i * fpn] = b.derivative;
      shape.grid().eval_basis_and_deriv(
          eta[i], std::span<double>(x.data() + i * fpn + 1, basis),
          std::span<double>(dx.data() + i * fpn + 1, basis));
    }
    const Eigen::Map<const Eigen::MatrixXd> weights(
        theta.data() + shape.layer_offset(l), shape.layer_rows(l),
        shape.layer_cols(l));
    out.layer_inputs[l + 1].noalias() = weights * x;
  }
  out.output = out.layer_inputs[layers];
  out.params_fingerprint = fingerprint(theta);
}

KanEval forward(const KanShape& shape, const KanParams& params,
                std::span<const double> input) {
  KanEval eval;
  forward(shape, as_span(params.flat()), input, eval);
  return eval;
}

void jacobian(const KanShape& shape, std::span<const double> theta,
              const KanEval& eval, Eigen::MatrixXd& out) {
  const int layers = shape.layer_count();
  if (theta.size() != shape.param_count() ||
      eval.features.size() != static_cast<std::size_t>(layers) ||
      eval.params_fingerprint != fingerprint(theta)) {
    throw ContractViolation(
        "kan: jacobian called with an evaluation from different parameters");
  }
  const int n = shape.output_dim();
  const int fpn = shape.features_per_node();
  out.resize(n, static_cast<Eigen::Index>(shape.param_count()));

  // prefix = Xi_L ... Xi_{l+1}, starting from the identity at the output.
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd xi;
  for (int l = layers - 1; l >= 0; --l) {
    const int rows = shape.layer_rows(l);
    const int cols = shape.layer_cols(l);
    const Eigen::VectorXd& x = eval.features[l];
    const Eigen::Index base = static_cast<Eigen::Index>(shape.layer_offset(l));

    // Lambda_l = X_l^T (x) I: the column for theta_l(j, c) is prefix(:, j) * X_l[c].
    for (int c = 0; c < cols; ++c) {
      out.middleCols(base + static_cast<Eigen::Index>(c) * rows, rows) =
          prefix * x[c];
    }
    if (l == 0) break;

    // Xi_l = theta_l X'_l with X'_l block diagonal, one (M+1) column per node.
    const Eigen::Map<const Eigen::MatrixXd> weights(
        theta.data() + shape.layer_offset(l), rows, cols);
    const Eigen::VectorXd& dx = eval.feature_derivs[l];
    const int width = shape.widths()[l];
    xi.resize(rows, width);
    for (int i = 0; i < width; ++i) {
      xi.col(i).noalias() =
          weights.middleCols(i * fpn, fpn) * dx.segment(i * fpn, fpn);
    }
    prefix = prefix * xi;
  }
}

Eigen::MatrixXd jacobian(const KanShape& shape, const KanParams& params,
                         const KanEval& eval) {
  Eigen::MatrixXd out;
  jacobian(shape, as_span(params.flat()), eval, out);
  return out;
}

double edge_activation(const KanShape& shape, std::span<const double> theta,
                       int l, int j, int i, double eta) {
  if (l < 0 || l >= shape.layer_count() || j < 0 || j >= shape.layer_rows(l) ||
      i < 0 || i >= shape.widths()[l]) {
    throw InvalidArgument("kan: edge index out of range");
  }
  if (theta.size() != shape.param_count()) {
    throw InvalidArgument("kan: parameter vector size mismatch");
  }
  const int fpn = shape.features_per_node();
  const int rows = shape.layer_rows(l);
  const double* base = theta.data() + shape.layer_offset(l);
  auto weight = [&](int m) {
    return base[static_cast<std::size_t>(i * fpn + m) * rows + j];
  };
  std::vector<double> b(shape.grid().basis_count());
  shape.grid().eval_basis(eta, b);
  double value = weight(0) * silu(eta).value;
  for (int m = 0; m < shape.grid().basis_count(); ++m) value += weight(m + 1) * b[m];
  return value;
}

}  // namespace lbkan
