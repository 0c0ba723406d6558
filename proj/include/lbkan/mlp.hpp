#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lbkan {

// Fully connected tanh network used as the DNN baseline. Layer l holds a
// weight matrix W_l of size n_{l+1} x (n_l + 1); the extra column multiplies
// a constant 1 appended to the layer input (bias). Hidden layers apply tanh,
// the output layer is linear. Flat ordering is [vec(W_1); ...; vec(W_L)],
// column-major, mirroring the KAN layout.
class MlpShape {
 public:
  explicit MlpShape(std::vector<int> widths);

  const std::vector<int>& widths() const noexcept { return widths_; }
  int layer_count() const noexcept { return static_cast<int>(widths_.size()) - 1; }
  int input_dim() const noexcept { return widths_.front(); }
  int output_dim() const noexcept { return widths_.back(); }
  std::size_t param_count() const noexcept { return offsets_.back(); }
  std::size_t layer_offset(int l) const { return offsets_.at(l); }
  int layer_rows(int l) const { return widths_.at(l + 1); }
  int layer_cols(int l) const { return widths_.at(l) + 1; }

 private:
  std::vector<int> widths_;
  std::vector<std::size_t> offsets_;
};

struct MlpCache {
  std::vector<Eigen::VectorXd> augmented_inputs;  // [a_l; 1] per layer
  std::vector<Eigen::VectorXd> pre_activations;   // z_{l+1} = W_l [a_l; 1]
  Eigen::VectorXd output;
  std::uint64_t params_fingerprint = 0;
};

void mlp_forward(const MlpShape& shape, std::span<const double> theta,
                 std::span<const double> input, MlpCache& cache);
MlpCache mlp_forward(const MlpShape& shape, std::span<const double> theta,
                     std::span<const double> input);

// d output / d theta, n x param_count. Throws ContractViolation on a cache
// produced with different parameters.
void mlp_jacobian(const MlpShape& shape, std::span<const double> theta,
                  const MlpCache& cache, Eigen::MatrixXd& out);
Eigen::MatrixXd mlp_jacobian(const MlpShape& shape,
                             std::span<const double> theta,
                             const MlpCache& cache);

}  // namespace lbkan
