#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lbkan/spline.hpp"

namespace lbkan {

// Layer widths [n_1, ..., n_{L+1}] plus the spline grid shared by every edge.
// Layer indices in this API are zero based: layer l maps width l to l+1.
class KanShape {
 public:
  // Throws InvalidArgument unless there are at least two widths, all >= 1.
  // Controllers additionally need n_1 == n_{L+1} (see KanApproximator).
  KanShape(std::vector<int> widths, SplineGrid grid);

  const std::vector<int>& widths() const noexcept { return widths_; }
  const SplineGrid& grid() const noexcept { return grid_; }
  int layer_count() const noexcept { return static_cast<int>(widths_.size()) - 1; }
  int input_dim() const noexcept { return widths_.front(); }
  int output_dim() const noexcept { return widths_.back(); }
  // M + 1: SiLU feature followed by M spline basis values.
  int features_per_node() const noexcept { return grid_.basis_count() + 1; }
  std::size_t edge_count() const noexcept;
  std::size_t param_count() const noexcept { return offsets_.back(); }

  // Layer l parameter block: n_{l+1} x n_l(M+1), column-major, starting at
  // layer_offset(l) in the flat vector.
  std::size_t layer_offset(int l) const { return offsets_.at(l); }
  int layer_rows(int l) const { return widths_.at(l + 1); }
  int layer_cols(int l) const { return widths_.at(l) * features_per_node(); }

 private:
  std::vector<int> widths_;
  SplineGrid grid_;
  std::vector<std::size_t> offsets_;
};

// a_1 = (n_1 n_2 + ... + n_L n_{L+1}) (M + 1).
inline std::size_t param_count(const KanShape& shape) { return shape.param_count(); }

// Flattened weights [vec(theta_1); ...; vec(theta_L)]. Each row segment
// theta_{l,j,i} = [w_b, w_s c_1, ..., w_s c_M] is stored pre-multiplied.
class KanParams {
 public:
  explicit KanParams(const KanShape& shape);  // zeros
  KanParams(const KanShape& shape, Eigen::VectorXd flat);

  const Eigen::VectorXd& flat() const noexcept { return flat_; }
  Eigen::VectorXd& flat() noexcept { return flat_; }

  Eigen::Map<Eigen::MatrixXd> layer(int l);
  Eigen::Map<const Eigen::MatrixXd> layer(int l) const;

  // Coefficient of feature m (0 = SiLU, 1..M = B-spline) on edge i -> j of
  // layer l.
  double& coeff(int l, int j, int i, int m);
  double coeff(int l, int j, int i, int m) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<int> rows_;
  std::vector<int> cols_;
  int features_per_node_;
  Eigen::VectorXd flat_;
};

struct SiluResult {
  double value;
  double derivative;
};

// b(x) = x / (1 + e^-x) and its derivative.
SiluResult silu(double x) noexcept;

// Everything the Jacobian needs from a forward pass.
struct KanEval {
  std::vector<Eigen::VectorXd> layer_inputs;    // eta_1 .. eta_{L+1}
  std::vector<Eigen::VectorXd> features;        // X_l, length n_l (M+1)
  std::vector<Eigen::VectorXd> feature_derivs;  // diagonal blocks of X'_l
  Eigen::VectorXd output;                       // eta_{L+1}
  std::uint64_t params_fingerprint = 0;
};

std::uint64_t fingerprint(std::span<const double> values) noexcept;

// Evaluates the network; `out` is resized as needed and can be reused across
// calls. Throws InvalidArgument on dimension mismatch.
void forward(const KanShape& shape, std::span<const double> theta,
             std::span<const double> input, KanEval& out);
KanEval forward(const KanShape& shape, const KanParams& params,
                std::span<const double> input);

// dPhi/dtheta (n x a_1) assembled from the cached forward pass. Throws
// ContractViolation when `eval` was produced with different parameters.
void jacobian(const KanShape& shape, std::span<const double> theta,
              const KanEval& eval, Eigen::MatrixXd& out);
Eigen::MatrixXd jacobian(const KanShape& shape, const KanParams& params,
                         const KanEval& eval);

// phi_{l,j,i}(eta) for a single edge.
double edge_activation(const KanShape& shape, std::span<const double> theta,
                       int l, int j, int i, double eta);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace lbkan
