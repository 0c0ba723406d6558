#include "lbkan/approximator.hpp"

#include "lbkan/errors.hpp"

namespace lbkan {

KanApproximator::KanApproximator(KanShape shape) : shape_(std::move(shape)) {
  if (shape_.input_dim() != shape_.output_dim()) {
    throw InvalidArgument("kan: approximator needs matching input and output widths");
  }
}

MlpApproximator::MlpApproximator(MlpShape shape) : shape_(std::move(shape)) {
  if (shape_.input_dim() != shape_.output_dim()) {
    throw InvalidArgument("mlp: approximator needs matching input and output widths");
  }
}

void KanApproximator::evaluate(std::span<const double> x,
                               std::span<const double> theta,
                               Eigen::VectorXd& phi, Eigen::MatrixXd& jac) {
  forward(shape_, theta, x, eval_);
  phi = eval_.output;
  jacobian(shape_, theta, eval_, jac);
}

void MlpApproximator::evaluate(std::span<const double> x,
                               std::span<const double> theta,
                               Eigen::VectorXd& phi, Eigen::MatrixXd& jac) {
  mlp_forward(shape_, theta, x, cache_);
  phi = cache_.output;
  mlp_jacobian(shape_, theta, cache_, jac);
}

}  // namespace lbkan
