#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "lbkan/kan.hpp"
#include "lbkan/mlp.hpp"

namespace lbkan {

// A parametric function approximator Phi(x, theta) together with its
// parameter Jacobian. The controller and simulator only see this interface.
// Instances carry scratch buffers, so each simulation owns its own instance
// (see clone()).
class Approximator {
 public:
  virtual ~Approximator() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual std::size_t param_count() const = 0;

  // Writes Phi(x, theta) into `phi` (length dim()) and dPhi/dtheta into
  // `jac` (dim() x param_count()).
  virtual void evaluate(std::span<const double> x,
                        std::span<const double> theta, Eigen::VectorXd& phi,
                        Eigen::MatrixXd& jac) = 0;

  virtual std::unique_ptr<Approximator> clone() const = 0;
};

class KanApproximator final : public Approximator {
 public:
  // Throws InvalidArgument unless input and output widths agree.
  explicit KanApproximator(KanShape shape);

  std::string name() const override { return "kan"; }
  int dim() const override { return shape_.input_dim(); }
  std::size_t param_count() const override { return shape_.param_count(); }
  void evaluate(std::span<const double> x, std::span<const double> theta,
                Eigen::VectorXd& phi, Eigen::MatrixXd& jac) override;
  std::unique_ptr<Approximator> clone() const override {
    return std::make_unique<KanApproximator>(shape_);
  }

  const KanShape& shape() const noexcept { return shape_; }

 private:
  KanShape shape_;
  KanEval eval_;
};

class MlpApproximator final : public Approximator {
 public:
  explicit MlpApproximator(MlpShape shape);

  std::string name() const override { return "dnn"; }
  int dim() const override { return shape_.input_dim(); }
  std::size_t param_count() const override { return shape_.param_count(); }
  void evaluate(std::span<const double> x, std::span<const double> theta,
                Eigen::VectorXd& phi, Eigen::MatrixXd& jac) override;
  std::unique_ptr<Approximator> clone() const override {
    return std::make_unique<MlpApproximator>(shape_);
  }

  const MlpShape& shape() const noexcept { return shape_; }

 private:
  MlpShape shape_;
  MlpCache cache_;
};

}  // namespace lbkan
