#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lbkan/approximator.hpp"
#include "lbkan/errors.hpp"
#include "lbkan/mlp.hpp"
#include "test_util.hpp"

using lbkan::MlpShape;

namespace {

// Scalar loops; W_l(r, c) lives at offset_l + c * n_{l+1} + r and column n_l
// is the bias.
std::vector<double> oracle_mlp(const std::vector<int>& widths, const std::vector<double>& theta,
                               std::vector<double> a) {
  std::size_t offset = 0;
  const std::size_t layers = widths.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int n_in = widths[l];
    const int n_out = widths[l + 1];
    std::vector<double> z(n_out);
    for (int r = 0; r < n_out; ++r) {
      double sum = theta[offset + static_cast<std::size_t>(n_in) * n_out + r];
      for (int c = 0; c < n_in; ++c) sum += theta[offset + static_cast<std::size_t>(c) * n_out + r] * a[c];
      z[r] = l + 1 < layers ? std::tanh(sum) : sum;
    }
    offset += static_cast<std::size_t>(n_in + 1) * n_out;
    a = std::move(z);
  }
  return a;
}

std::vector<int> random_widths(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> layers(1, 4), width(1, 6), io(1, 4);
  const int n = io(rng);
  std::vector<int> w{n};
  const int l = layers(rng);
  for (int i = 1; i < l; ++i) w.push_back(width(rng));
  w.push_back(n);
  return w;
}

}  // namespace

TEST_CASE("parameter count of the baseline network") {
  CHECK(MlpShape({4, 5, 5, 5, 4}).param_count() == 109);
  CHECK(MlpShape({1, 1}).param_count() == 2);
  CHECK(MlpShape({4, 5, 5, 5, 4}).layer_offset(1) == 25);
  CHECK_THROWS_AS(MlpShape({4}), lbkan::InvalidArgument);
  CHECK_THROWS_AS(MlpShape({4, 0, 4}), lbkan::InvalidArgument);
}

TEST_CASE("zero weights give zero output") {
  const MlpShape shape({4, 5, 5, 5, 4});
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(109);
  const auto cache = lbkan::mlp_forward(shape, lbkan::as_span(theta), std::vector<double>{1, 2, 3, 4});
  CHECK(cache.output.norm() == 0.0);
}

TEST_CASE("single identity layer passes the input through") {
  const MlpShape shape({3, 3});
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(12);
  for (int i = 0; i < 3; ++i) theta[i * 3 + i] = 1.0;
  const std::vector<double> x{0.5, -7.0, 2.0};
  const auto cache = lbkan::mlp_forward(shape, lbkan::as_span(theta), x);
  for (int i = 0; i < 3; ++i) CHECK(cache.output[i] == x[i]);
}

TEST_CASE("forward matches scalar oracle") {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto widths = trial < 10 ? std::vector<int>{4, 5, 5, 5, 4} : random_widths(rng);
    const MlpShape shape(widths);
    const Eigen::VectorXd theta = lbkan::testing::random_vector(
        rng, static_cast<Eigen::Index>(shape.param_count()), -1.0, 1.0);
    const Eigen::VectorXd x = lbkan::testing::random_vector(rng, widths.front(), -8.0, 8.0);
    const auto cache = lbkan::mlp_forward(shape, lbkan::as_span(theta), lbkan::as_span(x));
    const auto expected = oracle_mlp(widths, {theta.data(), theta.data() + theta.size()},
                                     {x.data(), x.data() + x.size()});
    for (int j = 0; j < cache.output.size(); ++j) {
      worst = std::max(worst, std::abs(cache.output[j] - expected[j]));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("Jacobian matches central differences") {
  std::mt19937_64 rng(32);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto widths = trial < 5 ? std::vector<int>{4, 5, 5, 5, 4} : random_widths(rng);
    const MlpShape shape(widths);
    const Eigen::VectorXd theta = lbkan::testing::random_vector(
        rng, static_cast<Eigen::Index>(shape.param_count()), -1.0, 1.0);
    const Eigen::VectorXd x = lbkan::testing::random_vector(rng, widths.front(), -8.0, 8.0);
    const auto cache = lbkan::mlp_forward(shape, lbkan::as_span(theta), lbkan::as_span(x));
    const Eigen::MatrixXd jac = lbkan::mlp_jacobian(shape, lbkan::as_span(theta), cache);
    REQUIRE(jac.rows() == widths.back());
    REQUIRE(static_cast<std::size_t>(jac.cols()) == shape.param_count());
    const Eigen::MatrixXd fd = lbkan::testing::central_difference(
        [&](const Eigen::VectorXd& t) {
          return lbkan::mlp_forward(shape, lbkan::as_span(t), lbkan::as_span(x)).output;
        },
        theta);
    worst = std::max(worst, lbkan::testing::max_rel_err(jac, fd));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("linear layer Jacobian is the augmented input Kronecker identity") {
  const MlpShape shape({3, 2});
  std::mt19937_64 rng(33);
  const Eigen::VectorXd theta = lbkan::testing::random_vector(rng, 8, -1.0, 1.0);
  const std::vector<double> x{0.5, -1.5, 2.0};
  const auto cache = lbkan::mlp_forward(shape, lbkan::as_span(theta), x);
  const Eigen::MatrixXd jac = lbkan::mlp_jacobian(shape, lbkan::as_span(theta), cache);
  const double aug[4] = {0.5, -1.5, 2.0, 1.0};
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 2; ++r) {
      for (int row = 0; row < 2; ++row) CHECK(jac(row, c * 2 + r) == (row == r ? aug[c] : 0.0));
    }
  }
}

TEST_CASE("zero input leaves only bias columns in the first layer") {
  const MlpShape shape({4, 5, 5, 5, 4});
  std::mt19937_64 rng(34);
  const Eigen::VectorXd theta = lbkan::testing::random_vector(rng, 109, -1.0, 1.0);
  const auto cache = lbkan::mlp_forward(shape, lbkan::as_span(theta), std::vector<double>(4, 0.0));
  const Eigen::MatrixXd jac = lbkan::mlp_jacobian(shape, lbkan::as_span(theta), cache);
  CHECK(jac.leftCols(20).norm() == 0.0);
  CHECK(jac.middleCols(20, 5).norm() > 0.0);
}

TEST_CASE("stale cache and bad sizes are rejected") {
  const MlpShape shape({4, 5, 5, 5, 4});
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(109, 0.1);
  const auto cache = lbkan::mlp_forward(shape, lbkan::as_span(theta), std::vector<double>{1, 2, 3, 4});
  theta[3] = 0.2;
  CHECK_THROWS_AS(lbkan::mlp_jacobian(shape, lbkan::as_span(theta), cache), lbkan::ContractViolation);
  CHECK_THROWS_AS(lbkan::mlp_forward(shape, lbkan::as_span(theta), std::vector<double>{1, 2}),
                  lbkan::InvalidArgument);
  const Eigen::VectorXd short_theta = Eigen::VectorXd::Zero(100);
  CHECK_THROWS_AS(
      lbkan::mlp_forward(shape, lbkan::as_span(short_theta), std::vector<double>{1, 2, 3, 4}),
      lbkan::InvalidArgument);
}

TEST_CASE("approximators agree with the free functions") {
  std::mt19937_64 rng(35);
  lbkan::MlpApproximator dnn(MlpShape({4, 5, 5, 5, 4}));
  lbkan::KanApproximator kan(lbkan::KanShape({4, 6, 4, 4}, lbkan::SplineGrid(3, 5, -10.0, 10.0)));
  CHECK(dnn.name() == "dnn");
  CHECK(kan.name() == "kan");
  CHECK(dnn.param_count() == 109);
  CHECK(kan.param_count() == 576);
  const Eigen::VectorXd x = lbkan::testing::random_vector(rng, 4, -3.0, 3.0);
  const Eigen::VectorXd td = lbkan::testing::random_vector(rng, 109, -0.5, 0.5);
  Eigen::VectorXd phi;
  Eigen::MatrixXd jac;
  dnn.evaluate(lbkan::as_span(x), lbkan::as_span(td), phi, jac);
  const auto cache = lbkan::mlp_forward(dnn.shape(), lbkan::as_span(td), lbkan::as_span(x));
  CHECK(phi == cache.output);
  CHECK(jac == lbkan::mlp_jacobian(dnn.shape(), lbkan::as_span(td), cache));
  auto copy = kan.clone();
  CHECK(copy->param_count() == 576);
  CHECK_THROWS_AS(lbkan::KanApproximator(lbkan::KanShape({3, 4, 2}, lbkan::SplineGrid(3, 5, -1, 1))),
                  lbkan::InvalidArgument);
  CHECK_THROWS_AS(lbkan::MlpApproximator(MlpShape({3, 2})), lbkan::InvalidArgument);
}
