#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace lbkan::testing {

// Mixed relative error: relative for entries above `floor`, absolute below.
inline double rel_err(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double floor = 1e-3) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, rel_err(a.data()[i], b.data()[i], floor));
  }
  return worst;
}

// Central differences of a vector function of a vector argument.
inline Eigen::MatrixXd central_difference(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
    Eigen::VectorXd at, double step = 1e-6) {
  const Eigen::VectorXd f0 = fn(at);
  Eigen::MatrixXd jac(f0.size(), at.size());
  for (Eigen::Index p = 0; p < at.size(); ++p) {
    const double saved = at[p];
    at[p] = saved + step;
    const Eigen::VectorXd plus = fn(at);
    at[p] = saved - step;
    const Eigen::VectorXd minus = fn(at);
    at[p] = saved;
    jac.col(p) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double lo,
                                     double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lbkan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lbkan::testing
