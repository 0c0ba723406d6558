#include "lbkan/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lbkan/errors.hpp"

namespace lbkan {

namespace {

// Degrees above this are rejected; the scratch rows below live on the stack.
constexpr int kMaxDegree = 15;

void require_not_nan(double x) {
  if (std::isnan(x)) throw InvalidArgument("spline: NaN input");
}

void require_size(std::span<double> out, int m) {
  if (out.size() != static_cast<std::size_t>(m)) {
    throw InvalidArgument("spline: output span has " +
                          std::to_string(out.size()) + " entries, expected " +
                          std::to_string(m));
  }
}

}  // namespace

SplineGrid::SplineGrid(int degree, int grid_size, double lo, double hi)
    : degree_(degree), grid_size_(grid_size), lo_(lo), hi_(hi) {
  if (degree < 1 || degree > kMaxDegree) {
    throw InvalidArgument("spline: degree must be in [1, " +
                          std::to_string(kMaxDegree) + "], got " +
                          std::to_string(degree));
  }
  if (grid_size < 1) {
    throw InvalidArgument("spline: grid size must be >= 1, got " +
                          std::to_string(grid_size));
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidArgument("spline: domain requires finite lo < hi");
  }
  h_ = (hi - lo) / grid_size;
  const int count = grid_size + 2 * degree + 1;
  knots_.resize(count);
  for (int j = 0; j < count; ++j) {
    knots_[j] = lo + static_cast<double>(j - degree) * h_;
  }
  // Pin the core endpoints exactly.
  knots_[degree] = lo;
  knots_[degree + grid_size] = hi;
}

int SplineGrid::core_interval(double x) const noexcept {
  const int s = static_cast<int>(std::floor((x - lo_) / h_));
  return std::clamp(s, 0, grid_size_ - 1);
}

void SplineGrid::active_basis(int span, double x, int p,
                              double* row) const noexcept {
  std::array<double, kMaxDegree + 1> left{};
  std::array<double, kMaxDegree + 1> right{};
  const double* t = knots_.data();
  row[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = row[r] / (right[r + 1] + left[j - r]);
      row[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    row[j] = saved;
  }
}

void SplineGrid::eval_basis(double x, std::span<double> out) const {
  require_not_nan(x);
  require_size(out, basis_count());
  const double xc = std::clamp(x, lo_, hi_);
  const int s = core_interval(xc);
  std::array<double, kMaxDegree + 1> row{};
  active_basis(s + degree_, xc, degree_, row.data());
  std::fill(out.begin(), out.end(), 0.0);
  for (int r = 0; r <= degree_; ++r) out[s + r] = row[r];
}

std::vector<double> SplineGrid::eval_basis(double x) const {
  std::vector<double> out(basis_count());
  eval_basis(x, out);
  return out;
}

void SplineGrid::eval_basis_and_deriv(double x, std::span<double> values,
                                      std::span<double> derivs) const {
  require_not_nan(x);
  require_size(values, basis_count());
  require_size(derivs, basis_count());
  const bool clamped = x < lo_ || x > hi_;
  const double xc = std::clamp(x, lo_, hi_);
  const int s = core_interval(xc);
  const int span = s + degree_;
  const int k = degree_;

  std::array<double, kMaxDegree + 1> full{};
  active_basis(span, xc, k, full.data());
  std::fill(values.begin(), values.end(), 0.0);
  for (int r = 0; r <= k; ++r) values[s + r] = full[r];

  std::fill(derivs.begin(), derivs.end(), 0.0);
  if (clamped) return;

  // B'_{m,k} = k [B_{m,k-1}/(t_{m+k}-t_m) - B_{m+1,k-1}/(t_{m+k+1}-t_{m+1})]
  // with the degree k-1 row holding B_{span-k+1 .. span, k-1}.
  std::array<double, kMaxDegree + 1> lower{};
  active_basis(span, xc, k - 1, lower.data());
  const double* t = knots_.data();
  for (int r = 0; r <= k; ++r) {
    const int m = span - k + r;
    double d = 0.0;
    if (r >= 1) d += lower[r - 1] / (t[m + k] - t[m]);
    if (r <= k - 1) d -= lower[r] / (t[m + k + 1] - t[m + 1]);
    derivs[s + r] = k * d;
  }
}

void SplineGrid::eval_basis_deriv(double x, std::span<double> out) const {
  std::vector<double> values(basis_count());
  eval_basis_and_deriv(x, values, out);
}

std::vector<double> SplineGrid::eval_basis_deriv(double x) const {
  std::vector<double> out(basis_count());
  eval_basis_deriv(x, out);
  return out;
}

}  // namespace lbkan
