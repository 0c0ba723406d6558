#pragma once

#include <span>
#include <vector>

namespace lbkan {

// Uniform B-spline grid on [lo, hi] with G core intervals, extended by k
// intervals on each side. Immutable after construction.
class SplineGrid {
 public:
  // Throws InvalidArgument on degree < 1, grid_size < 1 or lo >= hi.
  SplineGrid(int degree, int grid_size, double lo, double hi);

  int degree() const noexcept { return degree_; }
  int grid_size() const noexcept { return grid_size_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double spacing() const noexcept { return h_; }
  // M = G + k.
  int basis_count() const noexcept { return grid_size_ + degree_; }
  const std::vector<double>& knots() const noexcept { return knots_; }

  // B_1..B_M at x (clamped to [lo, hi]). `out` must have basis_count()
  // entries. Throws InvalidArgument on NaN.
  void eval_basis(double x, std::span<double> out) const;
  std::vector<double> eval_basis(double x) const;

  // dB_m/dx at x; the zero vector when x lies outside [lo, hi].
  void eval_basis_deriv(double x, std::span<double> out) const;
  std::vector<double> eval_basis_deriv(double x) const;

  // Values and derivatives in one pass.
  void eval_basis_and_deriv(double x, std::span<double> values,
                            std::span<double> derivs) const;

 private:
  // Index s of the core interval [lo + s*h, lo + (s+1)*h] holding the clamped
  // x; x == hi maps to the last interval.
  int core_interval(double x) const noexcept;
  // Fills `row` (k+1 entries) with the nonzero degree-p basis values on knot
  // span `span`, using the triangular Cox-de Boor scheme.
  void active_basis(int span, double x, int p, double* row) const noexcept;

  int degree_;
  int grid_size_;
  double lo_;
  double hi_;
  double h_;
  std::vector<double> knots_;
};

inline SplineGrid make_grid(int degree, int grid_size, double lo, double hi) {
  return SplineGrid(degree, grid_size, lo, hi);
}

}  // namespace lbkan
