#pragma once

#include <complex>
#include <vector>

#include "tonelli/types.hpp"

namespace tonelli {

using CVec = Eigen::VectorXcd;

/// Uniform row-major grid on [0,1)^d, node j_a / shape[a] along each axis.
struct Grid {
  std::vector<int> shape;

  Grid() = default;
  explicit Grid(std::vector<int> s);
  static Grid cubic(int dim, int points_per_axis);

  int dim() const { return static_cast<int>(shape.size()); }
  int size() const;
  int flat(const std::vector<int>& idx) const;
  std::vector<int> multi(int flat) const;
  Vec node(int flat) const;
};

/// Signed frequency of DFT bin j on an N-point grid (k in [-N/2, N/2)).
int dft_frequency(int j, int n);

/// Forward/backward 1-D DFT, O(N^2), coefficients normalized so that
/// f(theta) = sum_k c_k exp(2 pi i k theta) with k = dft_frequency(j, N).
CVec dft1(const CVec& f);
CVec idft1(const CVec& c);

/// Tensor-product transforms on row-major flattened grids.
CVec dftn(const Grid& grid, const CVec& f);
CVec idftn(const Grid& grid, const CVec& c);
/// Integer frequency vector of flattened coefficient index.
std::vector<int> dft_frequency_multi(const Grid& grid, int flat);

/// Trigonometric interpolant of a real scalar field sampled on a Grid.
class TrigField {
 public:
  TrigField() = default;
  TrigField(Grid grid, const Vec& samples);

  const Grid& grid() const { return grid_; }
  double mean() const;
  double operator()(const Vec& theta) const;
  Vec gradient(const Vec& theta) const;
  /// d/dtheta_axis sampled back on the grid (Nyquist mode dropped).
  Vec derivative_grid(int axis) const;
  /// Largest |c_k| over the top half of the frequency range (decay check).
  double tail_magnitude() const;

 private:
  Grid grid_;
  CVec coef_;
};

}  // namespace tonelli
