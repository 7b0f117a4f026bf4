#include "tonelli/fourier.hpp"

#include <cmath>

namespace tonelli {

namespace {
constexpr double kTau = 6.28318530717958647692;
using Cplx = std::complex<double>;
}  // namespace

Grid::Grid(std::vector<int> s) : shape(std::move(s)) {
  if (shape.empty()) throw ConfigError("Grid: empty shape");
  for (int n : shape)
    if (n < 1) throw ConfigError("Grid: axis length must be positive");
}

Grid Grid::cubic(int dim, int points_per_axis) {
  return Grid(std::vector<int>(dim, points_per_axis));
}

int Grid::size() const {
  int total = 1;
  for (int n : shape) total *= n;
  return total;
}

int Grid::flat(const std::vector<int>& idx) const {
  int f = 0;
  for (int a = 0; a < dim(); ++a) f = f * shape[a] + idx[a];
  return f;
}

std::vector<int> Grid::multi(int flat) const {
  std::vector<int> idx(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = flat % shape[a];
    flat /= shape[a];
  }
  return idx;
}

Vec Grid::node(int flat) const {
  const auto idx = multi(flat);
  Vec theta(dim());
  for (int a = 0; a < dim(); ++a) theta[a] = static_cast<double>(idx[a]) / shape[a];
  return theta;
}

int dft_frequency(int j, int n) {
  return j < (n + 1) / 2 ? j : j - n;
}

CVec dft1(const CVec& f) {
  const int n = static_cast<int>(f.size());
  CVec c(n);
  for (int j = 0; j < n; ++j) {
    const int k = dft_frequency(j, n);
    Cplx acc(0, 0);
    for (int m = 0; m < n; ++m) acc += f[m] * std::polar(1.0, -kTau * k * m / n);
    c[j] = acc / static_cast<double>(n);
  }
  return c;
}

CVec idft1(const CVec& c) {
  const int n = static_cast<int>(c.size());
  CVec f(n);
  for (int m = 0; m < n; ++m) {
    Cplx acc(0, 0);
    for (int j = 0; j < n; ++j)
      acc += c[j] * std::polar(1.0, kTau * dft_frequency(j, n) * m / n);
    f[m] = acc;
  }
  return f;
}

namespace {

// Apply a 1-D transform along one axis of a row-major flattened array.
template <typename Fn>
CVec transform_axis(const Grid& grid, const CVec& data, int axis, Fn&& fn) {
  const int len = grid.shape[axis];
  int stride = 1;
  for (int a = axis + 1; a < grid.dim(); ++a) stride *= grid.shape[a];
  const int total = grid.size();
  CVec out(total);
  CVec line(len);
  for (int base = 0; base < total; ++base) {
    if ((base / stride) % len != 0) continue;  // visit each line once
    for (int j = 0; j < len; ++j) line[j] = data[base + j * stride];
    CVec res = fn(line);
    for (int j = 0; j < len; ++j) out[base + j * stride] = res[j];
  }
  return out;
}

}  // namespace

CVec dftn(const Grid& grid, const CVec& f) {
  if (static_cast<int>(f.size()) != grid.size()) throw ConfigError("dftn: size mismatch");
  CVec c = f;
  for (int a = 0; a < grid.dim(); ++a)
    c = transform_axis(grid, c, a, [](const CVec& line) { return dft1(line); });
  return c;
}

CVec idftn(const Grid& grid, const CVec& c) {
  if (static_cast<int>(c.size()) != grid.size()) throw ConfigError("idftn: size mismatch");
  CVec f = c;
  for (int a = 0; a < grid.dim(); ++a)
    f = transform_axis(grid, f, a, [](const CVec& line) { return idft1(line); });
  return f;
}

std::vector<int> dft_frequency_multi(const Grid& grid, int flat) {
  auto idx = grid.multi(flat);
  for (int a = 0; a < grid.dim(); ++a) idx[a] = dft_frequency(idx[a], grid.shape[a]);
  return idx;
}

TrigField::TrigField(Grid grid, const Vec& samples) : grid_(std::move(grid)) {
  if (static_cast<int>(samples.size()) != grid_.size())
    throw ConfigError("TrigField: sample count does not match grid");
  coef_ = dftn(grid_, samples.cast<Cplx>());
}

double TrigField::mean() const { return coef_[0].real(); }

double TrigField::operator()(const Vec& theta) const {
  Cplx acc(0, 0);
  for (int j = 0; j < coef_.size(); ++j) {
    const auto k = dft_frequency_multi(grid_, j);
    double phase = 0;
    for (int a = 0; a < grid_.dim(); ++a) phase += k[a] * theta[a];
    acc += coef_[j] * std::polar(1.0, kTau * phase);
  }
  return acc.real();
}

Vec TrigField::gradient(const Vec& theta) const {
  Vec g = Vec::Zero(grid_.dim());
  for (int j = 0; j < coef_.size(); ++j) {
    const auto k = dft_frequency_multi(grid_, j);
    bool nyquist = false;
    for (int a = 0; a < grid_.dim(); ++a)
      if (grid_.shape[a] % 2 == 0 && k[a] == -grid_.shape[a] / 2) nyquist = true;
    if (nyquist) continue;
    double phase = 0;
    for (int a = 0; a < grid_.dim(); ++a) phase += k[a] * theta[a];
    const Cplx factor = coef_[j] * std::polar(1.0, kTau * phase) * Cplx(0, kTau);
    for (int a = 0; a < grid_.dim(); ++a) g[a] += (factor * static_cast<double>(k[a])).real();
  }
  return g;
}

Vec TrigField::derivative_grid(int axis) const {
  if (axis < 0 || axis >= grid_.dim()) throw ConfigError("derivative_grid: bad axis");
  CVec dc = coef_;
  for (int j = 0; j < dc.size(); ++j) {
    const auto k = dft_frequency_multi(grid_, j);
    const bool nyquist = grid_.shape[axis] % 2 == 0 && k[axis] == -grid_.shape[axis] / 2;
    dc[j] *= nyquist ? Cplx(0, 0) : Cplx(0, kTau * k[axis]);
  }
  const CVec vals = idftn(grid_, dc);
  Vec out(vals.size());
  for (int j = 0; j < vals.size(); ++j) out[j] = vals[j].real();
  return out;
}

double TrigField::tail_magnitude() const {
  double tail = 0;
  for (int j = 0; j < coef_.size(); ++j) {
    const auto k = dft_frequency_multi(grid_, j);
    bool high = false;
    for (int a = 0; a < grid_.dim(); ++a)
      if (std::abs(k[a]) >= std::max(1, grid_.shape[a] / 4)) high = true;
    if (high) tail = std::max(tail, std::abs(coef_[j]));
  }
  return tail;
}

}  // namespace tonelli
