#include <doctest.h>

#include <cmath>

#include "tonelli/fourier.hpp"

using namespace tonelli;

namespace {
constexpr double two_pi = 6.283185307179586;
}

TEST_CASE("1-D DFT round trip and known coefficients") {
  const int n = 16;
  CVec f(n);
  for (int j = 0; j < n; ++j)
    f[j] = 1.5 + std::cos(two_pi * j / n) - 2.0 * std::sin(two_pi * 3.0 * j / n);
  const CVec c = dft1(f);
  CHECK(std::abs(c[0] - std::complex<double>(1.5, 0)) < 1e-13);
  CHECK(std::abs(c[1] - std::complex<double>(0.5, 0)) < 1e-13);   // cos -> 1/2 at k=1
  CHECK(std::abs(c[3] - std::complex<double>(0, 1.0)) < 1e-13);   // -2 sin -> +i at k=3
  const CVec back = idft1(c);
  for (int j = 0; j < n; ++j) CHECK(std::abs(back[j] - f[j]) < 1e-12);
}

TEST_CASE("2-D transform round trip") {
  const Grid grid({8, 12});
  CVec f(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const Vec th = grid.node(j);
    f[j] = std::cos(two_pi * (th[0] + 2 * th[1])) + 0.3 * std::sin(two_pi * th[1]);
  }
  const CVec back = idftn(grid, dftn(grid, f));
  for (int j = 0; j < grid.size(); ++j) CHECK(std::abs(back[j] - f[j]) < 1e-12);
}

TEST_CASE("trig interpolation is exact off-grid for band-limited fields") {
  const Grid grid({32});
  Vec samples(32);
  auto fn = [](double t) { return 0.7 + std::sin(two_pi * t) - 0.25 * std::cos(two_pi * 5 * t); };
  for (int j = 0; j < 32; ++j) samples[j] = fn(grid.node(j)[0]);
  const TrigField field(grid, samples);
  CHECK(field.mean() == doctest::Approx(0.7).epsilon(1e-13));
  for (double t : {0.013, 0.41, 0.777}) {
    CHECK(field(Vec::Constant(1, t)) == doctest::Approx(fn(t)).epsilon(1e-12));
    const double deriv = two_pi * std::cos(two_pi * t) + 0.25 * two_pi * 5 * std::sin(two_pi * 5 * t);
    CHECK(field.gradient(Vec::Constant(1, t))[0] == doctest::Approx(deriv).epsilon(1e-11));
  }
}

TEST_CASE("spectral derivative on the grid, 2-D") {
  const Grid grid({16, 16});
  Vec samples(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const Vec th = grid.node(j);
    samples[j] = std::sin(two_pi * th[0]) * std::cos(two_pi * 2 * th[1]);
  }
  const TrigField field(grid, samples);
  const Vec d0 = field.derivative_grid(0);
  const Vec d1 = field.derivative_grid(1);
  for (int j = 0; j < grid.size(); ++j) {
    const Vec th = grid.node(j);
    CHECK(d0[j] == doctest::Approx(two_pi * std::cos(two_pi * th[0]) *
                                   std::cos(two_pi * 2 * th[1]))
                       .epsilon(1e-10));
    CHECK(d1[j] == doctest::Approx(-2 * two_pi * std::sin(two_pi * th[0]) *
                                   std::sin(two_pi * 2 * th[1]))
                       .epsilon(1e-10));
  }
}

TEST_CASE("tail magnitude flags under-resolution") {
  const Grid grid({16});
  Vec smooth(16), rough(16);
  for (int j = 0; j < 16; ++j) {
    smooth[j] = std::cos(two_pi * grid.node(j)[0]);
    rough[j] = std::cos(two_pi * 7 * grid.node(j)[0]);
  }
  CHECK(TrigField(grid, smooth).tail_magnitude() < 1e-14);
  CHECK(TrigField(grid, rough).tail_magnitude() > 0.4);
}

TEST_CASE("grid indexing round trip") {
  const Grid grid({3, 4, 5});
  CHECK(grid.size() == 60);
  for (int j = 0; j < grid.size(); ++j) CHECK(grid.flat(grid.multi(j)) == j);
  CHECK_THROWS_AS(Grid({0, 2}), ConfigError);
}
