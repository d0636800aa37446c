// SPDX-License-Identifier: Apache-2.0
//
// Uniform rectangular array geometry: steering vectors, directional-cosine
// conversions, and the orthogonal quantized beam grid.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace abhbf {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;

// Thrown when a directional-cosine pair has u^2 + v^2 > 1 and therefore
// corresponds to no physical propagation direction.
class OutOfVisibleRegion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Rectangular array of m_x rows by m_y columns, half-wavelength spacing.
struct UraGeometry {
  int m_x = 1;
  int m_y = 1;

  UraGeometry() = default;
  UraGeometry(int mx, int my) : m_x(mx), m_y(my) {
    if (m_x < 1 || m_y < 1)
      throw std::invalid_argument("UraGeometry: array dimensions must be >= 1");
  }

  int size() const { return m_x * m_y; }

  bool operator==(const UraGeometry&) const = default;
};

// Directional cosines (u, v) = (sin(theta)cos(psi), sin(theta)sin(psi)).
// Steering-vector phases are linear in these coordinates, which is what makes
// them the natural domain for the beam grid and for beam-split analysis.
struct DirectionPair {
  double u = 0.0;
  double v = 0.0;

  double squared_norm() const { return u * u + v * v; }

  bool operator==(const DirectionPair&) const = default;
};

inline DirectionPair direction_from_angles(double theta, double psi) {
  const double s = std::sin(theta);
  return {s * std::cos(psi), s * std::sin(psi)};
}

// Inverse of direction_from_angles restricted to the front hemisphere:
// theta in [0, pi/2], psi in (-pi, pi]. psi is 0 by convention at boresight.
inline std::pair<double, double> angles_from_direction(DirectionPair dir) {
  const double r2 = dir.squared_norm();
  if (r2 > 1.0 + 1e-12)
    throw OutOfVisibleRegion("angles_from_direction: u^2 + v^2 > 1");
  const double theta = std::asin(std::min(1.0, std::sqrt(r2)));
  const double psi = (dir.u == 0.0 && dir.v == 0.0) ? 0.0 : std::atan2(dir.v, dir.u);
  return {theta, psi};
}

// One-dimensional uniform-array factor: [1, e^{j pi r u}, ..., e^{j pi r u (m-1)}].
inline CVector steering_factor_1d(int m, double component, double freq_ratio) {
  CVector a(m);
  const double step = pi * freq_ratio * component;
  for (int n = 0; n < m; ++n) a[n] = std::polar(1.0, step * n);
  return a;
}

// Array response for direction (u, v) evaluated at frequency ratio f/fc.
// Built as the Kronecker product of the two 1-D factors, x-dimension outer,
// y-dimension inner: element (x, y) sits at index x*m_y + y and equals
// exp(j pi (f/fc) (x u + y v)). Entries have unit modulus, norm is sqrt(m);
// consumers apply their own scaling.
inline CVector steering_vector(const UraGeometry& geom, DirectionPair dir,
                               double freq_ratio = 1.0) {
  if (!(freq_ratio > 0.0))
    throw std::invalid_argument("steering_vector: freq_ratio must be > 0");
  const CVector ax = steering_factor_1d(geom.m_x, dir.u, freq_ratio);
  const CVector ay = steering_factor_1d(geom.m_y, dir.v, freq_ratio);
  CVector a(geom.size());
  for (int x = 0; x < geom.m_x; ++x)
    for (int y = 0; y < geom.m_y; ++y) a[x * geom.m_y + y] = ax[x] * ay[y];
  return a;
}

// Complete orthogonal beam grid: m_x * m_y directional-cosine pairs with
// x-components (2x-1)/m_x - 1 and y-components (2y-1)/m_y - 1. Steering
// vectors at these pairs (frequency ratio 1) form an orthogonal basis,
// A^H A = m I. Pairs are stored x-major: index (x-1)*m_y + (y-1).
struct QuantizedAngleGrid {
  UraGeometry geometry;
  std::vector<DirectionPair> pairs;
};

inline QuantizedAngleGrid quantized_grid(const UraGeometry& geom) {
  QuantizedAngleGrid grid{geom, {}};
  grid.pairs.reserve(static_cast<std::size_t>(geom.size()));
  for (int x = 1; x <= geom.m_x; ++x) {
    const double lx = (2.0 * x - 1.0) / geom.m_x - 1.0;
    for (int y = 1; y <= geom.m_y; ++y) {
      const double ly = (2.0 * y - 1.0) / geom.m_y - 1.0;
      grid.pairs.push_back({lx, ly});
    }
  }
  return grid;
}

// All grid steering vectors as columns, in grid order.
inline CMatrix grid_steering_matrix(const QuantizedAngleGrid& grid,
                                    double freq_ratio = 1.0) {
  const int m = grid.geometry.size();
  CMatrix a(m, static_cast<int>(grid.pairs.size()));
  for (int j = 0; j < static_cast<int>(grid.pairs.size()); ++j)
    a.col(j) = steering_vector(grid.geometry, grid.pairs[j], freq_ratio);
  return a;
}

}  // namespace abhbf
