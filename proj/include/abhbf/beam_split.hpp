// SPDX-License-Identifier: Apache-2.0
//
// Beam-split analysis: frequency-shifted direction components, their
// deviations from the carrier-frequency design point, the exact normalized
// array gain and its separable sinc approximation.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "abhbf/array.hpp"

namespace abhbf {

// Direction components seen by the array at frequency f when the physical
// path sits at (theta, psi): the carrier-design cosines scaled by f/fc.
inline DirectionPair direction_components(double theta, double psi, double f,
                                          double fc) {
  if (!(f > 0.0) || !(fc > 0.0))
    throw std::invalid_argument("direction_components: frequencies must be > 0");
  const double r = f / fc;
  const DirectionPair d = direction_from_angles(theta, psi);
  return {r * d.u, r * d.v};
}

// Frequency-induced deviation (dU, dV) = (f/fc - 1) * (u, v).
inline DirectionPair direction_deviation(double theta, double psi, double f,
                                         double fc) {
  if (!(f > 0.0) || !(fc > 0.0))
    throw std::invalid_argument("direction_deviation: frequencies must be > 0");
  const double r = f / fc - 1.0;
  const DirectionPair d = direction_from_angles(theta, psi);
  return {r * d.u, r * d.v};
}

// |sin(Mx/2) / (M sin(x/2))|, the normalized magnitude of the Dirichlet
// kernel of an M-element uniform array. The argument is reduced modulo 2*pi
// first so the removable singularities at multiples of 2*pi are evaluated
// from their series limit instead of a 0/0.
inline double dirichlet_magnitude(int m, double x) {
  const double e = std::remainder(x, 2.0 * pi);
  if (std::abs(e) < 1e-9) {
    const double mm = static_cast<double>(m);
    return std::abs(1.0 - (mm * mm - 1.0) * e * e / 24.0);
  }
  return std::abs(std::sin(0.5 * m * e) / (m * std::sin(0.5 * e)));
}

// Closed-form normalized array gain of a URA for deviation (dU, dV):
// the double sum over elements factorizes into two Dirichlet kernels.
inline double dirichlet_array_gain(const UraGeometry& geom, double dU, double dV) {
  return dirichlet_magnitude(geom.m_x, pi * dU) * dirichlet_magnitude(geom.m_y, pi * dV);
}

// Normalized array gain |a_T^H(theta, psi, f) w| of an arbitrary beamformer.
// The caller owns the normalization of w; a single beam matched at fc must be
// scaled by 1/m so that its narrowband gain is exactly 1.
inline double exact_array_gain(const CVector& beamformer, const UraGeometry& geom,
                               double theta, double psi, double f, double fc) {
  if (beamformer.size() != geom.size())
    throw std::invalid_argument("exact_array_gain: beamformer length != array size");
  if (!(f > 0.0) || !(fc > 0.0))
    throw std::invalid_argument("exact_array_gain: frequencies must be > 0");
  const CVector a = steering_vector(geom, direction_from_angles(theta, psi), f / fc);
  return std::abs(a.dot(beamformer));
}

// Matched single-beam beamformer for a direction, scaled so that
// exact_array_gain(w, ..., fc, fc) == 1.
inline CVector matched_beamformer(const UraGeometry& geom, DirectionPair dir) {
  return steering_vector(geom, dir, 1.0) / static_cast<double>(geom.size());
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Separable sinc approximation of the normalized array gain,
// |sinc(m_x pi dU / 2) sinc(m_y pi dV / 2)|.
inline double sinc_gain_approx(const UraGeometry& geom, double dU, double dV) {
  return std::abs(sinc(0.5 * geom.m_x * pi * dU) * sinc(0.5 * geom.m_y * pi * dV));
}

// Per-subcarrier gain profile of a fixed beamformer toward one direction.
inline std::vector<double> gain_profile(const CVector& beamformer,
                                        const UraGeometry& geom, double theta,
                                        double psi, std::span<const double> frequencies,
                                        double fc) {
  std::vector<double> out;
  out.reserve(frequencies.size());
  for (double f : frequencies)
    out.push_back(exact_array_gain(beamformer, geom, theta, psi, f, fc));
  return out;
}

}  // namespace abhbf
