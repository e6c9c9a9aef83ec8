#pragma once

// Barrier calculus for K_exp = cl{(x,y,z): y*exp(x/y) <= z, y > 0}.
// F(x,y,z) = -log(y*log(z/y) - x) - log(y) - log(z), a 3-self-concordant barrier.

#include <array>
#include <cmath>

namespace helios::solver::expcone {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Point where s = -grad F(x) equals x (the cone's "unit" point).
inline constexpr Vec3 kCentral{-0.827838399066622, 0.805102001584674, 1.290927709857819};

inline bool primal_interior(const Vec3& v) {
  const double x = v[0], y = v[1], z = v[2];
  if (!(y > 0) || !(z > 0)) return false;
  return y * std::log(z / y) - x > 0;
}

// (u,v,w) in int K*_exp  <=>  u < 0, w > 0, log(-u) + v/u - 1 < log(w).
inline bool dual_interior(const Vec3& s) {
  const double u = s[0], v = s[1], w = s[2];
  if (!(u < 0) || !(w > 0)) return false;
  return std::log(-u) + v / u - 1.0 < std::log(w);
}

inline Vec3 gradient(const Vec3& v) {
  const double x = v[0], y = v[1], z = v[2];
  const double lzy = std::log(z / y);
  const double psi = y * lzy - x;
  return {1.0 / psi, -(lzy - 1.0) / psi - 1.0 / y, -(y / z) / psi - 1.0 / z};
}

inline Mat3 hessian(const Vec3& v) {
  const double x = v[0], y = v[1], z = v[2];
  const double lzy = std::log(z / y);
  const double psi = y * lzy - x;
  const Vec3 dpsi{-1.0, lzy - 1.0, y / z};
  // d2 psi: yy = -1/y, yz = 1/z, zz = -y/z^2
  Mat3 h{};
  const double p2 = psi * psi;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = dpsi[i] * dpsi[j] / p2;
  h[1][1] += (1.0 / y) / psi + 1.0 / (y * y);
  h[1][2] += -(1.0 / z) / psi;
  h[2][1] += -(1.0 / z) / psi;
  h[2][2] += (y / (z * z)) / psi + 1.0 / (z * z);
  (void)x;
  return h;
}

// Solve H a = b for the symmetric positive definite 3x3 H.
inline Vec3 solve3(const Mat3& H, const Vec3& b) {
  const double a11 = H[0][0], a12 = H[0][1], a13 = H[0][2];
  const double a22 = H[1][1], a23 = H[1][2], a33 = H[2][2];
  const double c11 = a22 * a33 - a23 * a23;
  const double c12 = a13 * a23 - a12 * a33;
  const double c13 = a12 * a23 - a13 * a22;
  const double c22 = a11 * a33 - a13 * a13;
  const double c23 = a12 * a13 - a11 * a23;
  const double c33 = a11 * a22 - a12 * a12;
  const double det = a11 * c11 + a12 * c12 + a13 * c13;
  return {(c11 * b[0] + c12 * b[1] + c13 * b[2]) / det, (c12 * b[0] + c22 * b[1] + c23 * b[2]) / det,
          (c13 * b[0] + c23 * b[1] + c33 * b[2]) / det};
}

// Local proximity ||s/mu + grad F(x)||*_x; zero on the central path.
inline double proximity(const Vec3& x, const Vec3& s, double mu) {
  const Vec3 g = gradient(x);
  const Vec3 r{s[0] / mu + g[0], s[1] / mu + g[1], s[2] / mu + g[2]};
  const Vec3 hr = solve3(hessian(x), r);
  const double q = r[0] * hr[0] + r[1] * hr[1] + r[2] * hr[2];
  return std::sqrt(std::max(0.0, q));
}

}  // namespace helios::solver::expcone
