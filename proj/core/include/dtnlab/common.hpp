#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtnlab {

using cplx = std::complex<double>;

// Points and frequencies live in R^2 or R^3; a fixed-size array padded with
// zeros in the unused component keeps all the dot-product algebra uniform.
using Vec = std::array<double, 3>;
using CVec = std::array<cplx, 3>;

inline constexpr double kPi = std::numbers::pi;

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline cplx dot(const CVec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline cplx cdot(const CVec& a, const CVec& b) {  // bilinear, no conjugation
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator-(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator*(double s, const Vec& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a linear solve fails to reach its residual contract.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

// Raised when the zero-eigenvalue guard rejects a potential.
class GuardError : public Error {
 public:
  explicit GuardError(const std::string& what) : Error(what) {}
};

}  // namespace dtnlab
