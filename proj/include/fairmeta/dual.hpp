#pragma once

#include <cmath>

#include <Eigen/Core>

namespace fairmeta {

// Forward-mode scalar carrying a value and one directional derivative.
// Running grad_objective() on Dual parameters seeded with a tangent
// direction v yields the exact Hessian-vector product H*v in the tangent
// slots (forward-over-reverse differentiation).
struct Dual {
  double v = 0.0;  // value
  double t = 0.0;  // tangent

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit promotion from double
  Dual(double value, double tangent) : v(value), t(tangent) {}
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.t + b.t}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.t - b.t}; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.t}; }
inline Dual operator+(const Dual& a) { return a; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.v * b.v, a.t * b.v + a.v * b.t};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.v;
  return {a.v * inv, (a.t - a.v * inv * b.t) * inv};
}

inline Dual& operator+=(Dual& a, const Dual& b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, const Dual& b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, const Dual& b) { a = a * b; return a; }
inline Dual& operator/=(Dual& a, const Dual& b) { a = a / b; return a; }

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.v);
  return {e, a.t * e};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.t / a.v}; }
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return {s, 0.5 * a.t / s};
}
inline Dual abs(const Dual& a) { return a.v < 0.0 ? -a : a; }
inline Dual abs2(const Dual& a) { return a * a; }
inline const Dual& conj(const Dual& a) { return a; }
inline const Dual& real(const Dual& a) { return a; }
inline Dual imag(const Dual&) { return {0.0, 0.0}; }
inline bool isfinite(const Dual& a) { return std::isfinite(a.v) && std::isfinite(a.t); }

// Scalar accessors shared by the templated math so double and Dual paths
// read identically.
inline double value(double x) { return x; }
inline double value(const Dual& x) { return x.v; }
inline double tangent(double) { return 0.0; }
inline double tangent(const Dual& x) { return x.t; }

}  // namespace fairmeta

namespace Eigen {

template <>
struct NumTraits<fairmeta::Dual> : NumTraits<double> {
  typedef fairmeta::Dual Real;
  typedef fairmeta::Dual NonInteger;
  typedef fairmeta::Dual Nested;
  typedef fairmeta::Dual Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 2,
    MulCost = 4
  };
};

}  // namespace Eigen
