#pragma once

// Forward-mode derivatives via truncated Taylor values ("jets").
// Jet<double> carries a value plus directional derivatives; nesting
// Jet<Jet<double>> yields second derivatives, and so on. Evaluating an
// expression tree on jets is exact differentiation, never a finite
// difference.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace excal {

class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct Jet {
  T v{};
  std::vector<T> d;  // directional derivatives; missing entries are zero

  Jet() = default;
  Jet(T value) : v(std::move(value)) {}
  Jet(T value, std::vector<T> deriv) : v(std::move(value)), d(std::move(deriv)) {}
  // Lift a plain constant through any nesting depth.
  template <class U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
  Jet(double value) : v(value) {}
};

template <class T>
inline constexpr int jet_depth = 0;
template <class T>
inline constexpr int jet_depth<Jet<T>> = jet_depth<T> + 1;

// Maximum nesting of derivative evaluation. Recursive divergence of a
// grade-k field stacks k-1 derivative nodes; 6 covers everything the
// engine constructs at n <= 8.
inline constexpr int kMaxJetDepth = 6;

namespace detail {

template <class T>
const T& jet_part(const std::vector<T>& d, std::size_t i) {
  static const T zero{};
  return i < d.size() ? d[i] : zero;
}

}  // namespace detail

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r(a.v + b.v);
  std::size_t m = std::max(a.d.size(), b.d.size());
  r.d.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    r.d.push_back(detail::jet_part(a.d, i) + detail::jet_part(b.d, i));
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r(a.v - b.v);
  std::size_t m = std::max(a.d.size(), b.d.size());
  r.d.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    r.d.push_back(detail::jet_part(a.d, i) - detail::jet_part(b.d, i));
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a) {
  Jet<T> r(-a.v);
  r.d.reserve(a.d.size());
  for (const auto& x : a.d) r.d.push_back(-x);
  return r;
}

template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r(a.v * b.v);
  std::size_t m = std::max(a.d.size(), b.d.size());
  r.d.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    r.d.push_back(detail::jet_part(a.d, i) * b.v + a.v * detail::jet_part(b.d, i));
  return r;
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  T q = a.v / b.v;
  Jet<T> r(q);
  std::size_t m = std::max(a.d.size(), b.d.size());
  r.d.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    r.d.push_back((detail::jet_part(a.d, i) - q * detail::jet_part(b.d, i)) / b.v);
  return r;
}

// Elementary functions, overloaded on double (with domain checks) and on
// jets (chain rule). Division by zero and log/sqrt domain violations
// surface as EvalError at the innermost scalar level.

inline double primal(double x) { return x; }
template <class T>
double primal(const Jet<T>& a) { return primal(a.v); }

inline double j_sin(double x) { return std::sin(x); }
inline double j_cos(double x) { return std::cos(x); }
inline double j_exp(double x) { return std::exp(x); }
inline double j_tanh(double x) { return std::tanh(x); }
inline double j_log(double x) {
  if (!(x > 0.0)) throw EvalError("log of non-positive value");
  return std::log(x);
}
inline double j_sqrt(double x) {
  if (x < 0.0) throw EvalError("sqrt of negative value");
  return std::sqrt(x);
}
inline double j_pospart(double x) { return x > 0.0 ? x : 0.0; }
inline double j_pospart_slope(double x) { return x > 0.0 ? 1.0 : 0.0; }
inline double j_recip(double x) {
  if (x == 0.0) throw EvalError("division by zero");
  return 1.0 / x;
}

template <class T>
Jet<T> apply_chain(const Jet<T>& a, T fv, T fd) {
  Jet<T> r(std::move(fv));
  r.d.reserve(a.d.size());
  for (const auto& x : a.d) r.d.push_back(fd * x);
  return r;
}

template <class T>
Jet<T> j_sin(const Jet<T>& a) { return apply_chain(a, j_sin(a.v), j_cos(a.v)); }
template <class T>
Jet<T> j_cos(const Jet<T>& a) { return apply_chain(a, j_cos(a.v), -j_sin(a.v)); }
template <class T>
Jet<T> j_exp(const Jet<T>& a) { T e = j_exp(a.v); return apply_chain(a, e, e); }
template <class T>
Jet<T> j_log(const Jet<T>& a) { return apply_chain(a, j_log(a.v), j_recip(a.v)); }
template <class T>
Jet<T> j_sqrt(const Jet<T>& a) {
  T s = j_sqrt(a.v);
  return apply_chain(a, s, j_recip(T{2.0} * s));
}
template <class T>
Jet<T> j_tanh(const Jet<T>& a) {
  T t = j_tanh(a.v);
  return apply_chain(a, t, T{1.0} - t * t);
}
template <class T>
Jet<T> j_pospart(const Jet<T>& a) {
  return apply_chain(a, j_pospart(a.v), j_pospart_slope(a.v));
}
template <class T>
Jet<T> j_pospart_slope(const Jet<T>& a) { return Jet<T>{T{j_pospart_slope(primal(a))}}; }
template <class T>
Jet<T> j_recip(const Jet<T>& a) { return Jet<T>(T{1.0}) / a; }

// Integer powers by repeated multiplication; negative exponents divide.
template <class T>
T j_ipow(const T& base, int e) {
  if (e == 0) return T{1.0};
  bool neg = e < 0;
  unsigned long k = neg ? -static_cast<long>(e) : e;
  T acc{1.0};
  T b = base;
  while (k) {
    if (k & 1) acc = acc * b;
    b = b * b;
    k >>= 1;
  }
  if (neg) {
    if (primal(acc) == 0.0) throw EvalError("division by zero in negative power");
    return T{1.0} / acc;
  }
  return acc;
}

inline double j_ipow(double base, int e) {
  if (e >= 0) return std::pow(base, e);
  double p = std::pow(base, -e);
  if (p == 0.0) throw EvalError("division by zero in negative power");
  return 1.0 / p;
}

using Jet1 = Jet<double>;

}  // namespace excal
