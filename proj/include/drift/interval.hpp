// Outward-rounded interval arithmetic on binary64.
//
// Rounding is done in software: every native operation runs in the default
// round-to-nearest mode and the result is widened to the next representable
// number in the direction the rounding error could have gone.  Error-free
// transformations (TwoSum, fma-based TwoProduct) detect exact results, so
// exact endpoint arithmetic produces degenerate-width results.  No global
// floating-point state is touched; every function is pure.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace drift {

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this magnitude the error terms of fma/TwoSum may be inexact
// (subnormal range), so results are widened unconditionally.
inline constexpr double kTiny = 0x1p-960;

inline double next_down(double x) { return std::nextafter(x, -kInf); }
inline double next_up(double x) { return std::nextafter(x, kInf); }

inline double check_finite(double x) {
  if (!std::isfinite(x)) throw std::overflow_error("interval bound overflowed to infinity");
  return x;
}

// Sum with exact error sign: returns s = fl(a+b) and e with a+b = s+e.
inline double two_sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

inline double add_down(double a, double b) {
  const double s = check_finite(a + b);
  return two_sum_err(a, b, s) < 0.0 ? next_down(s) : s;
}
inline double add_up(double a, double b) {
  const double s = check_finite(a + b);
  return two_sum_err(a, b, s) > 0.0 ? next_up(s) : s;
}

inline double mul_down(double a, double b) {
  const double p = check_finite(a * b);
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::fabs(p) < kTiny) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}
inline double mul_up(double a, double b) {
  const double p = check_finite(a * b);
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::fabs(p) < kTiny) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

// a/b = q + r/b with r = a - q*b exact in the normal range.
inline double div_down(double a, double b) {
  const double q = check_finite(a / b);
  if (a == 0.0) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_down(q);
  const double r = std::fma(-q, b, a);
  const bool below = (r < 0.0) == (b > 0.0) && r != 0.0;
  return below ? next_down(q) : q;
}
inline double div_up(double a, double b) {
  const double q = check_finite(a / b);
  if (a == 0.0) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
  const double r = std::fma(-q, b, a);
  const bool above = (r > 0.0) == (b > 0.0) && r != 0.0;
  return above ? next_up(q) : q;
}

inline double sqrt_down(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0) return 0.0;
  if (a < kTiny) return next_down(s);
  return std::fma(-s, s, a) < 0.0 ? next_down(s) : s;
}
inline double sqrt_up(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0) return 0.0;
  if (a < kTiny) return next_up(s);
  return std::fma(-s, s, a) > 0.0 ? next_up(s) : s;
}

// libm transcendental results are assumed accurate to one ulp; two steps of
// widening cover that with margin.
inline double libm_down(double v) { return next_down(next_down(v)); }
inline double libm_up(double v) { return next_up(next_up(v)); }

}  // namespace detail

class Interval {
 public:
  constexpr Interval() = default;

  // NOLINTNEXTLINE(google-explicit-constructor): point intervals mix freely with doubles.
  Interval(double v) : lo_(v), hi_(v) {
    if (!std::isfinite(v)) throw std::invalid_argument("interval bound must be finite");
  }

  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("interval bound must be finite");
    if (!(lo <= hi)) throw std::invalid_argument("interval lower bound exceeds upper bound");
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  // Midpoint rounded to nearest; always lies in the interval.
  double mid() const {
    const double m = 0.5 * lo_ + 0.5 * hi_;
    return std::clamp(m, lo_, hi_);
  }
  // Upper bound on the radius (so [mid-rad, mid+rad] covers the interval).
  double rad() const {
    const double m = mid();
    return std::max(detail::add_up(m, -lo_), detail::add_up(hi_, -m));
  }
  double width() const { return detail::add_up(hi_, -lo_); }
  // Magnitude max|x| and mignitude min|x|.
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  double mig() const {
    if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
  }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool is_point() const { return lo_ == hi_; }

  // Strictly positive / negative in the certified sense.
  bool certainly_pos() const { return lo_ > 0.0; }
  bool certainly_neg() const { return hi_ < 0.0; }

  Interval operator-() const { return {-hi_, -lo_}; }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return {detail::add_down(a.lo_, b.lo_), detail::add_up(a.hi_, b.hi_)};
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return {detail::add_down(a.lo_, -b.hi_), detail::add_up(a.hi_, -b.lo_)};
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    using namespace detail;
    if (a.lo_ >= 0.0 && b.lo_ >= 0.0)
      return {mul_down(a.lo_, b.lo_), mul_up(a.hi_, b.hi_)};
    const double lo = std::min({mul_down(a.lo_, b.lo_), mul_down(a.lo_, b.hi_),
                                mul_down(a.hi_, b.lo_), mul_down(a.hi_, b.hi_)});
    const double hi = std::max({mul_up(a.lo_, b.lo_), mul_up(a.lo_, b.hi_),
                                mul_up(a.hi_, b.lo_), mul_up(a.hi_, b.hi_)});
    return {lo, hi};
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    using namespace detail;
    if (b.contains_zero()) throw std::domain_error("division by an interval containing zero");
    const double lo = std::min({div_down(a.lo_, b.lo_), div_down(a.lo_, b.hi_),
                                div_down(a.hi_, b.lo_), div_down(a.hi_, b.hi_)});
    const double hi = std::max({div_up(a.lo_, b.lo_), div_up(a.lo_, b.hi_),
                                div_up(a.hi_, b.lo_), div_up(a.hi_, b.hi_)});
    return {lo, hi};
  }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", x.lo_, x.hi_);
    return os << buf;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

// ---------------------------------------------------------------------------
// Constants

// pi lies strictly between the binary64 value M_PI rounds to and its successor.
inline Interval pi_interval() {
  constexpr double kPiLo = 0x1.921fb54442d18p+1;
  return {kPiLo, detail::next_up(kPiLo)};
}
inline Interval two_pi_interval() { return pi_interval() * Interval(2.0); }
inline Interval half_pi_interval() { return pi_interval() * Interval(0.5); }

// ---------------------------------------------------------------------------
// Lattice operations

inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

// Empty intersection is reported as nullopt, not as an error.
inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

// Strict inclusion in the interior: the test used by interval Newton.
inline bool subset(const Interval& inner, const Interval& outer) {
  return outer.lo() < inner.lo() && inner.hi() < outer.hi();
}

inline double midpoint(const Interval& a) { return a.mid(); }
inline double radius(const Interval& a) { return a.rad(); }

inline Interval inflate(const Interval& a, double r) {
  if (r < 0.0) throw std::invalid_argument("inflate: negative radius");
  return {detail::add_down(a.lo(), -r), detail::add_up(a.hi(), r)};
}

// Symmetric interval [-r, r].
inline Interval symmetric(double r) { return {-std::fabs(r), std::fabs(r)}; }

// ---------------------------------------------------------------------------
// Elementary functions

inline Interval sqr(const Interval& a) {
  using namespace detail;
  if (a.lo() >= 0.0) return {mul_down(a.lo(), a.lo()), mul_up(a.hi(), a.hi())};
  if (a.hi() <= 0.0) return {mul_down(a.hi(), a.hi()), mul_up(a.lo(), a.lo())};
  return {0.0, std::max(mul_up(a.lo(), a.lo()), mul_up(a.hi(), a.hi()))};
}

inline Interval abs(const Interval& a) {
  if (a.lo() >= 0.0) return a;
  if (a.hi() <= 0.0) return -a;
  return {0.0, a.mag()};
}

inline Interval sqrt(const Interval& a) {
  if (a.lo() < 0.0) throw std::domain_error("sqrt of an interval with negative part");
  return {detail::sqrt_down(a.lo()), detail::sqrt_up(a.hi())};
}

inline Interval exp(const Interval& a) {
  const double lo = std::max(0.0, detail::libm_down(std::exp(a.lo())));
  return {lo, detail::check_finite(detail::libm_up(std::exp(a.hi())))};
}

inline Interval log(const Interval& a) {
  if (a.lo() <= 0.0) throw std::domain_error("log of a non-positive interval");
  return {detail::libm_down(std::log(a.lo())), detail::libm_up(std::log(a.hi()))};
}

inline Interval max(const Interval& a, const Interval& b) {
  return {std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

namespace detail {

// True unless [a.lo, a.hi] certainly misses every point phase + 2k*pi.
inline bool may_contain_phase(const Interval& a, const Interval& phase) {
  const Interval period = two_pi_interval();
  const Interval t_lo = (Interval(a.lo()) - phase) / period;
  const Interval t_hi = (Interval(a.hi()) - phase) / period;
  return std::floor(t_hi.hi()) >= std::ceil(t_lo.lo());
}

// Range of a 2pi-periodic function with a single max at max_phase and a single
// min at max_phase+pi, strictly monotone in between.
template <class Fn>
Interval periodic_range(const Interval& a, Fn fn, const Interval& max_phase) {
  if (a.width() >= two_pi_interval().lo()) return {-1.0, 1.0};
  const double fa = fn(a.lo());
  const double fb = fn(a.hi());
  double lo = std::max(-1.0, libm_down(std::min(fa, fb)));
  double hi = std::min(1.0, libm_up(std::max(fa, fb)));
  if (may_contain_phase(a, max_phase)) hi = 1.0;
  if (may_contain_phase(a, max_phase + pi_interval())) lo = -1.0;
  return {lo, hi};
}

}  // namespace detail

inline Interval sin(const Interval& a) {
  return detail::periodic_range(a, [](double x) { return std::sin(x); }, half_pi_interval());
}

inline Interval cos(const Interval& a) {
  return detail::periodic_range(a, [](double x) { return std::cos(x); }, Interval(0.0));
}

// Integer power by repeated squaring; exact sign handling through sqr.
inline Interval pow(const Interval& a, unsigned n) {
  Interval result(1.0);
  Interval base = a;
  bool first = true;
  while (n > 0) {
    if (n & 1u) {
      result = first ? base : result * base;
      first = false;
    }
    n >>= 1u;
    if (n > 0) base = sqr(base);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

// Exact hexadecimal form of a double ("%a"); parses back bit-exactly.
inline std::string to_hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

inline double parse_hex(std::string_view text) {
  const std::string s(text);
  if (s.size() < 3 || s.find("0x") == std::string::npos)
    throw std::invalid_argument("not a hexadecimal float: '" + s + "'");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("malformed hexadecimal float: '" + s + "'");
  return v;
}

// Human-readable decimal display; never parsed back for certification.
inline std::string to_display(const Interval& x, int digits = 17) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "[%.*g, %.*g]", digits, x.lo(), digits, x.hi());
  return buf;
}

}  // namespace drift
